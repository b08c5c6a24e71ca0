// constellation.hpp - Gray-labelled QAM mapping, hard demapping and bit error counting
//
// QPSK labelling: (b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
// Square M-QAM uses the same per-axis Gray/sign convention, so 16-QAM can be
// added through ConstellationSpec::qam() without changing call sites.

#pragma once

#include "afdm/types.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace afdm {

using Bits = std::vector<std::uint8_t>;

class ConstellationSpec {
public:
    static ConstellationSpec qpsk() { return qam(4); }

    // Square Gray-labelled QAM with unit average energy. order must be 4^k.
    static ConstellationSpec qam(int order) {
        int bits = 0;
        while ((1 << bits) < order) ++bits;
        if (order < 4 || (1 << bits) != order || bits % 2 != 0)
            throw ConfigError("QAM order must be an even power of two >= 4, got " + std::to_string(order));

        ConstellationSpec spec;
        spec.order_ = order;
        spec.bits_per_symbol_ = bits;
        const int half = bits / 2;
        const int side = 1 << half;

        // Per axis: bits -> Gray index -> amplitude 1-2g' where the first bit is the sign.
        auto axis_level = [side](unsigned label) {
            unsigned gray_to_bin = 0;
            for (unsigned g = label; g != 0; g >>= 1) gray_to_bin ^= g;
            // gray_to_bin = 0 maps to the most positive level
            return static_cast<double>(side - 1 - 2 * static_cast<int>(gray_to_bin));
        };

        double energy = 0.0;
        std::vector<Complex> raw(order);
        for (int label = 0; label < order; ++label) {
            // label bits, MSB first: first half -> in-phase, second half -> quadrature,
            // interleaved as (i0, q0, i1, q1, ...) so QPSK reads (b0 -> I, b1 -> Q).
            unsigned ibits = 0;
            unsigned qbits = 0;
            for (int k = 0; k < half; ++k) {
                const unsigned bi = (label >> (bits - 1 - 2 * k)) & 1u;
                const unsigned bq = (label >> (bits - 2 - 2 * k)) & 1u;
                ibits = (ibits << 1) | bi;
                qbits = (qbits << 1) | bq;
            }
            raw[label] = Complex(axis_level(ibits), axis_level(qbits));
            energy += std::norm(raw[label]);
        }
        const double scale = 1.0 / std::sqrt(energy / order);
        spec.points_.reserve(order);
        for (const auto& p : raw) spec.points_.push_back(p * scale);
        return spec;
    }

    int order() const { return order_; }
    int bits_per_symbol() const { return bits_per_symbol_; }
    const std::vector<Complex>& points() const { return points_; }

    // Label bits of point `label`, MSB first.
    Bits label_bits(int label) const {
        Bits out(bits_per_symbol_);
        for (int k = 0; k < bits_per_symbol_; ++k) out[k] = (label >> (bits_per_symbol_ - 1 - k)) & 1u;
        return out;
    }

    bool operator==(const ConstellationSpec&) const = default;

private:
    ConstellationSpec() = default;

    int order_ = 0;
    int bits_per_symbol_ = 0;
    std::vector<Complex> points_;
};

inline CVector map_bits(std::span<const std::uint8_t> bits, const ConstellationSpec& spec) {
    const auto bps = static_cast<std::size_t>(spec.bits_per_symbol());
    if (bits.size() % bps != 0)
        throw ShapeError("bit count " + std::to_string(bits.size()) + " is not a multiple of " + std::to_string(bps));
    CVector out(static_cast<Eigen::Index>(bits.size() / bps));
    for (Eigen::Index s = 0; s < out.size(); ++s) {
        unsigned label = 0;
        for (std::size_t k = 0; k < bps; ++k) label = (label << 1) | (bits[s * bps + k] & 1u);
        out[s] = spec.points()[label];
    }
    return out;
}

// Nearest point in Euclidean distance; ties go to the lowest label.
inline Bits demap_hard(const CVector& symbols, const ConstellationSpec& spec) {
    const int bps = spec.bits_per_symbol();
    Bits out;
    out.reserve(static_cast<std::size_t>(symbols.size() * bps));
    const auto& pts = spec.points();
    for (Eigen::Index s = 0; s < symbols.size(); ++s) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int label = 0; label < spec.order(); ++label) {
            const double d = std::norm(symbols[s] - pts[label]);
            if (d < best_d) {
                best_d = d;
                best = label;
            }
        }
        for (int k = 0; k < bps; ++k) out.push_back(static_cast<std::uint8_t>((best >> (bps - 1 - k)) & 1));
    }
    return out;
}

inline std::int64_t count_bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
    if (tx.size() != rx.size())
        throw ShapeError("bit sequences differ in length: " + std::to_string(tx.size()) + " vs " +
                         std::to_string(rx.size()));
    std::int64_t errors = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) errors += (tx[i] & 1u) != (rx[i] & 1u);
    return errors;
}

}  // namespace afdm
