// channel.hpp - doubly dispersive (delay/Doppler) channel
//
//   H = sum_p h_p Gamma_p Pi^{l_p} Delta^{nu_p}
//
// Row n of path p touches column (n - l_p) mod N with gain
//   h_p e^{-j2pi nu_p (n - l_p)/N} * Gamma_p[n],
//   Gamma_p[n] = e^{-j2pi c1 (N^2 - 2N(l_p - n))} for n < l_p, else 1.
// The Doppler phase uses the unwrapped transmit index n - l_p, so samples
// that came from the prefix keep a continuous Doppler ramp. For integer nu_p
// this is identical to Pi^l Delta^nu; for fractional nu_p it is the form that
// matches the tapped-delay-line propagation of a CPP-extended block.

#pragma once

#include "afdm/modem.hpp"
#include "afdm/types.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace afdm {

enum class CoefficientModel { FixedMagnitudeRandomPhase, ComplexGaussian };

inline std::string to_string(CoefficientModel m) {
    return m == CoefficientModel::FixedMagnitudeRandomPhase ? "fixed-magnitude" : "complex-gaussian";
}

struct ChannelProfile {
    std::vector<double> powers;
    std::vector<std::int64_t> delays;
    std::vector<double> dopplers;
    double nu_max = 0.0;
    CoefficientModel model = CoefficientModel::FixedMagnitudeRandomPhase;

    std::int64_t max_delay() const { return delays.empty() ? 0 : delays.back(); }

    // Four-tap profile used throughout the figure campaigns.
    static ChannelProfile reference() {
        return {{0.1941, 0.4056, 0.2388, 0.1615}, {0, 1, 2, 3}, {0.0, -0.3, 0.8, 3.0}, 3.0,
                CoefficientModel::FixedMagnitudeRandomPhase};
    }

    bool operator==(const ChannelProfile&) const = default;
};

inline void validate(const ChannelProfile& prof) {
    const auto p = prof.powers.size();
    if (p == 0) throw ConfigError("channel profile needs at least one tap");
    if (prof.delays.size() != p || prof.dopplers.size() != p)
        throw ConfigError("channel powers, delays and dopplers must have equal lengths");
    double total = 0.0;
    for (double rho : prof.powers) {
        if (!(rho >= 0.0)) throw ConfigError("tap powers must be non-negative");
        total += rho;
    }
    if (std::fabs(total - 1.0) > 1e-9) throw ConfigError("tap powers must sum to 1, got " + std::to_string(total));
    for (std::size_t i = 0; i < p; ++i) {
        if (prof.delays[i] < 0) throw ConfigError("tap delays must be non-negative");
        if (i > 0 && prof.delays[i] <= prof.delays[i - 1]) throw ConfigError("tap delays must be strictly increasing");
        if (!std::isfinite(prof.dopplers[i]) || std::fabs(prof.dopplers[i]) > prof.nu_max)
            throw ConfigError("tap Doppler exceeds nu_max");
    }
}

struct Tap {
    Complex gain;
    std::int64_t delay = 0;
    double doppler = 0.0;
};

struct ChannelRealization {
    std::vector<Tap> taps;
};

template <class Rng>
ChannelRealization draw_realization(const ChannelProfile& prof, Rng& rng) {
    ChannelRealization real;
    real.taps.reserve(prof.powers.size());
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t p = 0; p < prof.powers.size(); ++p) {
        Complex h;
        if (prof.model == CoefficientModel::FixedMagnitudeRandomPhase) {
            h = std::polar(std::sqrt(prof.powers[p]), phase(rng));
        } else {
            const double sd = std::sqrt(prof.powers[p] / 2.0);
            const double re = normal(rng);
            const double im = normal(rng);
            h = Complex(sd * re, sd * im);
        }
        real.taps.push_back({h, prof.delays[p], prof.dopplers[p]});
    }
    return real;
}

namespace detail {

inline void check_delays(const ChannelRealization& real, const AfdmParams& params) {
    for (const auto& tap : real.taps) {
        if (tap.delay < 0 || tap.delay > params.cpp_len)
            throw ConfigError("tap delay " + std::to_string(tap.delay) + " exceeds CPP length " +
                              std::to_string(params.cpp_len));
    }
}

// Gain of tap `tap` on row n (column (n - l) mod N).
inline Complex row_gain(const Tap& tap, std::int64_t n, const AfdmParams& params) {
    const std::int64_t big_n = params.n_sub;
    Complex g = tap.gain * cis_cycles(-tap.doppler * static_cast<double>(n - tap.delay) / static_cast<double>(big_n));
    if (n < tap.delay) {
        const std::int64_t count = big_n * big_n - 2 * big_n * (tap.delay - n);
        g *= cis_cycles(-static_cast<double>(exact_mul_mod(params.c1, count, 0)));
    }
    return g;
}

}  // namespace detail

// Sparse form of H: per-tap per-row gains. Multiplication costs P*N per vector.
class ChannelOperator {
public:
    ChannelOperator(const ChannelRealization& real, const AfdmParams& params) : n_(params.n_sub) {
        detail::check_delays(real, params);
        for (const auto& tap : real.taps) {
            Path path;
            path.delay = tap.delay;
            path.gains.resize(n_);
            for (std::int64_t n = 0; n < n_; ++n) path.gains[n] = detail::row_gain(tap, n, params);
            paths_.push_back(std::move(path));
        }
    }

    std::int64_t size() const { return n_; }

    CVector apply(const CVector& s) const {
        if (s.size() != n_) throw ShapeError("channel input length mismatch");
        CVector out = CVector::Zero(n_);
        for (const auto& path : paths_)
            for (std::int64_t n = 0; n < n_; ++n) out[n] += path.gains[n] * s[(n - path.delay + n_) % n_];
        return out;
    }

    // H * m
    CMatrix left_multiply(const CMatrix& m) const {
        if (m.rows() != n_) throw ShapeError("channel operand row mismatch");
        CMatrix out = CMatrix::Zero(n_, m.cols());
        for (const auto& path : paths_)
            for (std::int64_t n = 0; n < n_; ++n) out.row(n) += path.gains[n] * m.row((n - path.delay + n_) % n_);
        return out;
    }

    CMatrix dense() const {
        CMatrix h = CMatrix::Zero(n_, n_);
        for (const auto& path : paths_)
            for (std::int64_t n = 0; n < n_; ++n) h(n, (n - path.delay + n_) % n_) += path.gains[n];
        return h;
    }

private:
    struct Path {
        std::int64_t delay = 0;
        std::vector<Complex> gains;
    };

    std::int64_t n_;
    std::vector<Path> paths_;
};

inline CMatrix build_channel_matrix(const ChannelRealization& real, const AfdmParams& params) {
    return ChannelOperator(real, params).dense();
}

// 10^{-snr/10}; +inf SNR gives zero noise.
inline double noise_variance(double snr_db) {
    if (std::isinf(snr_db) && snr_db > 0) return 0.0;
    return std::pow(10.0, -snr_db / 10.0);
}

// Circularly symmetric unit-variance complex Gaussian samples.
template <class Rng>
CVector unit_noise(std::int64_t n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CVector w(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        w[i] = Complex(re, im);
    }
    return w;
}

template <class Rng>
CVector apply_channel(const CMatrix& h, const CVector& s, double snr_db, Rng& rng) {
    if (h.cols() != s.size()) throw ShapeError("channel matrix and signal length disagree");
    CVector r = h * s;
    const double sigma2 = noise_variance(snr_db);
    if (sigma2 > 0.0) r += std::sqrt(sigma2) * unit_noise(r.size(), rng);
    return r;
}

// Tapped delay line over a CPP-extended block (verification path for H).
inline CVector propagate_time_domain(const ChannelRealization& real, const CVector& s_cpp, const AfdmParams& params) {
    const std::int64_t len = s_cpp.size();
    const std::int64_t l = params.cpp_len;
    const auto big_n = static_cast<double>(params.n_sub);
    CVector out = CVector::Zero(len);
    for (const auto& tap : real.taps) {
        for (std::int64_t n = 0; n < len; ++n) {
            const std::int64_t src = n - tap.delay;
            if (src < 0 || src >= len) continue;
            const double cyc = -tap.doppler * static_cast<double>(n - l - tap.delay) / big_n;
            out[n] += tap.gain * detail::cis_cycles(cyc) * s_cpp[src];
        }
    }
    return out;
}

}  // namespace afdm
