// phase_function.hpp - chirp phase laws f(c2, m) for the second AFDM chirp
//
//   Conventional:  f(c2, m) = c2 m^2
//   CosineFamily:  f(c2, m) = kappa m^a cos(pi c2 m^b),  b >= 0
//
// Phases are in cycles. For integer b the cosine argument c2 m^b is reduced
// modulo 2 exactly (integer m^b, 128-bit mantissa product), so b = 10 at
// N = 64 (m^b ~ 1e18) keeps full phase accuracy. Non-integer b falls back to
// floating-point pow/fmod and loses accuracy once c2 m^b exceeds ~1e8.

#pragma once

#include "afdm/types.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

namespace afdm {

enum class PhaseKind { Conventional, CosineFamily };

enum class Direction { Modulate, Demodulate };

struct PhaseFunction {
    PhaseKind kind = PhaseKind::Conventional;
    double c2 = 0.0;
    double kappa = std::numbers::sqrt2 - 1.0;
    double a = 2.0;
    double b = 1.0;

    static PhaseFunction conventional(double c2) {
        PhaseFunction p;
        p.kind = PhaseKind::Conventional;
        p.c2 = c2;
        return p;
    }

    static PhaseFunction cosine(double c2, double b, double kappa = std::numbers::sqrt2 - 1.0, double a = 2.0) {
        PhaseFunction p;
        p.kind = PhaseKind::CosineFamily;
        p.c2 = c2;
        p.kappa = kappa;
        p.a = a;
        p.b = b;
        return p;
    }

    PhaseFunction with_c2(double value) const {
        PhaseFunction p = *this;
        p.c2 = value;
        return p;
    }

    PhaseFunction with_kappa(double value) const {
        PhaseFunction p = *this;
        p.kappa = value;
        return p;
    }

    bool operator==(const PhaseFunction&) const = default;
};

inline std::string to_string(PhaseKind kind) {
    return kind == PhaseKind::Conventional ? "conventional" : "cosine";
}

inline std::optional<PhaseKind> parse_phase_kind(const std::string& name) {
    if (name == "conventional") return PhaseKind::Conventional;
    if (name == "cosine") return PhaseKind::CosineFamily;
    return std::nullopt;
}

// Checks b >= 0, finite fields and c2 in (0, 1].
inline void validate(const PhaseFunction& p) {
    if (!std::isfinite(p.c2) || !std::isfinite(p.kappa) || !std::isfinite(p.a) || !std::isfinite(p.b))
        throw ConfigError("phase function parameters must be finite");
    if (!(p.c2 > 0.0 && p.c2 <= 1.0)) throw ConfigError("c2 must lie in (0, 1], got " + std::to_string(p.c2));
    if (p.kind == PhaseKind::CosineFamily && p.b < 0.0)
        throw ConfigError("exponent b must be non-negative, got " + std::to_string(p.b));
}

namespace detail {

inline std::optional<std::uint64_t> exact_power(std::int64_t m, double exponent) {
    if (exponent < 0.0 || exponent != std::floor(exponent) || exponent > 64.0) return std::nullopt;
    const auto e = static_cast<int>(exponent);
    unsigned __int128 acc = 1;
    for (int i = 0; i < e; ++i) {
        acc *= static_cast<unsigned __int128>(m);
        if (acc > std::numeric_limits<std::int64_t>::max()) return std::nullopt;
    }
    return static_cast<std::uint64_t>(acc);
}

// (c2 m^b) mod 2, the cosine argument in half-cycles.
inline double cosine_argument(const PhaseFunction& p, std::int64_t m) {
    if (auto power = exact_power(m, p.b)) {
        return static_cast<double>(exact_mul_mod(p.c2, static_cast<std::int64_t>(*power), 1));
    }
    const double x = std::fmod(p.c2 * std::pow(static_cast<double>(m), p.b), 2.0);
    return x < 0.0 ? x + 2.0 : x;
}

inline double power(std::int64_t m, double exponent) {
    if (m == 0) return exponent == 0.0 ? 1.0 : 0.0;
    return std::pow(static_cast<double>(m), exponent);
}

inline double sin_pi(double x) { return std::sin(kPi * x); }
inline double cos_pi(double x) { return std::cos(kPi * x); }

}  // namespace detail

inline double f_eval(const PhaseFunction& p, std::int64_t m) {
    if (p.kind == PhaseKind::Conventional) return p.c2 * static_cast<double>(m) * static_cast<double>(m);
    return p.kappa * detail::power(m, p.a) * detail::cos_pi(detail::cosine_argument(p, m));
}

// f(c2, m) modulo one, in [0, 1). Use this, not f_eval, to build complex exponentials.
inline double f_eval_mod1(const PhaseFunction& p, std::int64_t m) {
    if (p.kind == PhaseKind::Conventional) return static_cast<double>(detail::exact_mul_mod(p.c2, m * m, 0));
    return detail::frac(f_eval(p, m));
}

// Signed partial derivative in c2.
inline double df_dc2(const PhaseFunction& p, std::int64_t m) {
    if (p.kind == PhaseKind::Conventional) return static_cast<double>(m) * static_cast<double>(m);
    return -p.kappa * kPi * detail::power(m, p.a + p.b) * detail::sin_pi(detail::cosine_argument(p, m));
}

inline double df_dkappa(const PhaseFunction& p, std::int64_t m) {
    if (p.kind != PhaseKind::CosineFamily)
        throw UnsupportedOperation("df_dkappa is only defined for the cosine phase family");
    return detail::power(m, p.a) * detail::cos_pi(detail::cosine_argument(p, m));
}

// Diagonal of Lambda^H (modulate, e^{+j2pi f}) or Lambda (demodulate, e^{-j2pi f}).
inline CVector phase_diag(const PhaseFunction& p, std::int64_t n_sub, Direction dir) {
    CVector d(n_sub);
    const double sign = dir == Direction::Modulate ? 1.0 : -1.0;
    for (std::int64_t m = 0; m < n_sub; ++m) d[m] = detail::cis_cycles(sign * f_eval_mod1(p, m));
    return d;
}

// Per-subcarrier rotation e^{j2pi (f(true, k) - f(candidate, k))} that a receiver
// demodulating with `candidate` sees on transmitted symbol k (noise-free, exact).
inline CVector mismatch_rotation(const PhaseFunction& truth, const PhaseFunction& candidate, std::int64_t n_sub) {
    CVector d(n_sub);
    for (std::int64_t k = 0; k < n_sub; ++k)
        d[k] = detail::cis_cycles(f_eval_mod1(truth, k) - f_eval_mod1(candidate, k));
    return d;
}

}  // namespace afdm
