// types.hpp - common aliases, error types and exact phase reduction helpers

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace afdm {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wrong vector/matrix length or bit count.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Parameter combination that violates a model invariant.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Linear system is singular (only reachable with zero noise regularization).
struct RankError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedOperation : std::logic_error {
    using std::logic_error::logic_error;
};

namespace detail {

// Returns (c * count) mod 2^modulus_log2 for modulus_log2 in {0, 1}, computed
// exactly: c is split into its 53-bit integer mantissa and binary exponent and
// the product is formed in 128-bit integer arithmetic. The result is in
// [0, 2^modulus_log2).
inline long double exact_mul_mod(double c, std::int64_t count, int modulus_log2) {
    if (c == 0.0 || count == 0) return 0.0L;
    const long double modulus = modulus_log2 == 0 ? 1.0L : 2.0L;
    bool negative = (c < 0.0) != (count < 0);
    const double mag = std::fabs(c);
    const auto ucount = static_cast<unsigned __int128>(count < 0 ? -static_cast<__int128>(count) : count);

    int exp2 = 0;
    const double frac = std::frexp(mag, &exp2);  // mag = frac * 2^exp2, frac in [0.5, 1)
    const auto mant = static_cast<std::uint64_t>(std::ldexp(frac, 53));
    const int shift = 53 - exp2;  // mag = mant * 2^-shift

    long double reduced = 0.0L;
    if (shift <= 0) {
        // mag is an integer multiple of 2^-shift >= 1, so the product is an integer.
        if (-shift >= modulus_log2 || shift < -64) {
            reduced = 0.0L;
        } else {
            const unsigned __int128 prod = static_cast<unsigned __int128>(mant) * ucount;
            reduced = static_cast<long double>(prod & 1u) * (modulus_log2 == 1 ? 1.0L : 0.0L);
        }
    } else {
        const unsigned __int128 prod = static_cast<unsigned __int128>(mant) * ucount;
        const int keep_bits = shift + modulus_log2;
        unsigned __int128 kept = prod;
        if (keep_bits < 128) kept &= ((static_cast<unsigned __int128>(1) << keep_bits) - 1u);
        const auto hi = static_cast<std::uint64_t>(kept >> 64);
        const auto lo = static_cast<std::uint64_t>(kept);
        const long double value = std::ldexp(static_cast<long double>(hi), 64) + static_cast<long double>(lo);
        reduced = std::ldexp(value, -shift);
        // Residuals beyond 2^modulus only occur when keep_bits >= 128.
        reduced = std::fmod(reduced, modulus);
    }
    if (negative && reduced != 0.0L) reduced = modulus - reduced;
    if (reduced >= modulus) reduced -= modulus;
    return reduced;
}

// Fractional part in [0, 1).
inline double frac(double cycles) {
    double f = cycles - std::floor(cycles);
    return f >= 1.0 ? 0.0 : f;
}

// e^{j 2 pi cycles} with the argument reduced modulo one first.
inline Complex cis_cycles(double cycles) {
    const double arg = kTwoPi * frac(cycles);
    return {std::cos(arg), std::sin(arg)};
}

// e^{j 2 pi c n^2} for integer n, exact reduction of c n^2 modulo one.
inline Complex chirp(double c, std::int64_t n) {
    return cis_cycles(static_cast<double>(exact_mul_mod(c, n * n, 0)));
}

}  // namespace detail
}  // namespace afdm
