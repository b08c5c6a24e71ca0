// modem.hpp - AFDM modulation (IDAFT), demodulation (DAFT) and chirp-periodic prefix
//
//   s = Q x,   Q = Lambda_c1^H F^H Lambda_f^H
//   y = Q^H r = Lambda_f F Lambda_c1 r
//
// where Lambda_c1 = diag(e^{-j2pi c1 n^2}) and Lambda_f = diag(e^{-j2pi f(c2, m)}).
// The fast path is diagonal -> unitary FFT -> diagonal; the explicit matrix is
// kept for verification at small N.

#pragma once

#include "afdm/phase_function.hpp"
#include "afdm/types.hpp"

#include <unsupported/Eigen/FFT>

#include <cstdint>
#include <optional>
#include <string>

namespace afdm {

struct AfdmParams {
    std::int64_t n_sub = 64;
    double c1 = 0.0;
    PhaseFunction phase{};
    std::int64_t cpp_len = 0;

    AfdmParams with_phase(const PhaseFunction& p) const {
        AfdmParams out = *this;
        out.phase = p;
        return out;
    }

    bool operator==(const AfdmParams&) const = default;
};

// c1 = (2 nu_max + 1) / (2N), the full-diversity choice for a maximum Doppler nu_max.
inline double default_c1(double nu_max, std::int64_t n_sub) {
    return (2.0 * nu_max + 1.0) / (2.0 * static_cast<double>(n_sub));
}

// Range checks only; the phase function is validated separately so that
// mismatched candidate phases (c2 outside (0, 1]) can still be demodulated.
inline void validate(const AfdmParams& params) {
    if (params.n_sub < 1) throw ConfigError("N must be >= 1");
    if (params.cpp_len < 0 || params.cpp_len > params.n_sub)
        throw ConfigError("CPP length must lie in [0, N], got " + std::to_string(params.cpp_len));
    if (!std::isfinite(params.c1)) throw ConfigError("c1 must be finite");
}

enum class DftDirection { Forward, Inverse };

// Unitary DFT: forward entries e^{-j2pi pq/N}/sqrt(N), inverse is its adjoint.
inline CVector unitary_dft(const CVector& v, DftDirection dir, Eigen::FFT<double>& fft) {
    if (v.size() < 1) throw ShapeError("DFT input must be non-empty");
    if (v.size() == 1) return v;  // kissfft does not handle length one
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    CVector out(v.size());
    if (dir == DftDirection::Forward)
        fft.fwd(out, v);
    else
        fft.inv(out, v);
    out /= std::sqrt(static_cast<double>(v.size()));
    return out;
}

inline CVector unitary_dft(const CVector& v, DftDirection dir) {
    Eigen::FFT<double> fft;
    return unitary_dft(v, dir, fft);
}

inline CMatrix unitary_dft_matrix(std::int64_t n) {
    CMatrix f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::int64_t p = 0; p < n; ++p)
        for (std::int64_t q = 0; q < n; ++q)
            f(p, q) = scale * detail::cis_cycles(-static_cast<double>((p * q) % n) / static_cast<double>(n));
    return f;
}

// Diagonal of Lambda_c1 (demodulate) or Lambda_c1^H (modulate).
inline CVector c1_diag(double c1, std::int64_t n_sub, Direction dir) {
    CVector d(n_sub);
    const double sign = dir == Direction::Modulate ? 1.0 : -1.0;
    for (std::int64_t n = 0; n < n_sub; ++n)
        d[n] = detail::cis_cycles(sign * static_cast<double>(detail::exact_mul_mod(c1, n * n, 0)));
    return d;
}

inline CMatrix build_modulation_matrix(const AfdmParams& params) {
    validate(params);
    const CVector l1 = c1_diag(params.c1, params.n_sub, Direction::Modulate);
    const CVector lf = phase_diag(params.phase, params.n_sub, Direction::Modulate);
    return l1.asDiagonal() * unitary_dft_matrix(params.n_sub).adjoint() * lf.asDiagonal();
}

// Holds the precomputed chirp diagonals and an FFT plan. Not thread-safe
// (the FFT plan cache mutates); give each worker its own instance.
class Modem {
public:
    explicit Modem(const AfdmParams& params)
        : params_(params),
          c1_mod_(c1_diag(params.c1, params.n_sub, Direction::Modulate)),
          phase_mod_(phase_diag(params.phase, params.n_sub, Direction::Modulate)) {
        validate(params_);
    }

    const AfdmParams& params() const { return params_; }
    std::int64_t size() const { return params_.n_sub; }

    CVector modulate(const CVector& x) {
        check_length(x, "modulate");
        CVector t = phase_mod_.cwiseProduct(x);
        t = unitary_dft(t, DftDirection::Inverse, fft_);
        return c1_mod_.cwiseProduct(t);
    }

    CVector demodulate(const CVector& r) {
        check_length(r, "demodulate");
        CVector t = c1_mod_.conjugate().cwiseProduct(r);
        t = unitary_dft(t, DftDirection::Forward, fft_);
        return phase_mod_.conjugate().cwiseProduct(t);
    }

    // Q, built once from the fast path.
    const CMatrix& modulation_matrix() {
        if (!q_) {
            q_.emplace(size(), size());
            for (Eigen::Index i = 0; i < size(); ++i) {
                CVector e = CVector::Zero(size());
                e[i] = 1.0;
                q_->col(i) = modulate(e);
            }
        }
        return *q_;
    }

    // Q^H M Q; the left factor is applied with the fast DAFT per column.
    CMatrix conjugate_by_q(const CMatrix& m) {
        if (m.rows() != size() || m.cols() != size()) throw ShapeError("expected an N x N matrix");
        const CMatrix mq = m * modulation_matrix();
        CMatrix out(size(), size());
        for (Eigen::Index i = 0; i < size(); ++i) out.col(i) = demodulate(mq.col(i));
        return out;
    }

    CVector add_cpp(const CVector& s) const {
        check_length(s, "add_cpp");
        const std::int64_t n = size();
        const std::int64_t l = params_.cpp_len;
        CVector out(n + l);
        for (std::int64_t k = -l; k < 0; ++k) {
            // s[k] = s[N + k] e^{-j2pi c1 (N^2 + 2Nk)}
            const std::int64_t count = n * n + 2 * n * k;
            const double cyc = static_cast<double>(detail::exact_mul_mod(params_.c1, count, 0));
            out[k + l] = s[n + k] * detail::cis_cycles(-cyc);
        }
        out.tail(n) = s;
        return out;
    }

    CVector remove_cpp(const CVector& r_ext) const {
        if (r_ext.size() != size() + params_.cpp_len)
            throw ShapeError("remove_cpp expects " + std::to_string(size() + params_.cpp_len) + " samples, got " +
                             std::to_string(r_ext.size()));
        return r_ext.tail(size());
    }

private:
    void check_length(const CVector& v, const char* what) const {
        if (v.size() != size())
            throw ShapeError(std::string(what) + " expects " + std::to_string(size()) + " samples, got " +
                             std::to_string(v.size()));
    }

    AfdmParams params_;
    CVector c1_mod_;
    CVector phase_mod_;
    std::optional<CMatrix> q_;
    Eigen::FFT<double> fft_;
};

inline CVector modulate(const CVector& x, const AfdmParams& params) { return Modem(params).modulate(x); }
inline CVector demodulate(const CVector& r, const AfdmParams& params) { return Modem(params).demodulate(r); }
inline CVector add_cpp(const CVector& s, const AfdmParams& params) { return Modem(params).add_cpp(s); }
inline CVector remove_cpp(const CVector& r_ext, const AfdmParams& params) { return Modem(params).remove_cpp(r_ext); }

}  // namespace afdm
