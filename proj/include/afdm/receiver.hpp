// receiver.hpp - affine-domain effective channel and MMSE equalization

#pragma once

#include "afdm/channel.hpp"
#include "afdm/modem.hpp"
#include "afdm/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <optional>

namespace afdm {

struct EffectiveChannel {
    CMatrix h_eff;
    double sigma2 = 0.0;
};

// H_eff = Q^H H Q.
inline EffectiveChannel effective_channel(const CMatrix& h, Modem& modem, double sigma2 = 0.0) {
    return {modem.conjugate_by_q(h), sigma2};
}

inline EffectiveChannel effective_channel(const CMatrix& h, const AfdmParams& params, double sigma2 = 0.0) {
    if (h.rows() != params.n_sub || h.cols() != params.n_sub) throw ShapeError("channel matrix must be N x N");
    const CMatrix q = build_modulation_matrix(params);
    return {q.adjoint() * h * q, sigma2};
}

// Same as above but exploits the P-sparse structure of H.
inline EffectiveChannel effective_channel(const ChannelOperator& h, Modem& modem, double sigma2 = 0.0) {
    const std::int64_t n = modem.size();
    const CMatrix hq = h.left_multiply(modem.modulation_matrix());
    CMatrix out(n, n);
    for (std::int64_t i = 0; i < n; ++i) out.col(i) = modem.demodulate(hq.col(i));
    return {std::move(out), sigma2};
}

// G = (H^H H + sigma2 I)^{-1} H^H, applied by solving; the factorization is
// built once and reused for every right-hand side.
class MmseEqualizer {
public:
    explicit MmseEqualizer(EffectiveChannel eff) : eff_(std::move(eff)) {
        if (eff_.h_eff.rows() != eff_.h_eff.cols()) throw ShapeError("effective channel must be square");
        if (!(eff_.sigma2 >= 0.0)) throw ConfigError("noise variance must be non-negative");
        const auto n = eff_.h_eff.rows();
        if (eff_.sigma2 > 0.0) {
            CMatrix gram = CMatrix::Identity(n, n) * eff_.sigma2;
            gram.selfadjointView<Eigen::Lower>().rankUpdate(eff_.h_eff.adjoint());
            llt_.emplace(gram);
            if (llt_->info() != Eigen::Success) throw RankError("regularized Gram matrix is not positive definite");
        } else {
            qr_.emplace(eff_.h_eff);
            if (qr_->rank() < n) throw RankError("effective channel is singular and noise variance is zero");
        }
    }

    const EffectiveChannel& channel() const { return eff_; }

    CVector equalize(const CVector& y) const {
        if (y.size() != eff_.h_eff.rows()) throw ShapeError("received vector length mismatch");
        if (llt_) return llt_->solve(eff_.h_eff.adjoint() * y);
        return qr_->solve(y);
    }

private:
    EffectiveChannel eff_;
    std::optional<Eigen::LLT<CMatrix>> llt_;
    std::optional<Eigen::ColPivHouseholderQR<CMatrix>> qr_;
};

inline CVector mmse_equalize(const CVector& y, const EffectiveChannel& eff) { return MmseEqualizer(eff).equalize(y); }

// Reference implementation with an explicit inverse, for cross-checking.
inline CVector mmse_equalize_explicit(const CVector& y, const EffectiveChannel& eff) {
    const auto n = eff.h_eff.rows();
    const CMatrix g =
        (eff.h_eff.adjoint() * eff.h_eff + eff.sigma2 * CMatrix::Identity(n, n)).inverse() * eff.h_eff.adjoint();
    return g * y;
}

}  // namespace afdm
