// sweeps.hpp - BER versus mismatch and BER versus SNR sweeps
//
// Mismatch sweeps reuse one legitimate MMSE solve per trial for the whole
// delta grid. An eavesdropper demodulating with candidate phase f' sees
//   y' = D y,  H_eff' = D H_eff D^H,  D = diag(e^{j2pi (f(k) - f'(k))}),
// so her MMSE output is D G D^H y' = D (G y): the legitimate equalized vector
// rotated per subcarrier. run_frame() computes the same thing the long way.

#pragma once

#include "afdm/simulation.hpp"

#include <cmath>
#include <vector>

namespace afdm {

// Log-spaced grid from `from` to `to` inclusive with `per_decade` points per decade.
inline std::vector<double> log_grid(double from, double to, int per_decade) {
    if (!(from > 0.0) || !(to >= from) || per_decade < 1) throw ConfigError("invalid log grid");
    std::vector<double> g;
    const double lo = std::log10(from);
    const double hi = std::log10(to);
    const auto steps = static_cast<int>(std::llround((hi - lo) * per_decade));
    for (int i = 0; i <= steps; ++i) g.push_back(std::pow(10.0, lo + (hi - lo) * (steps == 0 ? 0.0 : double(i) / steps)));
    return g;
}

namespace detail {

struct SweepWorker {
    Modem modem;
};

inline void accumulate(const Bits& tx, const CVector& equalized, const CVector& rotation,
                       const ConstellationSpec& cs, FrameCount& count) {
    const Bits rx = demap_hard(rotation.cwiseProduct(equalized), cs);
    count.bits += static_cast<std::int64_t>(tx.size());
    count.errors += count_bit_errors(tx, rx);
}

}  // namespace detail

inline std::vector<BerPoint> run_ber_vs_mismatch(const SimScenario& sc, const std::vector<double>& delta_grid,
                                                 MismatchAxis axis = MismatchAxis::C2) {
    validate(sc);
    const auto n = sc.afdm.n_sub;
    std::vector<CVector> rotations;
    rotations.reserve(delta_grid.size());
    for (double d : delta_grid)
        rotations.push_back(mismatch_rotation(sc.afdm.phase, apply_mismatch(sc.afdm.phase, axis, d), n));

    const std::vector<double> snr{sc.snr_db};
    auto points = monte_carlo<detail::SweepWorker>(
        sc, delta_grid.size(), [&] { return detail::SweepWorker{Modem(sc.afdm)}; },
        [&](std::int64_t trial, detail::SweepWorker& w, std::vector<FrameCount>& counts, const std::vector<char>& active) {
            const LegitOutcome out = run_legit(sc, w.modem, snr, trial);
            for (std::size_t i = 0; i < delta_grid.size(); ++i)
                if (active[i]) detail::accumulate(out.bits, out.equalized[0], rotations[i], sc.constellation, counts[i]);
        });
    for (std::size_t i = 0; i < points.size(); ++i) points[i].sweep_value = delta_grid[i];
    return points;
}

// Result[d][s]: BER at deltas[d] and snr_grid[s].
inline std::vector<std::vector<BerPoint>> run_ber_vs_snr(const SimScenario& sc, const std::vector<double>& snr_grid,
                                                         const std::vector<double>& deltas,
                                                         MismatchAxis axis = MismatchAxis::C2) {
    validate(sc);
    const auto n = sc.afdm.n_sub;
    std::vector<CVector> rotations;
    for (double d : deltas)
        rotations.push_back(mismatch_rotation(sc.afdm.phase, apply_mismatch(sc.afdm.phase, axis, d), n));

    const std::size_t ns = snr_grid.size();
    auto flat = monte_carlo<detail::SweepWorker>(
        sc, deltas.size() * ns, [&] { return detail::SweepWorker{Modem(sc.afdm)}; },
        [&](std::int64_t trial, detail::SweepWorker& w, std::vector<FrameCount>& counts, const std::vector<char>& active) {
            const LegitOutcome out = run_legit(sc, w.modem, snr_grid, trial);
            for (std::size_t d = 0; d < deltas.size(); ++d)
                for (std::size_t s = 0; s < ns; ++s)
                    if (active[d * ns + s])
                        detail::accumulate(out.bits, out.equalized[s], rotations[d], sc.constellation,
                                           counts[d * ns + s]);
        });
    std::vector<std::vector<BerPoint>> result(deltas.size());
    for (std::size_t d = 0; d < deltas.size(); ++d) {
        for (std::size_t s = 0; s < ns; ++s) {
            BerPoint p = flat[d * ns + s];
            p.sweep_value = snr_grid[s];
            result[d].push_back(p);
        }
    }
    return result;
}

}  // namespace afdm
