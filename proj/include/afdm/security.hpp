// security.hpp - eavesdropper analysis: mismatch rotation, analytic mismatch
// bounds, measured mismatch intervals, brute-force search and complexity orders
//
// A receiver that demodulates with c2' = c2 + delta sees symbol k rotated by
// exactly e^{j2pi (f(c2,k) - f(c2',k))}. To first order in delta this is
// e^{-j2pi delta df/dc2}, so keeping the phase error below eps needs
//   |delta| <= eps / (2 pi |df/dc2|)
// for every k; the search cost along an axis is its range over that interval.

#pragma once

#include "afdm/phase_function.hpp"
#include "afdm/simulation.hpp"
#include "afdm/sweeps.hpp"
#include "afdm/types.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace afdm {

// First-order (Taylor) prediction of the symbol a mismatched receiver recovers.
inline Complex predict_mismatched_symbol(Complex x_k, const PhaseFunction& phase, double delta, std::int64_t k) {
    const double cycles = delta * df_dc2(phase, k);
    return x_k * detail::cis_cycles(-cycles);
}

struct MismatchBound {
    double delta_max = std::numeric_limits<double>::infinity();
    bool degenerate = false;  // zero derivative: the first-order bound does not constrain delta
};

namespace detail {

inline MismatchBound bound_from_derivative(double derivative, double epsilon) {
    if (std::fabs(derivative) == 0.0) return {std::numeric_limits<double>::infinity(), true};
    return {std::fabs(epsilon) / (kTwoPi * std::fabs(derivative)), false};
}

inline double derivative(const PhaseFunction& p, std::int64_t m, MismatchAxis axis) {
    return axis == MismatchAxis::C2 ? df_dc2(p, m) : df_dkappa(p, m);
}

// |sin(pi c2 m^b)| (c2 axis) or |cos(pi c2 m^b)| (kappa axis) below this counts as zero.
inline constexpr double kDegenerateTrig = 1e-9;

inline bool degenerate_point(const PhaseFunction& p, std::int64_t m, MismatchAxis axis) {
    if (m == 0 && p.a > 0.0) return true;
    if (p.kind == PhaseKind::Conventional) return m == 0;
    const double arg = cosine_argument(p, m);
    const double trig = axis == MismatchAxis::C2 ? sin_pi(arg) : cos_pi(arg);
    return std::fabs(trig) < kDegenerateTrig;
}

}  // namespace detail

inline MismatchBound mismatch_bound(const PhaseFunction& phase, std::int64_t m, double epsilon,
                                    MismatchAxis axis = MismatchAxis::C2) {
    if (detail::degenerate_point(phase, m, axis)) return {std::numeric_limits<double>::infinity(), true};
    return detail::bound_from_derivative(detail::derivative(phase, m, axis), epsilon);
}

struct SystemBound {
    double delta_max = std::numeric_limits<double>::infinity();
    std::int64_t argmin = -1;           // subcarrier that sets the bound
    std::int64_t degenerate_count = 0;  // subcarriers with zero derivative
};

// Minimum of the per-subcarrier bounds over m = 0..N-1.
inline SystemBound system_mismatch_bound(const PhaseFunction& phase, std::int64_t n_sub, double epsilon,
                                         MismatchAxis axis = MismatchAxis::C2) {
    SystemBound sb;
    for (std::int64_t m = 0; m < n_sub; ++m) {
        const MismatchBound b = mismatch_bound(phase, m, epsilon, axis);
        if (b.degenerate) {
            ++sb.degenerate_count;
            continue;
        }
        if (b.delta_max < sb.delta_max) {
            sb.delta_max = b.delta_max;
            sb.argmin = m;
        }
    }
    return sb;
}

enum class SearchAxes { C2Only, C2AndKappa };

struct ComplexityEstimate {
    double exponent = 0.0;        // search cost ~ N^exponent
    double search_count = 0.0;    // product over axes of range / interval
    double c2_interval = 0.0;
    double kappa_interval = 0.0;  // 0 when kappa is not searched
};

// Interval per axis: the measured value when supplied, otherwise the analytic
// system bound at epsilon. kappa_range is the assumed kappa search length.
inline ComplexityEstimate complexity_estimate(const PhaseFunction& phase, std::int64_t n_sub, SearchAxes axes,
                                              double epsilon = 0.1,
                                              std::optional<double> measured_c2 = std::nullopt,
                                              std::optional<double> measured_kappa = std::nullopt,
                                              double kappa_range = 1.0) {
    ComplexityEstimate est;
    if (phase.kind == PhaseKind::Conventional) {
        if (axes == SearchAxes::C2AndKappa)
            throw UnsupportedOperation("the conventional phase law has no kappa parameter");
        est.exponent = 2.0;
    } else {
        est.exponent = phase.a + phase.b + (axes == SearchAxes::C2AndKappa ? phase.a : 0.0);
    }
    constexpr double kC2Range = 1.0;  // c2 in (0, 1]
    est.c2_interval = measured_c2.value_or(system_mismatch_bound(phase, n_sub, epsilon, MismatchAxis::C2).delta_max);
    est.search_count = kC2Range / est.c2_interval;
    if (axes == SearchAxes::C2AndKappa) {
        est.kappa_interval =
            measured_kappa.value_or(system_mismatch_bound(phase, n_sub, epsilon, MismatchAxis::Kappa).delta_max);
        est.search_count *= kappa_range / est.kappa_interval;
    }
    return est;
}

enum class CrossingStatus { Found, BelowGrid, NotReached };

inline std::string to_string(CrossingStatus s) {
    switch (s) {
        case CrossingStatus::Found: return "found";
        case CrossingStatus::BelowGrid: return "below-grid";
        case CrossingStatus::NotReached: return "not-reached";
    }
    return "unknown";
}

struct Crossing {
    CrossingStatus status = CrossingStatus::NotReached;
    double delta_star = 0.0;  // grid floor (BelowGrid) or ceiling (NotReached) when not Found
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

// First upward crossing of `threshold` by the running-max envelope of the
// curve, refined by linear interpolation in log(delta)-log(BER). A zero-error
// point below the crossing is taken at half an error for the logarithm.
inline Crossing estimate_crossing(const std::vector<BerPoint>& curve, double threshold) {
    Crossing c;
    if (curve.empty()) return c;
    double envelope = 0.0;
    std::vector<double> env(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        envelope = std::max(envelope, curve[i].ber());
        env[i] = envelope;
    }
    std::size_t idx = curve.size();
    for (std::size_t i = 0; i < env.size(); ++i) {
        if (env[i] > threshold) {
            idx = i;
            break;
        }
    }
    if (idx == curve.size()) {
        c.status = CrossingStatus::NotReached;
        c.delta_star = curve.back().sweep_value;
        c.bracket_lo = curve.back().sweep_value;
        c.bracket_hi = std::numeric_limits<double>::infinity();
        return c;
    }
    if (idx == 0) {
        c.status = CrossingStatus::BelowGrid;
        c.delta_star = curve.front().sweep_value;
        c.bracket_lo = 0.0;
        c.bracket_hi = curve.front().sweep_value;
        return c;
    }
    const double d_lo = curve[idx - 1].sweep_value;
    const double d_hi = curve[idx].sweep_value;
    const double floor_lo = curve[idx - 1].bits > 0 ? 0.5 / static_cast<double>(curve[idx - 1].bits) : 1e-300;
    const double b_lo = std::max(env[idx - 1], std::min(floor_lo, threshold));
    const double b_hi = env[idx];
    const double t = (std::log(threshold) - std::log(b_lo)) / (std::log(b_hi) - std::log(b_lo));
    c.status = CrossingStatus::Found;
    c.delta_star = std::exp(std::log(d_lo) + t * (std::log(d_hi) - std::log(d_lo)));
    c.bracket_lo = d_lo;
    c.bracket_hi = d_hi;
    return c;
}

struct MismatchSweepSpec {
    std::vector<double> delta_grid;
    MismatchAxis axis = MismatchAxis::C2;
    std::optional<double> snr_db;      // overrides the scenario when set
    std::optional<std::int64_t> trials_per_point;
    double threshold = 1e-3;
    double epsilon = 0.1;
};

inline void validate(const MismatchSweepSpec& spec) {
    if (spec.delta_grid.empty()) throw ConfigError("delta grid is empty");
    for (std::size_t i = 0; i < spec.delta_grid.size(); ++i) {
        if (!(spec.delta_grid[i] > 0.0)) throw ConfigError("delta grid values must be positive");
        if (i > 0 && !(spec.delta_grid[i] > spec.delta_grid[i - 1]))
            throw ConfigError("delta grid must be strictly increasing");
    }
    if (!(spec.threshold > 0.0 && spec.threshold < 1.0)) throw ConfigError("BER threshold must lie in (0, 1)");
}

struct MismatchMeasurement {
    Crossing crossing;
    std::vector<BerPoint> curve;
};

inline MismatchMeasurement measure_mismatch_interval(SimScenario sc, const MismatchSweepSpec& spec) {
    validate(spec);
    if (spec.snr_db) sc.snr_db = *spec.snr_db;
    if (spec.trials_per_point) sc.trials = *spec.trials_per_point;
    MismatchMeasurement m;
    m.curve = run_ber_vs_mismatch(sc, spec.delta_grid, spec.axis);
    m.crossing = estimate_crossing(m.curve, spec.threshold);
    return m;
}

struct SearchAxis {
    MismatchAxis name = MismatchAxis::C2;
    std::vector<double> grid;  // strictly increasing

    bool operator==(const SearchAxis&) const = default;
};

// What the eavesdropper knows: the channel, the pilot bits, c1 and the noise
// level of each pilot frame. Only the phase parameters on `axes` are unknown.
struct EveModel {
    std::vector<SearchAxis> axes;
    double success_ber_threshold = 1e-3;
    std::int64_t pilot_frames = 1;
    // Phase family and the parameters that are not searched. Unset: the
    // transmitter's own family with its public exponents.
    std::optional<PhaseFunction> prior;
};

inline void validate(const EveModel& eve) {
    if (eve.axes.empty()) throw ConfigError("eavesdropper model needs at least one search axis");
    for (const auto& ax : eve.axes) {
        if (ax.grid.empty()) throw ConfigError("search grid is empty");
        for (std::size_t i = 0; i < ax.grid.size(); ++i) {
            if (i > 0 && !(ax.grid[i] > ax.grid[i - 1])) throw ConfigError("search grids must be strictly increasing");
            if (ax.name == MismatchAxis::C2 && !(ax.grid[i] > 0.0 && ax.grid[i] <= 1.0))
                throw ConfigError("c2 search grid must lie in (0, 1]");
        }
    }
    if (eve.pilot_frames < 1) throw ConfigError("pilot_frames must be >= 1");
}

struct SearchCandidate {
    double c2 = 0.0;
    double kappa = 0.0;
    FrameCount count;
    double ber() const { return count.bits > 0 ? static_cast<double>(count.errors) / static_cast<double>(count.bits) : 1.0; }
};

struct SearchResult {
    SearchCandidate best;
    std::int64_t evaluated = 0;
    bool success = false;
    double wall_seconds = 0.0;
    double seconds_per_candidate = 0.0;
    std::vector<SearchCandidate> candidates;  // in grid order
};

// Exhaustive search over the Cartesian product of the eavesdropper's grids.
// The pilot frames are received once; for each frame Eve demodulates with a
// zero-phase reference DAFT and factors her MMSE once. A candidate phase f'
// has Q' = Q_ref Lambda'^H, so its MMSE output is Lambda' (G_ref y_ref) and
// each candidate costs O(N) per frame.
inline SearchResult brute_force_search(const EveModel& eve, const SimScenario& sc) {
    validate(eve);
    validate(sc);
    const auto n = sc.afdm.n_sub;
    const double sigma2 = noise_variance(sc.snr_db);

    AfdmParams ref_params = sc.afdm;
    ref_params.phase = PhaseFunction::conventional(0.0);
    Modem tx(sc.afdm);
    Modem ref(ref_params);

    std::vector<Bits> pilot_bits;
    std::vector<CVector> reference_output;
    for (std::int64_t f = 0; f < eve.pilot_frames; ++f) {
        const FrameDraw fd = draw_frame(sc, f);
        const ChannelOperator h(fd.channel, sc.afdm);
        CVector r = h.apply(tx.modulate(fd.symbols));
        if (sigma2 > 0.0) r += std::sqrt(sigma2) * fd.unit_noise;
        const MmseEqualizer eq(effective_channel(h, ref, sigma2));
        reference_output.push_back(eq.equalize(ref.demodulate(r)));
        pilot_bits.push_back(fd.bits);
    }

    // Cartesian product, last axis fastest.
    std::vector<std::size_t> sizes;
    std::size_t total = 1;
    for (const auto& ax : eve.axes) {
        sizes.push_back(ax.grid.size());
        total *= ax.grid.size();
    }

    SearchResult result;
    result.candidates.reserve(total);
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::size_t> idx(eve.axes.size(), 0);
    for (std::size_t c = 0; c < total; ++c) {
        PhaseFunction cand = eve.prior.value_or(sc.afdm.phase);
        for (std::size_t a = 0; a < eve.axes.size(); ++a) {
            const double v = eve.axes[a].grid[idx[a]];
            cand = eve.axes[a].name == MismatchAxis::C2 ? cand.with_c2(v) : cand.with_kappa(v);
        }
        const CVector lambda = phase_diag(cand, n, Direction::Demodulate);
        SearchCandidate sc_out{cand.c2, cand.kappa, {}};
        for (std::size_t f = 0; f < pilot_bits.size(); ++f) {
            const Bits rx = demap_hard(lambda.cwiseProduct(reference_output[f]), sc.constellation);
            sc_out.count.bits += static_cast<std::int64_t>(rx.size());
            sc_out.count.errors += count_bit_errors(pilot_bits[f], rx);
        }
        if (result.candidates.empty() || sc_out.ber() < result.best.ber()) result.best = sc_out;
        result.candidates.push_back(sc_out);

        for (std::size_t a = eve.axes.size(); a-- > 0;) {
            if (++idx[a] < sizes[a]) break;
            idx[a] = 0;
        }
    }
    const auto t1 = std::chrono::steady_clock::now();
    result.evaluated = static_cast<std::int64_t>(total);
    result.success = result.best.ber() <= eve.success_ber_threshold;
    result.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    result.seconds_per_candidate = total > 0 ? result.wall_seconds / static_cast<double>(total) : 0.0;
    return result;
}

}  // namespace afdm
