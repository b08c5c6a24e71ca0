// campaigns.hpp - figure campaigns and CSV output
//
// CSV layout: one header row, one BerPoint per row, then '#'-prefixed
// key=value summary lines.

#pragma once

#include "afdm/security.hpp"
#include "afdm/simulation.hpp"
#include "afdm/sweeps.hpp"

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace afdm {

struct C2SweepEntry {
    double c2 = 0.0;
    std::vector<BerPoint> curve;
    Crossing crossing;
    // Subcarriers (m = 0 included) where sin(pi c2 m^b) vanishes.
    std::int64_t degenerate_derivatives = 0;
};

// Mismatch interval against c2 for the scenario's phase family with exponent b.
inline std::vector<C2SweepEntry> run_c2_sweep(const SimScenario& sc, const std::vector<double>& c2_values, double b,
                                              const std::vector<double>& delta_grid, double threshold = 1e-3) {
    std::vector<C2SweepEntry> out;
    for (double c2 : c2_values) {
        SimScenario local = sc;
        local.afdm.phase = local.afdm.phase.with_c2(c2);
        local.afdm.phase.b = b;
        C2SweepEntry e;
        e.c2 = c2;
        MismatchSweepSpec spec;
        spec.delta_grid = delta_grid;
        spec.threshold = threshold;
        const MismatchMeasurement m = measure_mismatch_interval(local, spec);
        e.curve = m.curve;
        e.crossing = m.crossing;
        e.degenerate_derivatives = system_mismatch_bound(local.afdm.phase, local.afdm.n_sub, 0.1).degenerate_count;
        out.push_back(std::move(e));
    }
    return out;
}

// printf-style formatting for CSV cells ("%.10g" by default).
inline std::string fmt_num(double v, const char* spec = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

using SummaryLines = std::vector<std::pair<std::string, std::string>>;

inline std::string format_curve_csv(const std::string& column, const std::vector<BerPoint>& curve,
                                    const SummaryLines& summary) {
    std::string out = column + ",trials,bits,bit_errors,ber,ci95\n";
    for (const auto& p : curve) {
        out += fmt_num(p.sweep_value) + "," + std::to_string(p.trials) + "," + std::to_string(p.bits) + "," +
               std::to_string(p.errors) + "," + fmt_num(p.ber(), "%.6e") + "," + fmt_num(p.ci95(), "%.6e") + "\n";
    }
    for (const auto& [k, v] : summary) out += "# " + k + "=" + v + "\n";
    return out;
}

inline SummaryLines crossing_summary(const Crossing& c, double threshold) {
    return {{"delta_star", fmt_num(c.delta_star)},
            {"status", to_string(c.status)},
            {"threshold", fmt_num(threshold)},
            {"bracket", fmt_num(c.bracket_lo) + "," + fmt_num(c.bracket_hi)}};
}

}  // namespace afdm
