// runner.hpp - executes an ExperimentConfig and writes its CSV files

#pragma once

#include "afdm/campaigns.hpp"
#include "afdm/config.hpp"
#include "afdm/security.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace afdm {

// Analytic mismatch bounds and complexity orders, one CSV row per curve.
inline std::string bound_report(const ExperimentConfig& cfg) {
    const auto n = cfg.scenario.afdm.n_sub;
    std::string out =
        "label,kind,N,epsilon,c2_bound,c2_argmin,c2_degenerate,exponent_c2,count_c2,kappa_bound,kappa_argmin,"
        "exponent_joint,count_joint\n";
    for (const auto& curve : cfg.effective_curves()) {
        const auto& p = curve.phase;
        const SystemBound c2b = system_mismatch_bound(p, n, cfg.epsilon, MismatchAxis::C2);
        const ComplexityEstimate c2e = complexity_estimate(p, n, SearchAxes::C2Only, cfg.epsilon);
        out += curve.label + "," + to_string(p.kind) + "," + std::to_string(n) + "," + fmt_num(cfg.epsilon) + "," +
               fmt_num(c2b.delta_max, "%.6e") + "," + std::to_string(c2b.argmin) + "," +
               std::to_string(c2b.degenerate_count) + "," + fmt_num(c2e.exponent) + "," +
               fmt_num(c2e.search_count, "%.6e") + ",";
        if (p.kind == PhaseKind::CosineFamily) {
            const SystemBound kb = system_mismatch_bound(p, n, cfg.epsilon, MismatchAxis::Kappa);
            const ComplexityEstimate je = complexity_estimate(p, n, SearchAxes::C2AndKappa, cfg.epsilon, std::nullopt,
                                                              std::nullopt, cfg.kappa_range);
            out += fmt_num(kb.delta_max, "%.6e") + "," + std::to_string(kb.argmin) + "," + fmt_num(je.exponent) + "," +
                   fmt_num(je.search_count, "%.6e") + "\n";
        } else {
            out += "n/a,n/a,n/a,n/a\n";
        }
    }
    return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& text, std::vector<std::string>& written) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    written.push_back(path.string());
}

}  // namespace detail

// Runs the configured campaign, writing CSV files under cfg.output. A short
// human-readable log goes to `log`. Returns the paths written.
inline std::vector<std::string> run_campaign(const ExperimentConfig& cfg, std::ostream& log) {
    validate(cfg);
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output);
    fs::create_directories(dir);
    std::vector<std::string> written;
    const std::string hash = config_hash(cfg);
    const SummaryLines provenance{{"config_hash", hash}, {"seed", std::to_string(cfg.scenario.master_seed)}};
    auto with_provenance = [&](SummaryLines lines) {
        lines.insert(lines.end(), provenance.begin(), provenance.end());
        return lines;
    };

    switch (cfg.campaign) {
        case Campaign::BerVsMismatch: {
            for (const auto& curve : cfg.effective_curves()) {
                SimScenario sc = cfg.scenario;
                sc.afdm.phase = curve.phase;
                MismatchSweepSpec spec;
                spec.delta_grid = cfg.deltas;
                spec.axis = cfg.axis;
                spec.threshold = cfg.threshold;
                const MismatchMeasurement m = measure_mismatch_interval(sc, spec);
                const auto bound = system_mismatch_bound(curve.phase, sc.afdm.n_sub, cfg.epsilon, cfg.axis);
                SummaryLines lines = crossing_summary(m.crossing, cfg.threshold);
                lines.push_back({"analytic_bound", fmt_num(bound.delta_max)});
                lines.push_back({"axis", to_string(cfg.axis)});
                lines.push_back({"label", curve.label});
                detail::write_file(dir / (curve.label + ".csv"), format_curve_csv("delta", m.curve, with_provenance(lines)),
                                   written);
                log << curve.label << ": delta*=" << fmt_num(m.crossing.delta_star, "%.4g") << " ("
                    << to_string(m.crossing.status) << ")\n";
            }
            break;
        }
        case Campaign::BerVsSnr: {
            for (const auto& curve : cfg.effective_curves()) {
                SimScenario sc = cfg.scenario;
                sc.afdm.phase = curve.phase;
                const auto curves = run_ber_vs_snr(sc, cfg.snr_grid, cfg.deltas, cfg.axis);
                for (std::size_t d = 0; d < cfg.deltas.size(); ++d) {
                    SummaryLines lines{{"delta", fmt_num(cfg.deltas[d])},
                                       {"axis", to_string(cfg.axis)},
                                       {"label", curve.label}};
                    detail::write_file(dir / (curve.label + "_delta_" + std::to_string(d) + ".csv"),
                                       format_curve_csv("snr_db", curves[d], with_provenance(lines)), written);
                }
                log << curve.label << ": " << cfg.deltas.size() << " SNR curves\n";
            }
            break;
        }
        case Campaign::C2Sweep: {
            const auto entries = run_c2_sweep(cfg.scenario, cfg.c2_values, cfg.scenario.afdm.phase.b, cfg.deltas,
                                              cfg.threshold);
            std::string summary = "c2,delta_star,status,bracket_lo,bracket_hi,degenerate_derivatives\n";
            for (std::size_t i = 0; i < entries.size(); ++i) {
                const auto& e = entries[i];
                SummaryLines lines = crossing_summary(e.crossing, cfg.threshold);
                lines.push_back({"c2", fmt_num(e.c2)});
                lines.push_back({"degenerate_derivatives", std::to_string(e.degenerate_derivatives)});
                detail::write_file(dir / ("c2_" + std::to_string(i) + ".csv"),
                                   format_curve_csv("delta", e.curve, with_provenance(lines)), written);
                summary += fmt_num(e.c2) + "," + fmt_num(e.crossing.delta_star) + "," + to_string(e.crossing.status) +
                           "," + fmt_num(e.crossing.bracket_lo) + "," + fmt_num(e.crossing.bracket_hi) + "," +
                           std::to_string(e.degenerate_derivatives) + "\n";
                log << "c2=" << fmt_num(e.c2) << ": delta*=" << fmt_num(e.crossing.delta_star, "%.4g") << " ("
                    << to_string(e.crossing.status) << ")\n";
            }
            for (const auto& [k, v] : provenance) summary += "# " + k + "=" + v + "\n";
            detail::write_file(dir / "summary.csv", summary, written);
            break;
        }
        case Campaign::EavesdropSearch: {
            for (const auto& curve : cfg.effective_curves()) {
                SimScenario sc = cfg.scenario;
                sc.afdm.phase = curve.phase;
                EveModel eve;
                eve.axes = cfg.search;
                eve.pilot_frames = cfg.pilot_frames;
                eve.success_ber_threshold = cfg.threshold;
                const SearchResult res = brute_force_search(eve, sc);
                std::string csv = "c2,kappa,bits,bit_errors,ber\n";
                for (const auto& c : res.candidates)
                    csv += fmt_num(c.c2, "%.17g") + "," + fmt_num(c.kappa, "%.17g") + "," + std::to_string(c.count.bits) +
                           "," + std::to_string(c.count.errors) + "," + fmt_num(c.ber(), "%.6e") + "\n";
                SummaryLines lines{{"best_c2", fmt_num(res.best.c2, "%.17g")},
                                   {"best_kappa", fmt_num(res.best.kappa, "%.17g")},
                                   {"best_ber", fmt_num(res.best.ber(), "%.6e")},
                                   {"evaluated", std::to_string(res.evaluated)},
                                   {"success", res.success ? "true" : "false"},
                                   {"threshold", fmt_num(cfg.threshold)},
                                   {"label", curve.label}};
                for (const auto& [k, v] : with_provenance(lines)) csv += "# " + k + "=" + v + "\n";
                detail::write_file(dir / (curve.label + "_search.csv"), csv, written);
                log << curve.label << ": " << res.evaluated << " candidates, best BER "
                    << fmt_num(res.best.ber(), "%.3e") << (res.success ? " (success)" : " (failure)") << ", "
                    << fmt_num(res.wall_seconds, "%.3f") << " s total, " << fmt_num(res.seconds_per_candidate, "%.3e")
                    << " s/candidate\n";
            }
            break;
        }
        case Campaign::BoundReport: {
            const std::string table = bound_report(cfg);
            detail::write_file(dir / "bounds.csv", table, written);
            log << table;
            break;
        }
    }
    return written;
}

}  // namespace afdm
