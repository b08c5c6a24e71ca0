// acceptance - runs every acceptance criterion at desk scale (10^4 frames per
// point) and prints one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "afdm/afdm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace afdm;

namespace {

int g_failed = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << name << " | " << detail << std::endl;
    if (!pass) ++g_failed;
}

ExperimentConfig load(const char* name) { return load_config(std::string(AFDM_CONFIG_DIR) + "/" + name); }

const CurveSpec& curve(const ExperimentConfig& cfg, const std::string& label) {
    for (const auto& c : cfg.curves)
        if (c.label == label) return c;
    throw std::runtime_error("config has no curve '" + label + "'");
}

std::string num(double v) { return fmt_num(v, "%.3g"); }

std::size_t index_of(const std::vector<double>& v, double x) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == x) return i;
    throw std::runtime_error("grid value missing: " + num(x));
}

Crossing crossing_for(const ExperimentConfig& cfg, const PhaseFunction& phase, std::int64_t n_sub) {
    SimScenario sc = cfg.scenario;
    if (n_sub != sc.afdm.n_sub) {
        sc.afdm.n_sub = n_sub;
        sc.afdm.c1 = default_c1(sc.channel.nu_max, n_sub);
    }
    sc.afdm.phase = phase;
    MismatchSweepSpec spec;
    spec.delta_grid = cfg.deltas;
    spec.threshold = cfg.threshold;
    return measure_mismatch_interval(sc, spec).crossing;
}

// Criteria 1 and 4 share the SNR campaign.
void snr_criteria() {
    const ExperimentConfig cfg = load("fig2.cfg");
    SimScenario conv_sc = cfg.scenario;
    conv_sc.afdm.phase = curve(cfg, "conventional").phase;
    SimScenario b10_sc = cfg.scenario;
    b10_sc.afdm.phase = curve(cfg, "cosine_b10").phase;
    const auto conv = run_ber_vs_snr(conv_sc, cfg.snr_grid, cfg.deltas);
    const auto b10 = run_ber_vs_snr(b10_sc, cfg.snr_grid, cfg.deltas);
    const std::size_t matched = index_of(cfg.deltas, 0.0);
    const std::size_t mism = index_of(cfg.deltas, 1e-5);

    bool ok1 = true;
    std::string d1;
    for (double snr : {10.0, 15.0, 20.0, 25.0}) {
        const std::size_t s = index_of(cfg.snr_grid, snr);
        const BerPoint& a = conv[matched][s];
        const BerPoint& b = b10[matched][s];
        ok1 = ok1 && ber_agree(a, b, 3.0);
        d1 += num(snr) + "dB " + num(a.ber()) + " vs " + num(b.ber()) + "; ";
    }
    report(1, "matched conventional and b=10 BER agree within 3 sigma", ok1, d1);

    bool ok4 = true;
    std::string d4 = "b=10 at delta=1e-5:";
    for (std::size_t s = 0; s < cfg.snr_grid.size(); ++s) {
        ok4 = ok4 && b10[mism][s].ber() >= 0.1;
        d4 += " " + num(b10[mism][s].ber());
    }
    d4 += "; conventional delta=1e-5 vs 0:";
    for (std::size_t s = 0; s < cfg.snr_grid.size(); ++s) {
        const bool agree = ber_agree(conv[mism][s], conv[matched][s], 3.0);
        ok4 = ok4 && agree;
        d4 += " " + num(conv[mism][s].ber()) + "/" + num(conv[matched][s].ber()) + (agree ? "" : "!");
    }
    report(4, "b=10 stays >= 0.1 at delta=1e-5; conventional unaffected", ok4, d4);
}

// Criteria 2, 3 and 6.
void mismatch_criteria() {
    const ExperimentConfig cfg = load("fig1.cfg");
    const Crossing conv = crossing_for(cfg, curve(cfg, "conventional").phase, 64);
    report(2, "conventional delta* in [2e-5, 8e-5]",
           conv.status == CrossingStatus::Found && conv.delta_star >= 2e-5 && conv.delta_star <= 8e-5,
           "delta*=" + num(conv.delta_star) + " (" + to_string(conv.status) + ")");

    const PhaseFunction b1 = curve(cfg, "cosine_b1").phase;
    const Crossing c_b1 = crossing_for(cfg, b1, 64);
    report(3, "b=1 delta* in [8.5e-8, 3.4e-7]",
           c_b1.status == CrossingStatus::Found && c_b1.delta_star >= 8.5e-8 && c_b1.delta_star <= 3.4e-7,
           "delta*=" + num(c_b1.delta_star) + " (" + to_string(c_b1.status) + ")");

    const Crossing c_b10 = crossing_for(cfg, curve(cfg, "cosine_b10").phase, 64);
    std::cout << "       info: b=10 delta* " << to_string(c_b10.status) << " at grid edge " << num(c_b10.delta_star)
              << std::endl;

    bool ok6 = true;
    std::string d6;
    for (double b : {0.0, 1.0}) {
        PhaseFunction p = b1;
        p.b = b;
        const Crossing c64 = b == 1.0 ? c_b1 : crossing_for(cfg, p, 64);
        const Crossing c32 = crossing_for(cfg, p, 32);
        const double ratio = c32.delta_star / c64.delta_star;
        const double centre = std::pow(2.0, 2.0 + b);
        const bool found = c32.status == CrossingStatus::Found && c64.status == CrossingStatus::Found;
        ok6 = ok6 && found && ratio >= centre / 4.0 && ratio <= 4.0 * centre;
        d6 += "b=" + num(b) + " ratio " + num(ratio) + " in [" + num(centre / 4) + ", " + num(4 * centre) + "]; ";
    }
    report(6, "delta*(N=32)/delta*(N=64) follows 2^(2+b)", ok6, d6);
}

void c2_criterion() {
    const ExperimentConfig cfg = load("fig3.cfg");
    const auto entries = run_c2_sweep(cfg.scenario, cfg.c2_values, cfg.scenario.afdm.phase.b, cfg.deltas, cfg.threshold);
    std::vector<double> others;
    double at_one = 0.0;
    bool found = true;
    std::string d;
    for (const auto& e : entries) {
        found = found && e.crossing.status == CrossingStatus::Found;
        d += "c2=" + num(e.c2) + ":" + num(e.crossing.delta_star) + " ";
        if (e.c2 == 1.0) at_one = e.crossing.delta_star;
        else others.push_back(e.crossing.delta_star);
    }
    std::sort(others.begin(), others.end());
    const double spread = others.back() / others.front();
    const double median = others.size() % 2 ? others[others.size() / 2]
                                            : 0.5 * (others[others.size() / 2 - 1] + others[others.size() / 2]);
    const bool ok = found && others.size() == 4 && spread <= 2.0 && at_one >= 10.0 * median;
    report(5, "c2 in {0.2..0.8} within 2x; c2=1 >= 10x median", ok,
           d + "| spread " + num(spread) + ", c2=1 / median " + num(at_one / median));
}

// Criterion 7: property suite at reduced size.
void property_criterion() {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g(0.0, 1.0);
    auto rand_vec = [&](std::int64_t n) {
        CVector v(n);
        for (auto& x : v) x = Complex(g(rng), g(rng));
        return v;
    };
    const std::vector<PhaseFunction> phases{PhaseFunction::conventional(0.2), PhaseFunction::cosine(0.2, 1.0),
                                            PhaseFunction::cosine(0.2, 10.0)};
    double unitarity = 0, roundtrip = 0, rotation = 0, taylor = 0, deriv = 0, oracle = 0, pipeline = 0;

    for (const auto& phase : phases) {
        SimScenario sc = make_scenario(64, phase);
        Modem modem(sc.afdm);
        const CMatrix q = build_modulation_matrix(sc.afdm);
        unitarity = std::max(unitarity, (q.adjoint() * q - CMatrix::Identity(64, 64)).cwiseAbs().maxCoeff());
        for (int t = 0; t < 20; ++t) {
            const CVector x = rand_vec(64);
            const CVector s = modem.modulate(x);
            roundtrip = std::max(roundtrip, (modem.demodulate(s) - x).cwiseAbs().maxCoeff());

            const double delta = std::pow(10.0, -9.0 + 6.0 * (t / 20.0));
            const PhaseFunction cand = phase.with_c2(phase.c2 + delta);
            const CVector y = Modem(sc.afdm.with_phase(cand)).demodulate(s);
            for (int k = 0; k < 64; ++k) {
                const double expect = kTwoPi * (f_eval_mod1(phase, k) - f_eval_mod1(cand, k));
                rotation = std::max(rotation, std::fabs(std::remainder(std::arg(y[k] / x[k]) - expect, kTwoPi)));
            }

            const auto real = draw_realization(sc.channel, rng);
            const ChannelOperator op(real, sc.afdm);
            const CVector direct = modem.remove_cpp(propagate_time_domain(real, modem.add_cpp(s), sc.afdm));
            oracle = std::max(oracle, (op.apply(s) - direct).cwiseAbs().maxCoeff());
            // Same check with a c1 whose prefix factors are not all one.
            AfdmParams g1 = sc.afdm;
            g1.c1 = 0.1234;
            Modem gm(g1);
            const CVector gd = gm.remove_cpp(propagate_time_domain(real, gm.add_cpp(s), g1));
            oracle = std::max(oracle, (ChannelOperator(real, g1).apply(s) - gd).cwiseAbs().maxCoeff());
            const CMatrix he = effective_channel(op, modem).h_eff;
            pipeline = std::max(pipeline, (modem.demodulate(direct) - he * x).cwiseAbs().maxCoeff());
        }
        // Away from zeros of df/dc2, where the second-order term is not small.
        for (std::int64_t k = 1; k < 64; ++k) {
            if (phase.kind == PhaseKind::CosineFamily &&
                std::fabs(detail::sin_pi(detail::cosine_argument(phase, k))) < 0.1)
                continue;
            const double d = df_dc2(phase, k);
            const PhaseFunction cand = phase.with_c2(phase.c2 + 1e-3 / (kTwoPi * std::fabs(d)));
            const Complex pred = predict_mismatched_symbol(1.0, phase, cand.c2 - phase.c2, k);
            const Complex exact = mismatch_rotation(phase, cand, 64)[k];
            taylor = std::max(taylor, std::fabs(std::arg(pred / exact)));
        }
    }
    // Finite differences on kappa (exact: f is linear in kappa) and on c2 for small b.
    for (double b : {0.0, 1.0, 2.0}) {
        const PhaseFunction p = PhaseFunction::cosine(0.37, b);
        for (std::int64_t m = 1; m < 64; m += 7) {
            const double h = 1e-7;
            const double fd = static_cast<double>(f_eval(p.with_c2(p.c2 + h), m) - f_eval(p.with_c2(p.c2 - h), m)) / (2 * h);
            const double an = df_dc2(p, m);
            if (std::fabs(an) > 1e-3) deriv = std::max(deriv, std::fabs(fd / an - 1.0));
            const double fk = static_cast<double>(f_eval(p.with_kappa(p.kappa + 1e-4), m) -
                                                  f_eval(p.with_kappa(p.kappa - 1e-4), m)) / 2e-4;
            const double ak = df_dkappa(p, m);
            if (std::fabs(ak) > 1e-3) deriv = std::max(deriv, std::fabs(fk / ak - 1.0));
        }
    }

    // Byte-identical CSV under a fixed seed.
    namespace fs = std::filesystem;
    ExperimentConfig cfg = load("fig1.cfg");
    cfg.scenario.trials = 200;
    const fs::path base = fs::temp_directory_path() / "afdm_acceptance_csv";
    fs::remove_all(base);
    std::vector<std::string> texts;
    std::ostringstream log;
    for (const char* dir : {"a", "b"}) {
        cfg.output = (base / dir).string();
        std::string all;
        for (const auto& path : run_campaign(cfg, log)) {
            std::ifstream in(path, std::ios::binary);
            all += std::string((std::istreambuf_iterator<char>(in)), {});
        }
        texts.push_back(all);
    }
    fs::remove_all(base);
    const bool csv_same = !texts[0].empty() && texts[0] == texts[1];

    const bool ok = unitarity <= 1e-10 && roundtrip <= 1e-10 && rotation <= 1e-8 && taylor <= 1e-5 && deriv <= 1e-5 &&
                    oracle <= 1e-9 && pipeline <= 1e-9 && csv_same;
    report(7, "property suite", ok,
           "unitarity " + num(unitarity) + ", round trip " + num(roundtrip) + ", rotation " + num(rotation) +
               ", taylor " + num(taylor) + ", derivative " + num(deriv) + ", channel oracle " + num(oracle) +
               ", pipeline " + num(pipeline) + ", csv " + (csv_same ? "identical" : "DIFFERENT"));
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    auto guarded = [](const char* what, void (*fn)()) {
        try {
            fn();
        } catch (const std::exception& e) {
            std::cout << "[FAIL] " << what << " raised: " << e.what() << std::endl;
            ++g_failed;
        }
    };
    guarded("criteria 1, 4", snr_criteria);
    guarded("criteria 2, 3, 6", mismatch_criteria);
    guarded("criterion 5", c2_criterion);
    guarded("criterion 7", property_criterion);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (g_failed == 0 ? "all acceptance criteria passed" : std::to_string(g_failed) + " criteria failed")
              << " in " << fmt_num(secs, "%.1f") << " s" << std::endl;
    return g_failed;
}
