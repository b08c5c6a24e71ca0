// config.hpp - experiment configuration (JSON) for the afdm_sim tool
//
// Every object rejects keys it does not know. Serialization writes the
// canonical form (grids expanded to explicit lists), and load -> save -> load
// reproduces the same ExperimentConfig.

#pragma once

#include "afdm/campaigns.hpp"
#include "afdm/security.hpp"
#include "afdm/simulation.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace afdm {

enum class Campaign { BerVsMismatch, BerVsSnr, C2Sweep, EavesdropSearch, BoundReport };

inline std::string to_string(Campaign c) {
    switch (c) {
        case Campaign::BerVsMismatch: return "ber-vs-mismatch";
        case Campaign::BerVsSnr: return "ber-vs-snr";
        case Campaign::C2Sweep: return "c2-sweep";
        case Campaign::EavesdropSearch: return "eavesdrop-search";
        case Campaign::BoundReport: return "bound-report";
    }
    return "unknown";
}

struct CurveSpec {
    std::string label;
    PhaseFunction phase;
    bool operator==(const CurveSpec&) const = default;
};

struct ExperimentConfig {
    Campaign campaign = Campaign::BerVsMismatch;
    SimScenario scenario{};
    // Explicit overrides; unset means derived from the channel profile.
    std::optional<double> c1;
    std::optional<std::int64_t> cpp_len;
    std::vector<CurveSpec> curves;  // empty: a single curve "main" with the scenario phase

    MismatchAxis axis = MismatchAxis::C2;
    std::vector<double> deltas;
    double threshold = 1e-3;
    std::vector<double> snr_grid;
    std::vector<double> c2_values;
    std::vector<SearchAxis> search;
    std::int64_t pilot_frames = 4;
    double epsilon = 0.1;
    double kappa_range = 1.0;

    std::string output = "results";

    std::vector<CurveSpec> effective_curves() const {
        if (!curves.empty()) return curves;
        return {{"main", scenario.afdm.phase}};
    }

    bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
T get_required(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + std::string(key) + "' in " + where + ": " + e.what());
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    return obj.contains(key) ? get_required<T>(obj, key, where) : fallback;
}

inline PhaseFunction phase_from_json(const json& j, const std::string& where) {
    check_keys(j, {"kind", "c2", "kappa", "a", "b"}, where);
    const auto kind_name = get_required<std::string>(j, "kind", where);
    const auto kind = parse_phase_kind(kind_name);
    if (!kind) throw ConfigError("unknown phase kind '" + kind_name + "' in " + where);
    PhaseFunction p;
    p.kind = *kind;
    p.c2 = get_required<double>(j, "c2", where);
    p.kappa = get_or<double>(j, "kappa", p.kappa, where);
    p.a = get_or<double>(j, "a", p.a, where);
    p.b = get_or<double>(j, "b", p.b, where);
    return p;
}

inline json phase_to_json(const PhaseFunction& p) {
    return json{{"kind", to_string(p.kind)}, {"c2", p.c2}, {"kappa", p.kappa}, {"a", p.a}, {"b", p.b}};
}

inline ChannelProfile channel_from_json(const json& j, const std::string& where) {
    check_keys(j, {"powers", "delays", "dopplers", "nu_max", "model"}, where);
    ChannelProfile prof;
    prof.powers = get_required<std::vector<double>>(j, "powers", where);
    prof.delays = get_required<std::vector<std::int64_t>>(j, "delays", where);
    prof.dopplers = get_required<std::vector<double>>(j, "dopplers", where);
    prof.nu_max = get_required<double>(j, "nu_max", where);
    const auto model = get_or<std::string>(j, "model", "fixed-magnitude", where);
    if (model == "fixed-magnitude")
        prof.model = CoefficientModel::FixedMagnitudeRandomPhase;
    else if (model == "complex-gaussian")
        prof.model = CoefficientModel::ComplexGaussian;
    else
        throw ConfigError("unknown channel model '" + model + "'");
    return prof;
}

inline json channel_to_json(const ChannelProfile& p) {
    return json{{"powers", p.powers},
                {"delays", p.delays},
                {"dopplers", p.dopplers},
                {"nu_max", p.nu_max},
                {"model", to_string(p.model)}};
}

// Either an explicit list or {"from", "to", "per_decade"}.
inline std::vector<double> grid_from_json(const json& j, const std::string& where) {
    if (j.is_array()) {
        try {
            return j.get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    check_keys(j, {"from", "to", "per_decade"}, where);
    return log_grid(get_required<double>(j, "from", where), get_required<double>(j, "to", where),
                    get_required<int>(j, "per_decade", where));
}

inline MismatchAxis axis_from_string(const std::string& s) {
    if (s == "c2") return MismatchAxis::C2;
    if (s == "kappa") return MismatchAxis::Kappa;
    throw ConfigError("unknown mismatch axis '" + s + "'");
}

inline Campaign campaign_from_string(const std::string& s) {
    for (auto c : {Campaign::BerVsMismatch, Campaign::BerVsSnr, Campaign::C2Sweep, Campaign::EavesdropSearch,
                   Campaign::BoundReport})
        if (to_string(c) == s) return c;
    throw ConfigError("unknown campaign '" + s + "'");
}

inline std::vector<double> linear_grid(double from, double to, std::int64_t points) {
    if (points < 1) throw ConfigError("search grid needs at least one point");
    std::vector<double> g;
    for (std::int64_t i = 0; i < points; ++i)
        g.push_back(points == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(points - 1));
    return g;
}

}  // namespace detail

// Checks everything the campaign will rely on; throws ConfigError.
inline void validate(const ExperimentConfig& cfg) {
    validate(cfg.scenario);
    for (const auto& c : cfg.effective_curves()) {
        if (c.label.empty()) throw ConfigError("curve labels must be non-empty");
        for (char ch : c.label)
            if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.'))
                throw ConfigError("curve label '" + c.label + "' may only use letters, digits, '_', '-' and '.'");
        validate(c.phase);
    }
    std::set<std::string> labels;
    for (const auto& c : cfg.curves)
        if (!labels.insert(c.label).second) throw ConfigError("duplicate curve label '" + c.label + "'");
    if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
    if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    switch (cfg.campaign) {
        case Campaign::BerVsMismatch:
        case Campaign::C2Sweep: {
            MismatchSweepSpec spec;
            spec.delta_grid = cfg.deltas;
            spec.threshold = cfg.threshold;
            validate(spec);
            if (cfg.campaign == Campaign::C2Sweep) {
                if (cfg.c2_values.empty()) throw ConfigError("c2-sweep needs c2_values");
                for (double c2 : cfg.c2_values) validate(cfg.scenario.afdm.phase.with_c2(c2));
            }
            if (cfg.axis == MismatchAxis::Kappa)
                for (const auto& c : cfg.effective_curves())
                    if (c.phase.kind != PhaseKind::CosineFamily)
                        throw ConfigError("kappa mismatch needs cosine-family curves");
            break;
        }
        case Campaign::BerVsSnr:
            if (cfg.snr_grid.empty()) throw ConfigError("ber-vs-snr needs snr_db");
            if (cfg.deltas.empty()) throw ConfigError("ber-vs-snr needs deltas");
            for (double d : cfg.deltas)
                if (!std::isfinite(d) || d < 0.0) throw ConfigError("deltas must be finite and non-negative");
            break;
        case Campaign::EavesdropSearch: {
            EveModel eve;
            eve.axes = cfg.search;
            eve.pilot_frames = cfg.pilot_frames;
            validate(eve);
            break;
        }
        case Campaign::BoundReport: break;
    }
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    using detail::get_or;
    using detail::get_required;
    detail::check_keys(j, {"campaign", "output", "scenario", "curves", "sweep"}, "config");
    ExperimentConfig cfg;
    cfg.campaign = detail::campaign_from_string(get_required<std::string>(j, "campaign", "config"));
    cfg.output = get_or<std::string>(j, "output", cfg.output, "config");

    const auto& s = j.contains("scenario") ? j.at("scenario") : throw ConfigError("missing key 'scenario'");
    detail::check_keys(s,
                       {"N", "c1", "cpp_len", "phase", "channel", "constellation", "seed", "trials", "snr_db",
                        "workers", "early_stop_errors"},
                       "scenario");
    SimScenario& sc = cfg.scenario;
    sc.afdm.n_sub = get_required<std::int64_t>(s, "N", "scenario");
    if (s.contains("phase")) sc.afdm.phase = detail::phase_from_json(s.at("phase"), "scenario.phase");
    if (s.contains("channel")) sc.channel = detail::channel_from_json(s.at("channel"), "scenario.channel");
    const auto cname = get_or<std::string>(s, "constellation", "qpsk", "scenario");
    if (cname == "qpsk")
        sc.constellation = ConstellationSpec::qpsk();
    else if (cname == "qam16")
        sc.constellation = ConstellationSpec::qam(16);
    else
        throw ConfigError("unknown constellation '" + cname + "'");
    sc.master_seed = get_or<std::uint64_t>(s, "seed", sc.master_seed, "scenario");
    sc.trials = get_or<std::int64_t>(s, "trials", sc.trials, "scenario");
    sc.snr_db = get_or<double>(s, "snr_db", sc.snr_db, "scenario");
    sc.workers = get_or<int>(s, "workers", sc.workers, "scenario");
    sc.early_stop_errors = get_or<std::int64_t>(s, "early_stop_errors", sc.early_stop_errors, "scenario");
    if (s.contains("c1")) cfg.c1 = get_required<double>(s, "c1", "scenario");
    if (s.contains("cpp_len")) cfg.cpp_len = get_required<std::int64_t>(s, "cpp_len", "scenario");
    if (sc.afdm.n_sub < 1) throw ConfigError("N must be >= 1");
    sc.afdm.c1 = cfg.c1.value_or(default_c1(sc.channel.nu_max, sc.afdm.n_sub));
    sc.afdm.cpp_len = cfg.cpp_len.value_or(sc.channel.max_delay());

    if (j.contains("curves")) {
        const auto& arr = j.at("curves");
        if (!arr.is_array()) throw ConfigError("curves must be a list");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string where = "curves[" + std::to_string(i) + "]";
            detail::check_keys(arr[i], {"label", "phase"}, where);
            cfg.curves.push_back({get_required<std::string>(arr[i], "label", where),
                                  detail::phase_from_json(get_required<nlohmann::json>(arr[i], "phase", where),
                                                          where + ".phase")});
        }
    }

    if (j.contains("sweep")) {
        const auto& w = j.at("sweep");
        detail::check_keys(w,
                           {"axis", "deltas", "threshold", "snr_db", "c2_values", "search", "pilot_frames", "epsilon",
                            "kappa_range"},
                           "sweep");
        cfg.axis = detail::axis_from_string(get_or<std::string>(w, "axis", "c2", "sweep"));
        if (w.contains("deltas")) cfg.deltas = detail::grid_from_json(w.at("deltas"), "sweep.deltas");
        cfg.threshold = get_or<double>(w, "threshold", cfg.threshold, "sweep");
        if (w.contains("snr_db")) cfg.snr_grid = detail::grid_from_json(w.at("snr_db"), "sweep.snr_db");
        if (w.contains("c2_values")) cfg.c2_values = detail::grid_from_json(w.at("c2_values"), "sweep.c2_values");
        cfg.pilot_frames = get_or<std::int64_t>(w, "pilot_frames", cfg.pilot_frames, "sweep");
        cfg.epsilon = get_or<double>(w, "epsilon", cfg.epsilon, "sweep");
        cfg.kappa_range = get_or<double>(w, "kappa_range", cfg.kappa_range, "sweep");
        if (w.contains("search")) {
            const auto& arr = w.at("search");
            if (!arr.is_array()) throw ConfigError("sweep.search must be a list");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string where = "sweep.search[" + std::to_string(i) + "]";
                SearchAxis ax;
                if (arr[i].contains("values")) {
                    detail::check_keys(arr[i], {"axis", "values"}, where);
                    ax.grid = detail::grid_from_json(arr[i].at("values"), where + ".values");
                } else {
                    detail::check_keys(arr[i], {"axis", "from", "to", "points"}, where);
                    ax.grid = detail::linear_grid(get_required<double>(arr[i], "from", where),
                                                  get_required<double>(arr[i], "to", where),
                                                  get_required<std::int64_t>(arr[i], "points", where));
                }
                ax.name = detail::axis_from_string(get_required<std::string>(arr[i], "axis", where));
                cfg.search.push_back(std::move(ax));
            }
        }
    }
    validate(cfg);
    return cfg;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    using nlohmann::json;
    const SimScenario& sc = cfg.scenario;
    json s{{"N", sc.afdm.n_sub},
           {"phase", detail::phase_to_json(sc.afdm.phase)},
           {"channel", detail::channel_to_json(sc.channel)},
           {"constellation", sc.constellation.order() == 4 ? "qpsk" : "qam16"},
           {"seed", sc.master_seed},
           {"trials", sc.trials},
           {"snr_db", sc.snr_db},
           {"workers", sc.workers},
           {"early_stop_errors", sc.early_stop_errors}};
    if (cfg.c1) s["c1"] = *cfg.c1;
    if (cfg.cpp_len) s["cpp_len"] = *cfg.cpp_len;

    json w{{"axis", to_string(cfg.axis)},
           {"deltas", cfg.deltas},
           {"threshold", cfg.threshold},
           {"snr_db", cfg.snr_grid},
           {"c2_values", cfg.c2_values},
           {"pilot_frames", cfg.pilot_frames},
           {"epsilon", cfg.epsilon},
           {"kappa_range", cfg.kappa_range}};
    json search = json::array();
    for (const auto& ax : cfg.search) search.push_back(json{{"axis", to_string(ax.name)}, {"values", ax.grid}});
    w["search"] = search;

    json curves = json::array();
    for (const auto& c : cfg.curves) curves.push_back(json{{"label", c.label}, {"phase", detail::phase_to_json(c.phase)}});

    json out{{"campaign", to_string(cfg.campaign)}, {"output", cfg.output}, {"scenario", s}, {"sweep", w}};
    if (!cfg.curves.empty()) out["curves"] = curves;
    return out;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

// FNV-1a over the canonical serialization, excluding the output directory.
inline std::string config_hash(const ExperimentConfig& cfg) {
    nlohmann::json j = config_to_json(cfg);
    j.erase("output");
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace afdm
