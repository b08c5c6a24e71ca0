// simulation.hpp - Monte Carlo frame engine
//
// Every trial draws its bits, channel and noise from independent streams keyed
// by (master_seed, trial_index, purpose). Sweep points therefore share random
// numbers, and results do not depend on worker count or scheduling.

#pragma once

#include "afdm/channel.hpp"
#include "afdm/constellation.hpp"
#include "afdm/modem.hpp"
#include "afdm/phase_function.hpp"
#include "afdm/receiver.hpp"
#include "afdm/types.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <thread>
#include <vector>

namespace afdm {

struct SimScenario {
    AfdmParams afdm{};
    ChannelProfile channel = ChannelProfile::reference();
    ConstellationSpec constellation = ConstellationSpec::qpsk();
    std::uint64_t master_seed = 1;
    std::int64_t trials = 1000;
    double snr_db = 25.0;
    // 0 = one worker per hardware thread.
    int workers = 0;
    // Stop accumulating a sweep point once it has this many bit errors (0 = never).
    std::int64_t early_stop_errors = 0;

    bool operator==(const SimScenario&) const = default;
};

// Scenario with c1 = (2 nu_max + 1)/(2N) and CPP length = maximum delay.
inline SimScenario make_scenario(std::int64_t n_sub, const PhaseFunction& phase,
                                 const ChannelProfile& profile = ChannelProfile::reference()) {
    SimScenario sc;
    sc.channel = profile;
    sc.afdm.n_sub = n_sub;
    sc.afdm.phase = phase;
    sc.afdm.c1 = default_c1(profile.nu_max, n_sub);
    sc.afdm.cpp_len = profile.max_delay();
    return sc;
}

inline void validate(const SimScenario& sc) {
    validate(sc.afdm);
    validate(sc.afdm.phase);
    validate(sc.channel);
    if (sc.trials < 1) throw ConfigError("trials must be >= 1");
    if (sc.channel.max_delay() > sc.afdm.cpp_len)
        throw ConfigError("CPP length " + std::to_string(sc.afdm.cpp_len) + " is shorter than the maximum delay " +
                          std::to_string(sc.channel.max_delay()));
    if (std::isnan(sc.snr_db)) throw ConfigError("snr_db must be a number");
    if (sc.early_stop_errors < 0) throw ConfigError("early_stop_errors must be >= 0");
}

enum class StreamPurpose : std::uint64_t { Bits = 1, Channel = 2, Noise = 3 };

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::int64_t trial, StreamPurpose purpose) {
    std::uint64_t h = detail::splitmix64(master_seed);
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(trial));
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    return std::mt19937_64(h);
}

// Random quantities of one frame, independent of receiver configuration.
struct FrameDraw {
    Bits bits;
    CVector symbols;
    ChannelRealization channel;
    CVector unit_noise;
};

inline FrameDraw draw_frame(const SimScenario& sc, std::int64_t trial) {
    FrameDraw fd;
    auto bit_rng = make_stream(sc.master_seed, trial, StreamPurpose::Bits);
    const auto nbits = static_cast<std::size_t>(sc.afdm.n_sub * sc.constellation.bits_per_symbol());
    fd.bits.resize(nbits);
    for (auto& b : fd.bits) b = static_cast<std::uint8_t>(bit_rng() >> 63);
    fd.symbols = map_bits(fd.bits, sc.constellation);
    auto ch_rng = make_stream(sc.master_seed, trial, StreamPurpose::Channel);
    fd.channel = draw_realization(sc.channel, ch_rng);
    auto noise_rng = make_stream(sc.master_seed, trial, StreamPurpose::Noise);
    fd.unit_noise = unit_noise(sc.afdm.n_sub, noise_rng);
    return fd;
}

enum class MismatchAxis { C2, Kappa };

inline std::string to_string(MismatchAxis axis) { return axis == MismatchAxis::C2 ? "c2" : "kappa"; }

// The eavesdropper's candidate: the true phase with one parameter offset by delta.
inline PhaseFunction apply_mismatch(const PhaseFunction& truth, MismatchAxis axis, double delta) {
    if (axis == MismatchAxis::C2) return truth.with_c2(truth.c2 + delta);
    if (truth.kind != PhaseKind::CosineFamily)
        throw UnsupportedOperation("kappa mismatch needs the cosine phase family");
    return truth.with_kappa(truth.kappa + delta);
}

struct FrameOverride {
    MismatchAxis axis = MismatchAxis::C2;
    double delta = 0.0;
};

struct FrameCount {
    std::int64_t bits = 0;
    std::int64_t errors = 0;
    bool operator==(const FrameCount&) const = default;
};

// One frame through the full chain: bits -> QPSK -> IDAFT -> (CPP, channel via
// Gamma_CPP) -> AWGN -> DAFT -> MMSE -> demap. With an override the receiver
// demodulates and equalizes with the mismatched phase function.
inline FrameCount run_frame(const SimScenario& sc, std::optional<FrameOverride> override_, std::int64_t trial) {
    const FrameDraw fd = draw_frame(sc, trial);
    Modem tx(sc.afdm);
    const ChannelOperator h(fd.channel, sc.afdm);
    const double sigma2 = noise_variance(sc.snr_db);

    const CVector s = tx.modulate(fd.symbols);
    CVector r = h.apply(s);
    if (sigma2 > 0.0) r += std::sqrt(sigma2) * fd.unit_noise;

    AfdmParams rx_params = sc.afdm;
    if (override_) rx_params.phase = apply_mismatch(sc.afdm.phase, override_->axis, override_->delta);
    Modem rx(rx_params);
    const CVector y = rx.demodulate(r);
    const MmseEqualizer eq(effective_channel(h, rx, sigma2));
    const Bits rx_bits = demap_hard(eq.equalize(y), sc.constellation);
    return {static_cast<std::int64_t>(fd.bits.size()), count_bit_errors(fd.bits, rx_bits)};
}

// Legitimate-receiver equalized symbols for one trial at several SNRs, sharing
// bits, channel and unit noise across the SNR list.
struct LegitOutcome {
    Bits bits;
    std::vector<CVector> equalized;  // one per SNR
};

inline LegitOutcome run_legit(const SimScenario& sc, Modem& modem, const std::vector<double>& snr_db,
                              std::int64_t trial) {
    const FrameDraw fd = draw_frame(sc, trial);
    const ChannelOperator h(fd.channel, sc.afdm);
    const CVector clean = h.apply(modem.modulate(fd.symbols));
    const EffectiveChannel base = effective_channel(h, modem, 0.0);

    LegitOutcome out;
    out.bits = fd.bits;
    out.equalized.reserve(snr_db.size());
    for (double snr : snr_db) {
        const double sigma2 = noise_variance(snr);
        CVector r = clean;
        if (sigma2 > 0.0) r += std::sqrt(sigma2) * fd.unit_noise;
        const MmseEqualizer eq(EffectiveChannel{base.h_eff, sigma2});
        out.equalized.push_back(eq.equalize(modem.demodulate(r)));
    }
    return out;
}

struct BerPoint {
    double sweep_value = 0.0;
    std::int64_t trials = 0;
    std::int64_t bits = 0;
    std::int64_t errors = 0;

    double ber() const { return bits > 0 ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }
    // 95% normal-approximation half-width.
    double ci95() const {
        if (bits == 0) return 0.0;
        const double p = ber();
        return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(bits));
    }
};

// Two-proportion pooled z-test at k sigma. Both zero-error points agree.
inline bool ber_agree(const BerPoint& a, const BerPoint& b, double k_sigma = 3.0) {
    if (a.bits == 0 || b.bits == 0) return false;
    const double pooled = static_cast<double>(a.errors + b.errors) / static_cast<double>(a.bits + b.bits);
    const double sd = std::sqrt(pooled * (1.0 - pooled) *
                                (1.0 / static_cast<double>(a.bits) + 1.0 / static_cast<double>(b.bits)));
    return std::fabs(a.ber() - b.ber()) <= k_sigma * sd;
}

namespace detail {

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace detail

// Runs `trial_fn(trial, worker_state, counts)` over all trials, where counts
// holds (bits, errors) per sweep point. Trials run in fixed blocks; a point is
// frozen at a block boundary once it reaches early_stop_errors, so the result
// is a pure function of the scenario.
template <class State>
std::vector<BerPoint> monte_carlo(const SimScenario& sc, std::size_t points,
                                  const std::function<State()>& make_state,
                                  const std::function<void(std::int64_t, State&, std::vector<FrameCount>&,
                                                           const std::vector<char>&)>& trial_fn) {
    constexpr std::int64_t kBlock = 64;
    std::vector<BerPoint> result(points);
    std::vector<char> active(points, 1);
    const int workers = static_cast<int>(std::min<std::int64_t>(detail::resolve_workers(sc.workers), sc.trials));

    std::vector<State> states;
    states.reserve(workers);
    for (int w = 0; w < workers; ++w) states.push_back(make_state());

    for (std::int64_t start = 0; start < sc.trials; start += kBlock) {
        const std::int64_t stop = std::min(sc.trials, start + kBlock);
        std::vector<std::vector<FrameCount>> partial(workers, std::vector<FrameCount>(points));
        std::atomic<std::int64_t> next{start};
        auto work = [&](int w) {
            for (std::int64_t t = next++; t < stop; t = next++) trial_fn(t, states[w], partial[w], active);
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
            for (auto& th : pool) th.join();
        }
        bool any_active = false;
        for (std::size_t p = 0; p < points; ++p) {
            if (!active[p]) continue;
            for (int w = 0; w < workers; ++w) {
                result[p].bits += partial[w][p].bits;
                result[p].errors += partial[w][p].errors;
            }
            result[p].trials += stop - start;
            if (sc.early_stop_errors > 0 && result[p].errors >= sc.early_stop_errors) active[p] = 0;
            any_active = any_active || active[p];
        }
        if (!any_active) break;
    }
    return result;
}

}  // namespace afdm
