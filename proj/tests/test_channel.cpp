#include "afdm/channel.hpp"
#include "afdm/modem.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace afdm;

namespace {

AfdmParams params(std::int64_t n, double c1, std::int64_t cpp) {
    AfdmParams p;
    p.n_sub = n;
    p.c1 = c1;
    p.phase = PhaseFunction::conventional(0.2);
    p.cpp_len = cpp;
    return p;
}

CVector random_vector(std::int64_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CVector v(n);
    for (auto& x : v) x = Complex(g(rng), g(rng));
    return v;
}

ChannelRealization single_tap(Complex h, std::int64_t l, double nu) { return {{{h, l, nu}}}; }

}  // namespace

TEST_CASE("channel matrix special cases") {
    const auto p = params(16, 0.1, 2);
    CHECK((build_channel_matrix(single_tap(1.0, 0, 0.0), p) - CMatrix::Identity(16, 16)).cwiseAbs().maxCoeff() == 0.0);

    const CMatrix h = build_channel_matrix(single_tap(1.0, 0, 1.0), p);
    CMatrix expect = CMatrix::Zero(16, 16);
    for (int n = 0; n < 16; ++n) expect(n, n) = std::polar(1.0, -kTwoPi * n / 16.0);
    CHECK((h - expect).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(build_channel_matrix(single_tap(1.0, 3, 0.0), p), ConfigError);
}

TEST_CASE("integer Doppler matches the shift-matrix product") {
    // sum_p h_p Gamma_p Pi^l Delta^nu built from explicit factors.
    const std::int64_t n = 32;
    // Generic c1: with c1 = 7/64 every CPP factor would be exactly one.
    const double c1 = 0.1234;
    const auto p = params(n, c1, 3);
    const ChannelRealization real{{{Complex(0.3, 0.1), 0, 2.0}, {Complex(-0.5, 0.2), 2, -1.0}, {Complex(0.1, -0.4), 3, 3.0}}};
    CMatrix expect = CMatrix::Zero(n, n);
    for (const auto& tap : real.taps) {
        CMatrix pi = CMatrix::Zero(n, n);
        for (std::int64_t r = 0; r < n; ++r) pi(r, (r - tap.delay + n) % n) = 1.0;
        CMatrix dop = CMatrix::Zero(n, n);
        for (std::int64_t r = 0; r < n; ++r) dop(r, r) = std::polar(1.0, -kTwoPi * tap.doppler * r / n);
        CMatrix gamma = CMatrix::Identity(n, n);
        for (std::int64_t r = 0; r < tap.delay; ++r)
            gamma(r, r) = std::polar(1.0, -kTwoPi * c1 * double(n * n - 2 * n * (tap.delay - r)));
        expect += tap.gain * gamma * pi * dop;
    }
    CHECK((build_channel_matrix(real, p) - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("matrix channel equals tapped-delay-line propagation of the CPP block") {
    std::mt19937_64 rng(3);
    const auto profile = ChannelProfile::reference();
    struct Case {
        double c1;
        std::vector<double> dopplers;
    };
    const Case cases[] = {{0.0, {0.0, -1.0, 2.0, 3.0}},
                          {7.0 / 128.0, {0.0, -1.0, 2.0, 3.0}},
                          {0.0, {0.0, -0.3, 0.8, 3.0}},
                          {7.0 / 128.0, {0.0, -0.3, 0.8, 3.0}},
                          {0.1234, {0.0, -1.0, 2.0, 3.0}},
                          {0.1234, {0.0, -0.3, 0.8, 3.0}}};
    for (const auto& c : cases) {
        auto prof = profile;
        prof.dopplers = c.dopplers;
        const auto p = params(64, c.c1, 3);
        Modem modem(p);
        for (int trial = 0; trial < 100; ++trial) {
            const auto real = draw_realization(prof, rng);
            const CVector s = random_vector(64, rng);
            const CVector direct = modem.remove_cpp(propagate_time_domain(real, modem.add_cpp(s), p));
            const CMatrix h = build_channel_matrix(real, p);
            CHECK((h * s - direct).cwiseAbs().maxCoeff() < 1e-9);
            CHECK((ChannelOperator(real, p).apply(s) - h * s).cwiseAbs().maxCoeff() < 1e-12);

            double l1 = 0.0;
            for (const auto& tap : real.taps) l1 += std::abs(tap.gain);
            CHECK((h * s).norm() <= l1 * s.norm() + 1e-12);
        }
    }
}

TEST_CASE("CPP phase factors are unit modulus") {
    const auto p = params(64, 0.1234, 3);
    const ChannelRealization real{{{1.0, 3, 0.0}}};
    const CMatrix h = build_channel_matrix(real, p);
    for (int r = 0; r < 64; ++r) CHECK(std::fabs(std::abs(h(r, (r - 3 + 64) % 64)) - 1.0) < 1e-14);
    // Rows inside the prefix carry e^{-j2pi c1 (N^2 - 2N(l - n))}; that is not 1 for this c1.
    for (int r = 0; r < 3; ++r) {
        const double cyc = -0.1234 * (4096.0 - 128.0 * (3 - r));
        CHECK(std::abs(h(r, r + 61) - std::polar(1.0, kTwoPi * cyc)) < 1e-12);
        CHECK(std::abs(h(r, r + 61) - 1.0) > 1e-3);
    }
}

TEST_CASE("time-domain propagation edge cases") {
    const auto p = params(8, 0.2, 2);
    CHECK(propagate_time_domain(single_tap(0.7, 2, 1.5), CVector::Zero(10), p).cwiseAbs().maxCoeff() == 0.0);
    std::mt19937_64 rng(8);
    const CVector s = random_vector(10, rng);
    const Complex h(0.6, -0.2);
    CHECK((propagate_time_domain(single_tap(h, 0, 0.0), s, p) - h * s).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("realization draws") {
    auto prof = ChannelProfile::reference();
    std::mt19937_64 a(77);
    std::mt19937_64 b(77);
    const auto ra = draw_realization(prof, a);
    const auto rb = draw_realization(prof, b);
    for (std::size_t i = 0; i < ra.taps.size(); ++i) {
        CHECK(ra.taps[i].gain == rb.taps[i].gain);
        CHECK(std::fabs(std::abs(ra.taps[i].gain) - std::sqrt(prof.powers[i])) < 1e-15);
    }

    prof.model = CoefficientModel::ComplexGaussian;
    std::mt19937_64 rng(5);
    double total = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
        for (const auto& tap : draw_realization(prof, rng).taps) total += std::norm(tap.gain);
    CHECK(std::fabs(total / draws - 1.0) < 0.01);
}

TEST_CASE("profile validation") {
    CHECK_NOTHROW(validate(ChannelProfile::reference()));
    auto bad = ChannelProfile::reference();
    bad.powers[0] = 0.5;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = ChannelProfile::reference();
    bad.delays = {0, 2, 1, 3};
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = ChannelProfile::reference();
    bad.dopplers[3] = 3.5;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = ChannelProfile::reference();
    bad.dopplers.pop_back();
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("AWGN calibration and determinism") {
    std::mt19937_64 rng(21);
    const CMatrix h = CMatrix::Identity(4, 4);
    CVector s(4);
    s << 1.0, Complex(0, 1), -1.0, Complex(0.5, 0.5);
    CHECK((apply_channel(h, s, std::numeric_limits<double>::infinity(), rng) - s).cwiseAbs().maxCoeff() == 0.0);

    const std::int64_t n = 1000000;
    double power = 0.0;
    const double snr_db = 7.0;
    std::mt19937_64 nr(9);
    const CVector w = std::sqrt(noise_variance(snr_db)) * unit_noise(n, nr);
    power = w.squaredNorm() / static_cast<double>(n);
    CHECK(std::fabs(power / std::pow(10.0, -0.7) - 1.0) < 0.02);

    std::mt19937_64 r1(4);
    std::mt19937_64 r2(4);
    CHECK((apply_channel(h, s, 10.0, r1) - apply_channel(h, s, 10.0, r2)).cwiseAbs().maxCoeff() == 0.0);
}
