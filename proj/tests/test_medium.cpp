#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "latfront/errors.hpp"
#include "latfront/medium.hpp"

using namespace latfront;
using latfront::testing::canonical_spec;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("constant medium samples the given set everywhere") {
    const Medium m(canonical_spec());
    for (double t : {-37.5, 0.0, 1e6, 0.123}) {
        const CoefficientSet c = m.coeffs_at(t);
        CHECK(c.a1 == 1.0);
        CHECK(c.b1 == 1.0);
        CHECK(c.c1 == 0.5);
        CHECK(c.a2 == 0.5);
        CHECK(c.b2 == 1.0);
        CHECK(c.c2 == 1.0);
    }
}

TEST_CASE("periodic channel evaluates its defining formula") {
    MediumSpec spec = canonical_spec();
    spec.channels[0] = ChannelSpec::periodic(1.0, 0.5, 1.0);
    const Medium m(spec);
    CHECK(m.coeffs_at(kPi / 2.0).a1 == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(m.coeffs_at(0.0).a1 == 1.0);
}

TEST_CASE("quasi-periodic channel at phase zero") {
    const Medium m(latfront::testing::quasi_periodic_spec());
    CHECK(m.coeffs_at(0.0).a1 == 1.0);
}

TEST_CASE("same spec and seed sample bit-identically") {
    for (const MediumSpec& spec :
         {latfront::testing::switching_spec(), latfront::testing::noise_spec()}) {
        const Medium a(spec);
        const Medium b(spec);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> ts(-500.0, 500.0);
        for (int i = 0; i < 200; ++i) {
            const double t = ts(rng);
            for (int ch = 0; ch < 6; ++ch)
                CHECK(a.channel(static_cast<Channel>(ch), t) ==
                      b.channel(static_cast<Channel>(ch), t));
        }
    }
}

TEST_CASE("shift covariance is bit-exact on 1000 random probes") {
    for (const MediumSpec& spec :
         {canonical_spec(), latfront::testing::quasi_periodic_spec(),
          latfront::testing::switching_spec(), latfront::testing::noise_spec()}) {
        const Medium m(spec);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> dist(-200.0, 200.0);
        for (int i = 0; i < 250; ++i) {
            const double s = dist(rng);
            const double t = dist(rng);
            const Medium shifted = m.shifted(s);
            for (int ch = 0; ch < 6; ++ch)
                CHECK(shifted.channel(static_cast<Channel>(ch), t) ==
                      m.channel(static_cast<Channel>(ch), t + s));
        }
    }
}

TEST_CASE("shift composes additively and s=0 is the identity") {
    const Medium m(latfront::testing::noise_spec());
    const Medium zero = m.shifted(0.0);
    const Medium ab = m.shifted(1.75).shifted(-4.5);
    const Medium once = m.shifted(1.75 + -4.5);
    for (double t : {-3.0, 0.0, 5.5, 41.0}) {
        CHECK(zero.channel(Channel::A1, t) == m.channel(Channel::A1, t));
        CHECK(ab.channel(Channel::A1, t) == once.channel(Channel::A1, t));
    }
}

TEST_CASE("shifting a periodic channel by its period changes nothing") {
    MediumSpec spec = canonical_spec();
    spec.channels[0] = ChannelSpec::periodic(1.0, 0.5, 1.0);
    const Medium m(spec);
    const Medium shifted = m.shifted(2.0 * kPi);
    for (double t = -5.0; t < 5.0; t += 0.37)
        CHECK(shifted.channel(Channel::A1, t) ==
              doctest::Approx(m.channel(Channel::A1, t)).epsilon(1e-12));
}

TEST_CASE("smoothed switching matches the mollified step by direct quadrature") {
    const Medium m(latfront::testing::switching_spec());
    const auto& ch = m.spec().channels[0];
    const double w = ch.smoothing_width;

    // Locate a genuine transition: plateau values differ around it.
    double t_switch = 0.0;
    bool found = false;
    for (double t = 0.0; t < 200.0 && !found; t += ch.switch_period) {
        const double before = m.channel(Channel::A1, t);
        const double after = m.channel(Channel::A1, t + ch.switch_period);
        if (std::abs(before - after) > 0.1) {
            // bisect for the mid-level crossing inside (t, t+period)
            double lo = t, hi = t + ch.switch_period;
            const double mid_level = 0.5 * (before + after);
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                const bool below = (m.channel(Channel::A1, mid) - mid_level) *
                                       (before - mid_level) >
                                   0.0;
                (below ? lo : hi) = mid;
            }
            t_switch = 0.5 * (lo + hi);
            found = true;
        }
    }
    REQUIRE(found);

    const double level_before = m.channel(Channel::A1, t_switch - 1.5 * w);
    const double level_after = m.channel(Channel::A1, t_switch + 1.5 * w);
    // CDF of the bump mollifier by quadrature, independent of the library.
    auto rho = [](double x) {
        const double q = 1.0 - x * x;
        return (15.0 / 16.0) * q * q;
    };
    for (double frac : {-0.8, -0.3, 0.0, 0.25, 0.6}) {
        const double t = t_switch + frac * w;
        double cdf = 0.0;
        const int n = 4000;
        for (int i = 0; i < n; ++i) {
            const double x0 = -1.0 + 2.0 * i / n;
            const double x1 = -1.0 + 2.0 * (i + 1) / n;
            if (x0 > frac) break;
            const double hi = std::min(x1, frac);
            cdf += 0.5 * (rho(x0) + rho(hi)) * (hi - x0);
        }
        const double expected = level_before + (level_after - level_before) * cdf;
        CHECK(m.channel(Channel::A1, t) ==
              doctest::Approx(expected).epsilon(1e-6));
        CHECK(m.channel(Channel::A1, t) >=
              std::min(level_before, level_after) - 1e-12);
        CHECK(m.channel(Channel::A1, t) <=
              std::max(level_before, level_after) + 1e-12);
    }
}

TEST_CASE("channel integrals: constants, periods, additivity, shifts") {
    const Medium m(canonical_spec());
    CHECK(m.channel_integral(Channel::A1, 0.0, 5.0) ==
          doctest::Approx(5.0).epsilon(1e-12));

    MediumSpec spec = canonical_spec();
    spec.channels[0] = ChannelSpec::periodic(1.0, 0.5, 1.0);
    const Medium mp(spec);
    CHECK(mp.channel_integral(Channel::A1, 0.0, 2.0 * kPi) ==
          doctest::Approx(2.0 * kPi).epsilon(1e-10));

    // Change of variables under shift.
    CHECK(mp.shifted(3.0).channel_integral(Channel::A1, 0.0, 2.0) ==
          doctest::Approx(mp.channel_integral(Channel::A1, 3.0, 5.0))
              .epsilon(1e-12));

    // Additivity within 2 * tol_quad.
    const Medium mq(latfront::testing::quasi_periodic_spec());
    const double i_ab = mq.channel_integral(Channel::A1, 0.0, 7.3);
    const double i_bc = mq.channel_integral(Channel::A1, 7.3, 19.0);
    const double i_ac = mq.channel_integral(Channel::A1, 0.0, 19.0);
    CHECK(std::abs(i_ab + i_bc - i_ac) < 2.0 * kDefaultQuadTol);
}

TEST_CASE("smoothed switching integral matches a fine trapezoid oracle") {
    const Medium m(latfront::testing::switching_spec());
    const double val = m.channel_integral(Channel::A1, 0.0, 10.0);
    double acc = 0.0;
    const double h = 1e-4;
    double prev = m.channel(Channel::A1, 0.0);
    for (int i = 1; i <= 100000; ++i) {
        const double cur = m.channel(Channel::A1, h * i);
        acc += 0.5 * h * (prev + cur);
        prev = cur;
    }
    CHECK(val == doctest::Approx(acc).epsilon(1e-8));
}

TEST_CASE("mean estimates: constant path, sine bounds, analytic oracle") {
    const Medium m(canonical_spec());
    const auto one = mean_estimate(m, Channel::A1, 100.0, 10.0, MeanMode::Least);
    CHECK(one.value == doctest::Approx(1.0).epsilon(1e-12));

    MediumSpec spec = canonical_spec();
    spec.channels[0] = ChannelSpec::periodic(1.0, 0.5, 1.0);
    const Medium mp(spec);
    const double T = 200.0, r = 20.0;
    const auto least = mean_estimate(mp, Channel::A1, T, r, MeanMode::Least);
    const auto greatest = mean_estimate(mp, Channel::A1, T, r, MeanMode::Greatest);
    CHECK(least.value >= 1.0 - 1.0 / r - 1e-9);
    CHECK(least.value <= 1.0 + 1e-9);
    CHECK(greatest.value <= 1.0 + 1.0 / r + 1e-9);
    CHECK(greatest.value >= 1.0 - 1e-9);
    CHECK(least.value <= greatest.value);

    // Exact window averages: mean over [s,t] is 1 + 0.5 (cos s - cos t)/(t-s).
    const double h = 1e-2;
    const auto n = static_cast<std::size_t>(T / h);
    const auto len_lo = static_cast<std::size_t>(r / h);
    std::vector<double> cost(n + 1);
    for (std::size_t i = 0; i <= n; ++i) cost[i] = std::cos(h * i);
    double best = 1e300;
    for (std::size_t len = len_lo; len <= std::min(n, 2 * len_lo - 1); ++len)
        for (std::size_t s = 0; s + len <= n; ++s)
            best = std::min(best,
                            1.0 + 0.5 * (cost[s] - cost[s + len]) /
                                      (h * static_cast<double>(len)));
    CHECK(least.value == doctest::Approx(best).epsilon(1e-9));

    // The attaining window is recorded and respects the length constraint.
    CHECK(least.arg.length >= r - 1e-9);
    CHECK(least.arg.average == doctest::Approx(least.value));
}

TEST_CASE("least mean is non-decreasing in r; greatest non-increasing") {
    const Medium mq(latfront::testing::quasi_periodic_spec());
    double prev_least = -1e300, prev_greatest = 1e300;
    for (double r : {5.0, 10.0, 20.0, 40.0}) {
        const double least = mean_estimate(mq, Channel::A1, 120.0, r,
                                           MeanMode::Least)
                                 .value;
        const double greatest = mean_estimate(mq, Channel::A1, 120.0, r,
                                              MeanMode::Greatest)
                                    .value;
        CHECK(least >= prev_least - 1e-12);
        CHECK(greatest <= prev_greatest + 1e-12);
        CHECK(least <= greatest);
        prev_least = least;
        prev_greatest = greatest;
    }
}

TEST_CASE("window r larger than the horizon is rejected") {
    const Medium m(canonical_spec());
    CHECK_THROWS_AS(mean_estimate(m, Channel::A1, 10.0, 11.0, MeanMode::Least),
                    ConfigError);
    CHECK_THROWS_AS(mean_estimate(m, Channel::A1, 10.0, 0.0, MeanMode::Least),
                    ConfigError);
}

TEST_CASE("b and c channels must stay strictly positive") {
    MediumSpec spec = canonical_spec();
    spec.channels[1] = ChannelSpec::periodic(1.0, 1.2, 1.0); // b1 dips below 0
    CHECK_THROWS_AS(Medium{spec}, ConfigError);

    MediumSpec noisy = latfront::testing::noise_spec();
    ChannelSpec c2;
    c2.kind = ChannelKind::BoundedNoise;
    c2.base = 0.2;
    c2.amplitude = 0.2; // 0.2 - 1.3 * 0.2 < 0
    noisy.channels[5] = c2;
    CHECK_THROWS_AS(Medium{noisy}, ConfigError);

    // A floor-respecting noisy channel passes validation and a dense scan.
    MediumSpec ok = latfront::testing::noise_spec();
    ChannelSpec b2;
    b2.kind = ChannelKind::BoundedNoise;
    b2.base = 1.0;
    b2.amplitude = 0.3;
    b2.correlation_time = 1.5;
    ok.channels[4] = b2;
    const Medium m(ok);
    for (double t = -100.0; t < 100.0; t += 0.05) {
        CHECK(m.channel(Channel::B2, t) > 0.0);
        CHECK(m.channel(Channel::C1, t) > 0.0);
    }
}

TEST_CASE("smoothing width is required and bounded for switching channels") {
    MediumSpec spec = latfront::testing::switching_spec();
    spec.channels[0].smoothing_width = 0.0;
    CHECK_THROWS_AS(Medium{spec}, ConfigError);
    spec.channels[0].smoothing_width = 2.0; // > period/4
    CHECK_THROWS_AS(Medium{spec}, ConfigError);
}

TEST_CASE("medium spec JSON round trip preserves sampling") {
    for (const MediumSpec& spec :
         {latfront::testing::quasi_periodic_spec(),
          latfront::testing::switching_spec(), latfront::testing::noise_spec()}) {
        const MediumSpec back = MediumSpec::from_json(spec.to_json());
        const Medium a(spec), b(back);
        for (double t = -8.0; t < 8.0; t += 0.61)
            for (int ch = 0; ch < 6; ++ch)
                CHECK(a.channel(static_cast<Channel>(ch), t) ==
                      b.channel(static_cast<Channel>(ch), t));
    }
}

TEST_CASE("unknown JSON keys are rejected with a diagnostic") {
    nlohmann::json j = canonical_spec().to_json();
    j["typo"] = 1;
    CHECK_THROWS_AS(MediumSpec::from_json(j), ConfigError);
    nlohmann::json j2 = canonical_spec().to_json();
    j2["channels"]["a1"]["frequency"] = 2.0;
    CHECK_THROWS_AS(MediumSpec::from_json(j2), ConfigError);
}

TEST_CASE("channels accept plain numbers as constant shorthand") {
    nlohmann::json j{{"kind", "constant"},
                     {"seed", 1},
                     {"channels",
                      {{"a1", 1.0},
                       {"b1", 1.0},
                       {"c1", 0.5},
                       {"a2", 0.5},
                       {"b2", 1.0},
                       {"c2", 1.0}}}};
    const MediumSpec spec = MediumSpec::from_json(j);
    CHECK(Medium(spec).coeffs_at(5.0).c1 == 0.5);
}

TEST_CASE("common period detection") {
    MediumSpec spec = canonical_spec();
    spec.channels[0] = ChannelSpec::periodic(1.0, 0.25, 1.0);
    CHECK(Medium(spec).common_period().value() ==
          doctest::Approx(2.0 * kPi).epsilon(1e-12));
    CHECK(Medium(canonical_spec()).common_period().value() == 0.0);
    CHECK(!Medium(latfront::testing::quasi_periodic_spec()).common_period());
}
