#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <stdexcept>

#include "afc/analytic.hpp"

using namespace afc;

// values below are frozen from direct evaluation of the defining expressions
// (exp, pi^2/(4 ln2)) at double precision

TEST_CASE("effective depth is d over finesse") {
    CombParams p{8.0, 300.0, 1.2, 4};  // F = 4
    CHECK(effective_depth(p) == doctest::Approx(2.0).epsilon(1e-12));
    CombParams q{10.0, 150.0, 1.2, 4};  // F = 8, the four-peak comb working point
    CHECK(q.finesse() == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(effective_depth(q) == doctest::Approx(1.25).epsilon(1e-12));
    CombParams z{0.0, 150.0, 1.2, 4};
    CHECK(effective_depth(z) == 0.0);
}

TEST_CASE("transmission") {
    CHECK(transmission(0.0) == 1.0);
    CHECK(transmission(2.0) == doctest::Approx(0.1353352832366127).epsilon(1e-14));
    double prev = 1.1;
    for (double d = 0.0; d < 8.0; d += 0.25) {
        CHECK(transmission(d) < prev);
        prev = transmission(d);
    }
    CHECK_THROWS_AS(transmission(-0.1), std::invalid_argument);
}

TEST_CASE("dephasing factor") {
    CHECK(dephasing_factor(1e12) == doctest::Approx(1.0).epsilon(1e-12));
    // pi^2/(4 ln2) = 3.559707331246876
    CHECK(dephasing_factor(1.0) == doctest::Approx(0.028447149087636497).epsilon(1e-12));
    CHECK(dephasing_factor(8.0) == doctest::Approx(0.9458981050920435).epsilon(1e-12));
}

TEST_CASE("echo efficiency") {
    // re-absorption-limited maximum at infinite finesse
    CHECK(echo_efficiency_effective(2.0, 1e12) == doctest::Approx(0.5413411329464508).epsilon(1e-12));
    CombParams zero{0.0, 150.0, 1.2, 4};
    CHECK(echo_efficiency(zero) == 0.0);
    // the four-peak comb parameter point: d=10, gamma=150 kHz, delta=1.2 MHz
    CombParams fig{10.0, 150.0, 1.2, 4};
    CHECK(echo_efficiency(fig) == doctest::Approx(0.42344428820286667).epsilon(1e-12));
}

TEST_CASE("eta/T factorization holds exactly") {
    for (double dt : {0.1, 0.5, 1.0, 2.0, 3.5}) {
        for (double F : {2.0, 5.0, 8.0, 20.0}) {
            const double eta = echo_efficiency_effective(dt, F);
            const double T = transmission(dt);
            CHECK(eta / T == doctest::Approx(dt * dt * dephasing_factor(F)).epsilon(1e-12));
        }
    }
}

TEST_CASE("energy bookkeeping: eta + T stays below 1") {
    for (double dt = 0.0; dt <= 12.0; dt += 0.05) {
        for (double F : {1.5, 4.0, 8.0, 100.0}) {
            const double sum = echo_efficiency_effective(dt, F) + transmission(dt);
            CHECK(sum <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("amplitude decay and the dephasing identity") {
    CHECK(amplitude_decay(0.0, 150.0) == 1.0);
    // evaluated at the echo time 1/delta, the decay equals dephasing_factor(F)
    for (double delta : {0.8, 1.2, 2.0}) {
        for (double F : {4.0, 6.9, 8.0, 12.0}) {
            const double gamma_khz = delta * 1e3 / F;
            CHECK(amplitude_decay(1.0 / delta, gamma_khz) ==
                  doctest::Approx(dephasing_factor(F)).epsilon(1e-12));
        }
    }
    // gamma = 150 kHz at t = 0.833 us is the F = 8 point up to rounding of t
    CHECK(amplitude_decay(0.833, 150.0) == doctest::Approx(dephasing_factor(8.0)).epsilon(1e-3));
}

TEST_CASE("optimal depth") {
    auto inf = optimal_depth(1e12);
    CHECK(inf.d_tilde == 2.0);
    CHECK(inf.eta == doctest::Approx(0.5413411329464508).epsilon(1e-12));
    auto f8 = optimal_depth(8.0);
    CHECK(f8.d_tilde == 2.0);
    CHECK(f8.eta == doctest::Approx(0.5120535518624278).epsilon(1e-12));

    // maximizer independent of finesse, verified by grid search
    for (double F : {2.0, 5.0, 8.0, 20.0}) {
        double best_d = 0.0, best = -1.0;
        for (double dt = 0.0; dt <= 8.0; dt += 1e-4) {
            const double v = echo_efficiency_effective(dt, F);
            if (v > best) {
                best = v;
                best_d = dt;
            }
        }
        CHECK(best_d == doctest::Approx(2.0).epsilon(1e-3));
        CHECK(optimal_depth(F).eta == doctest::Approx(best).epsilon(1e-6));
    }
}

TEST_CASE("comb params validation") {
    CombParams bad{5.0, 1300.0, 1.2, 4};  // gamma above delta
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CombParams neg{-1.0, 150.0, 1.2, 4};
    CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
}
