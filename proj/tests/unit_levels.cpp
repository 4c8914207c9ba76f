#include <doctest.h>

#include <cmath>
#include <sstream>

#include "afc/levels.hpp"

using namespace afc;

TEST_CASE("transition offsets at the frequency origin") {
    HyperfineScheme s;
    s.validate();
    // the 1/2g->1/2e transition of the class at zero detuning defines 0 MHz
    CHECK(transition_offset(s, 0.0, {GroundLevel::g12, ExcitedLevel::e12}) == 0.0);
    // excited ladder adds the full excited splitting
    CHECK(transition_offset(s, 0.0, {GroundLevel::g12, ExcitedLevel::e52}) ==
          doctest::Approx(9.4).epsilon(1e-12));
    CHECK(transition_offset(s, 2.0, {GroundLevel::g12, ExcitedLevel::e32}) ==
          doctest::Approx(6.6).epsilon(1e-12));
}

TEST_CASE("offset differences between labels sharing a ground level do not depend on the class") {
    HyperfineScheme s;
    for (double delta : {-31.7, -4.0, 0.0, 2.25, 17.9}) {
        for (auto g : all_ground_levels) {
            const double d12 = transition_offset(s, delta, {g, ExcitedLevel::e12});
            const double d32 = transition_offset(s, delta, {g, ExcitedLevel::e32});
            const double d52 = transition_offset(s, delta, {g, ExcitedLevel::e52});
            CHECK(d32 - d12 == doctest::Approx(s.excited_spacings_mhz[0]).epsilon(1e-12));
            CHECK(d52 - d32 == doctest::Approx(s.excited_spacings_mhz[1]).epsilon(1e-12));
        }
    }
}

TEST_CASE("max pit width") {
    HyperfineScheme s;
    CHECK(max_pit_width(s) == doctest::Approx(18.1).epsilon(1e-12));
    // pit width + excited splitting = ground splitting, exactly
    CHECK(max_pit_width(s) + s.total_excited_splitting_mhz() ==
          doctest::Approx(s.total_ground_splitting_mhz()).epsilon(1e-15));

    HyperfineScheme wide = s;
    wide.ground_spacings_mhz = {20.0, 20.0};
    wide.excited_spacings_mhz = {0.5, 0.5};
    CHECK(max_pit_width(wide) == doctest::Approx(39.0));

    HyperfineScheme bad = s;
    bad.ground_spacings_mhz = {5.0, 5.0};
    bad.excited_spacings_mhz = {6.0, 6.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("afc bandwidth limit is the first excited spacing") {
    HyperfineScheme s;
    CHECK(afc_bandwidth_limit(s) == doctest::Approx(4.6));
    s.excited_spacings_mhz = {3.0, 5.0};
    CHECK(afc_bandwidth_limit(s) == doctest::Approx(3.0));
    s.excited_spacings_mhz = {4.6, 4.8};
    CHECK(afc_bandwidth_limit(s) == doctest::Approx(4.6));
    CHECK(s.total_excited_splitting_mhz() == doctest::Approx(9.4));
}

TEST_CASE("branching ratios normalize per excited level") {
    HyperfineScheme s;
    for (auto e : all_excited_levels) {
        auto br = s.branching_ratios(e);
        CHECK(br[0] + br[1] + br[2] == doctest::Approx(1.0).epsilon(1e-12));
        for (double v : br) CHECK(v > 0.0);
    }
}

TEST_CASE("scheme invariants") {
    HyperfineScheme s;
    CHECK(s.total_ground_splitting_mhz() == doctest::Approx(27.5));
    // strongest transition out of 1/2g goes to 1/2e
    CHECK(s.strength(GroundLevel::g12, ExcitedLevel::e12) >=
          s.strength(GroundLevel::g12, ExcitedLevel::e32));
    CHECK(s.strength(GroundLevel::g12, ExcitedLevel::e12) >=
          s.strength(GroundLevel::g12, ExcitedLevel::e52));
    // the burn-back route transitions: 5/2g->5/2e strong, 5/2e->1/2g weak
    CHECK(s.strength(GroundLevel::g52, ExcitedLevel::e52) > 0.5);
    CHECK(s.strength(GroundLevel::g12, ExcitedLevel::e52) < 0.2);

    HyperfineScheme bad = s;
    bad.oscillator_strengths[0][0] = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("transition label parsing") {
    CHECK(parse_transition_label("3/2g->1/2e") ==
          TransitionLabel{GroundLevel::g32, ExcitedLevel::e12});
    CHECK(parse_transition_label(" 5/2g -> 5/2e ") ==
          TransitionLabel{GroundLevel::g52, ExcitedLevel::e52});
    CHECK(to_string(TransitionLabel{GroundLevel::g12, ExcitedLevel::e32}) == "1/2g->3/2e");
    CHECK_THROWS_AS(parse_transition_label("7/2g->1/2e"), std::invalid_argument);
    CHECK_THROWS_AS(parse_transition_label("1/2g"), std::invalid_argument);
}

TEST_CASE("scheme config loading") {
    std::istringstream in(
        "# test scheme\n"
        "ground_spacings_mhz = 10.0 17.0\n"
        "excited_spacings_mhz = 4.0 5.0\n"
        "excited_lifetime_us = 150\n");
    HyperfineScheme s = load_scheme(in);
    CHECK(s.total_ground_splitting_mhz() == doctest::Approx(27.0));
    CHECK(max_pit_width(s) == doctest::Approx(18.0));
    CHECK(s.excited_lifetime_us == doctest::Approx(150.0));

    std::istringstream bad("ground_spacings_mhz = only_one\n");
    CHECK_THROWS(load_scheme(bad));
}
