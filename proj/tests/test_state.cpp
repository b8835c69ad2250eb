#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "flyby/network.hpp"
#include "flyby/state.hpp"

using namespace flyby;
using Catch::Matchers::WithinAbs;

TEST_CASE("mode labels", "[state]") {
    CHECK_NOTHROW(ModeLabel("a"));
    CHECK_NOTHROW(ModeLabel("arm_2"));
    CHECK_THROWS_AS(ModeLabel(""), InvalidArgument);
    CHECK_THROWS_AS(ModeLabel("2a"), InvalidArgument);
    CHECK_THROWS_AS(ModeLabel("a-b"), InvalidArgument);
    CHECK_THROWS_AS(ModeLabel("_a"), InvalidArgument);
}

TEST_CASE("unit_state", "[state]") {
    const PureState a = unit_state("a");
    CHECK(a.amplitude("a") == Amplitude(1.0, 0.0));
    CHECK(a.amplitudes().size() == 1);
    for (const char* m : {"a", "b", "xyz"}) {
        CHECK(unit_state(m).norm_squared() == 1.0);
        CHECK(overlap(m, unit_state(m)) == Amplitude(1.0, 0.0));
    }
    CHECK(overlap("x", unit_state("y")) == Amplitude{});
    CHECK(probability("x", unit_state("y")) == 0.0);
}

TEST_CASE("normalization is enforced", "[state]") {
    CHECK_THROWS_AS((PureState{{"a", 1.0}, {"b", 1.0}}), NumericalError);
    CHECK_THROWS_AS(PureState(PureState::Map{}), NumericalError);
    CHECK_THROWS_AS((PureState{{"a", Amplitude(std::nan(""), 0.0)}}), NumericalError);
    CHECK_NOTHROW((PureState{{"a", std::numbers::inv_sqrt3}, {"b", Amplitude(0, std::numbers::sqrt2 / std::numbers::sqrt3)}}));
    // zero entries are dropped
    const PureState s{{"a", 1.0}, {"b", 0.0}};
    CHECK(s.amplitudes().size() == 1);
}

TEST_CASE("overlap and probability on the Mach-Zehnder output", "[state]") {
    CHECK(overlap("d", mach_zehnder_output(0.0)) == Amplitude(0.0, 1.0));
    CHECK(overlap("e", mach_zehnder_output(0.0)) == Amplitude{});
    CHECK(probability("d", mach_zehnder_output(0.0)) == 1.0);
    CHECK_THAT(probability("e", mach_zehnder_output(std::numbers::pi)), WithinAbs(1.0, 1e-15));
    // |i (e^{i pi/2} + 1) / 2|^2 = |(-1 + i) / 2|^2 = 1/2
    CHECK_THAT(probability("d", mach_zehnder_output(std::numbers::pi / 2)), WithinAbs(0.5, 1e-15));
}

TEST_CASE("probabilities sum to one and ignore global phase", "[state][property]") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> ph(-10.0, 10.0);
    for (int trial = 0; trial < 500; ++trial) {
        PureState::Map m;
        const int n = 1 + trial % 6;
        double norm = 0.0;
        for (int k = 0; k < n; ++k) {
            Amplitude a(g(rng), g(rng));
            m.emplace("m" + std::to_string(k), a);
            norm += std::norm(a);
        }
        for (auto& [mode, a] : m)
            a /= std::sqrt(norm);
        const PureState s(m);

        double total = 0.0;
        for (const auto& [mode, a] : s)
            total += probability(mode, s);
        REQUIRE_THAT(total, WithinAbs(1.0, 1e-9));

        const Amplitude global = std::polar(1.0, ph(rng));
        PureState::Map rotated = s.amplitudes();
        for (auto& [mode, a] : rotated)
            a *= global;
        const PureState r(rotated);
        for (const auto& [mode, a] : s)
            REQUIRE_THAT(probability(mode, r), WithinAbs(probability(mode, s), 1e-15));
    }
}

TEST_CASE("approx_equal uses a componentwise absolute tolerance", "[state]") {
    const PureState a{{"a", 1.0}};
    const PureState b{{"a", Amplitude(1.0, 5e-13)}};
    const PureState c{{"a", Amplitude(1.0, 5e-12)}};
    CHECK(a.approx_equal(b));
    CHECK_FALSE(a.approx_equal(c));
    CHECK_FALSE(a.approx_equal(unit_state("b")));
}
