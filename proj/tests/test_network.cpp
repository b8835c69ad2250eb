#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "flyby/network.hpp"
#include "support/random_network.hpp"

using namespace flyby;
using Catch::Matchers::WithinAbs;
using cd = std::complex<double>;

namespace {

constexpr double r2 = 0.70710678118654752440; // 1 / sqrt(2)
constexpr cd I{0.0, 1.0};

bool near(cd x, cd y, double tol = 1e-12) {
    return std::abs(x.real() - y.real()) <= tol && std::abs(x.imag() - y.imag()) <= tol;
}

/// Mach-Zehnder output written out as a product of hand-entered 2x2 blocks
/// over the (b, c) arms and the (e, d) output pair.
std::array<cd, 2> mz_oracle(double delta) {
    // S1: a -> (b + i c)/sqrt2
    const cd b = r2, c = I * r2;
    // O: b -> b e^{i delta}
    const cd b2 = b * std::exp(I * delta);
    // S2 columns: b -> (e + i d)/sqrt2, c -> (d + i e)/sqrt2
    const cd e = r2 * b2 + I * r2 * c;
    const cd d = I * r2 * b2 + r2 * c;
    return {d, e};
}

} // namespace

TEST_CASE("single-input splitter substitution", "[network]") {
    const Element s1 = BeamSplitter{"S1", "a", std::nullopt, "b", "c"};
    const PureState out = apply_element(unit_state("a"), s1);
    CHECK(out.amplitude("a") == cd{});
    CHECK(near(out.amplitude("b"), r2));
    CHECK(near(out.amplitude("c"), I * r2));
}

TEST_CASE("two-input splitter reproduces the closed form", "[network]") {
    const Element s2 = BeamSplitter{"S2", "b", ModeLabel("c"), "e", "d"};
    for (double delta : {0.0, 0.3, 1.0, std::numbers::pi / 2, std::numbers::pi, 4.0, 6.0}) {
        const PureState in{{"b", r2 * std::exp(I * delta)}, {"c", I * r2}};
        const PureState out = apply_element(in, s2);
        const auto oracle = mz_oracle(delta);
        const PureState closed = mach_zehnder_output(delta);
        REQUIRE(near(out.amplitude("d"), oracle[0]));
        REQUIRE(near(out.amplitude("e"), oracle[1]));
        REQUIRE(out.approx_equal(closed));
    }
}

TEST_CASE("mirrors and phase shifters", "[network]") {
    const PureState s{{"a", r2}, {"b", I * r2}};
    CHECK(apply_element(s, PhaseShifter{"P", "a", 0.0}).approx_equal(s, 0.0));
    CHECK(apply_element(s, Mirror{"M", "a", "a"}).approx_equal(s, 0.0));

    const PureState moved = apply_element(s, Mirror{"M", "a", "c"});
    CHECK(moved.amplitude("a") == cd{});
    CHECK(moved.amplitude("c") == cd(r2));

    const PureState shifted = apply_element(s, PhaseShifter{"P", "b", std::numbers::pi / 2});
    CHECK(near(shifted.amplitude("b"), -r2));
    CHECK(near(shifted.amplitude("a"), r2));
}

TEST_CASE("writing over live amplitude is rejected", "[network]") {
    const PureState s{{"a", r2}, {"b", r2}};
    CHECK_THROWS_AS(apply_element(s, Mirror{"M", "a", "b"}), NetworkError);
    CHECK_THROWS_AS(apply_element(s, BeamSplitter{"S", "a", std::nullopt, "b", "c"}), NetworkError);
    // an output that is also an input of the same element is fine
    CHECK_NOTHROW(apply_element(s, BeamSplitter{"S", "a", ModeLabel("b"), "b", "a"}));
}

TEST_CASE("mach_zehnder_output", "[network]") {
    const PureState zero = mach_zehnder_output(0.0);
    CHECK(zero.amplitude("d") == I);
    CHECK(zero.amplitude("e") == cd{});

    const PureState pi = mach_zehnder_output(std::numbers::pi);
    CHECK(near(pi.amplitude("e"), -1.0));
    CHECK(near(pi.amplitude("d"), 0.0));

    const PureState half = mach_zehnder_output(std::numbers::pi / 2);
    CHECK_THAT(std::norm(half.amplitude("d")), WithinAbs(0.5, 1e-15));
    CHECK_THAT(std::norm(half.amplitude("e")), WithinAbs(0.5, 1e-15));
}

TEST_CASE("mach_zehnder_output properties", "[network][property]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 4.0 * std::numbers::pi);
    for (int i = 0; i < 2000; ++i) {
        const double delta = u(rng);
        const PureState psi = mach_zehnder_output(delta);
        const double pd = probability("d", psi);
        const double pe = probability("e", psi);
        REQUIRE_THAT(pd + pe, WithinAbs(1.0, 1e-12));
        const double c = std::cos(delta / 2);
        REQUIRE_THAT(pd, WithinAbs(c * c, 1e-12));
        REQUIRE(psi.approx_equal(mach_zehnder_output(delta + two_pi)));
        const auto oracle = mz_oracle(delta);
        REQUIRE(near(psi.amplitude("d"), oracle[0]));
        REQUIRE(near(psi.amplitude("e"), oracle[1]));
    }
}

TEST_CASE("network validation", "[network]") {
    const std::vector<ModeLabel> modes{"a", "b", "c"};
    CHECK_NOTHROW(Network(modes, "a", {}, {}));
    CHECK_THROWS_AS(Network(modes, "z", {}, {}), NetworkError);
    CHECK_THROWS_AS(Network({"a", "a"}, "a", {}, {}), NetworkError);
    CHECK_THROWS_AS(Network(modes, "a", {Mirror{"M", "a", "q"}}, {}), NetworkError);
    CHECK_THROWS_AS(Network(modes, "a", {BeamSplitter{"S", "a", std::nullopt, "b", "b"}}, {}), NetworkError);
    CHECK_THROWS_AS(Network(modes, "a", {BeamSplitter{"S", "a", ModeLabel("a"), "b", "c"}}, {}), NetworkError);
    CHECK_THROWS_AS(Network(modes, "a", {Mirror{"M", "a", "a"}, Mirror{"M", "a", "a"}}, {}), NetworkError);
    CHECK_THROWS_AS(Network(modes, "a", {PhaseShifter{"P", "a", std::nan("")}}, {}), NetworkError);
    CHECK_THROWS_AS(Network(modes, "a", {}, {{"D1", "a"}, {"D1", "b"}}), NetworkError);
    CHECK_THROWS_AS(Network(modes, "a", {}, {{"D1", "a"}, {"D2", "a"}}), NetworkError);

    SECTION("single assignment names both elements") {
        const auto issues = check_network(
            modes, "a", {BeamSplitter{"S1", "a", std::nullopt, "b", "c"}, Mirror{"M1", "b", "c"}}, {});
        REQUIRE(issues.size() == 1);
        CHECK(issues[0].index == 1);
        CHECK(issues[0].message.find("'M1'") != std::string::npos);
        CHECK(issues[0].message.find("'S1'") != std::string::npos);
    }
    SECTION("the source counts as live") {
        const auto issues = check_network(modes, "a", {Mirror{"M1", "b", "a"}}, {});
        REQUIRE(issues.size() == 1);
        CHECK(issues[0].message.find("'source'") != std::string::npos);
    }
    SECTION("elements on dark modes do not make them live") {
        CHECK(check_network(modes, "a", {PhaseShifter{"P", "b", 1.0}, Mirror{"M1", "a", "b"}}, {}).empty());
        CHECK(check_network(modes, "a", {Mirror{"M0", "c", "b"}, Mirror{"M1", "a", "b"}}, {}).empty());
        const auto issues = check_network(modes, "a", {PhaseShifter{"P", "a", 1.0}, Mirror{"M1", "b", "a"}}, {});
        REQUIRE(issues.size() == 1);
        CHECK(issues[0].message.find("'P'") != std::string::npos);
    }
}

TEST_CASE("propagate", "[network]") {
    SECTION("empty element list leaves the state unchanged") {
        const Network net({"a", "b"}, "a", {}, {});
        const PureState s{{"a", r2}, {"b", -r2}};
        CHECK(propagate(net, s).approx_equal(s, 0.0));
    }
    SECTION("zero rotation sends everything to d") {
        const Network net = mach_zehnder_preset(RotatingBody(0.0, 0.05), BeamSource(3e15));
        CHECK_THAT(probability("d", propagate(net, unit_state("a"))), WithinAbs(1.0, 1e-15));
    }
    SECTION("preset matches the closed form for arbitrary phases") {
        for (double delta = -7.0; delta < 14.0; delta += 0.173) {
            const Network net = mach_zehnder_network(delta);
            REQUIRE(propagate(net, unit_state("a")).approx_equal(mach_zehnder_output(delta)));
        }
    }
    SECTION("phase pi/2 splits evenly") {
        const PureState out = propagate(mach_zehnder_network(std::numbers::pi / 2), unit_state("a"));
        const double c = std::cos(std::numbers::pi / 4);
        CHECK_THAT(probability("d", out), WithinAbs(c * c, 1e-15));
    }
    SECTION("rotor phase is the parallel flyby shift") {
        const RotatingBody disk(754.0, 0.05);
        const BeamSource beam(1.0);
        const PureState out = propagate(mach_zehnder_preset(disk, beam), unit_state("a"));
        CHECK(out.approx_equal(mach_zehnder_output(parallel_flyby_shift(disk, beam))));
    }
    SECTION("initial amplitude on undeclared modes is rejected") {
        const Network net({"a"}, "a", {}, {});
        CHECK_THROWS_AS(propagate(net, unit_state("zz")), NetworkError);
    }
    SECTION("runtime overwrite errors name the element") {
        const Network net({"a", "b"}, "a", {Mirror{"M7", "a", "b"}}, {});
        const PureState both{{"a", r2}, {"b", r2}};
        CHECK_THROWS_WITH(propagate(net, both), Catch::Matchers::ContainsSubstring("M7"));
    }
}

TEST_CASE("compose_unitary", "[network]") {
    SECTION("empty network is the identity") {
        const Network net({"a", "b", "c"}, "a", {}, {});
        CHECK(compose_unitary(net).isApprox(TransferMatrix::Identity(3, 3), 0.0));
    }
    SECTION("single splitter is the 2x2 block embedded in the identity") {
        const Network net({"x", "a", "b"}, "a", {BeamSplitter{"S", "a", ModeLabel("b"), "a", "b"}}, {});
        TransferMatrix expected = TransferMatrix::Identity(3, 3);
        expected(1, 1) = r2;
        expected(1, 2) = I * r2;
        expected(2, 1) = I * r2;
        expected(2, 2) = r2;
        CHECK((compose_unitary(net) - expected).cwiseAbs().maxCoeff() < 1e-15);
    }
    SECTION("single-input splitter column") {
        const Network net({"a", "b", "c"}, "a", {BeamSplitter{"S", "a", std::nullopt, "b", "c"}}, {});
        const TransferMatrix m = compose_unitary(net);
        CHECK(near(m(0, 0), 0.0));
        CHECK(near(m(1, 0), r2));
        CHECK(near(m(2, 0), I * r2));
    }
    SECTION("Mach-Zehnder preset agrees with propagate") {
        const Network net = mach_zehnder_preset(RotatingBody(754.0, 0.05), BeamSource(2.0e6));
        const TransferMatrix m = compose_unitary(net);
        const auto v = apply_matrix(net, m, unit_state("a"));
        const PureState out = propagate(net, unit_state("a"));
        for (std::size_t k = 0; k < net.modes().size(); ++k)
            REQUIRE(near(v(static_cast<Eigen::Index>(k)), out.amplitude(net.modes()[k])));
    }
}

TEST_CASE("fuzzed networks: norm preservation and oracle equivalence", "[network][property]") {
    std::mt19937_64 rng(99);
    testing::RandomNetworkOptions opt;
    opt.allow_rotors = true;
    opt.body = RotatingBody(754.0, 0.05);
    opt.beam = BeamSource(3.0e15);
    for (int trial = 0; trial < 1000; ++trial) {
        const Network net = testing::random_network(rng, opt);
        const PureState out = propagate(net, unit_state(net.source()));
        REQUIRE_THAT(out.norm_squared(), WithinAbs(1.0, 1e-9));

        const TransferMatrix m = compose_unitary(net);
        const TransferMatrix defect = m.adjoint() * m - TransferMatrix::Identity(m.rows(), m.cols());
        REQUIRE(defect.cwiseAbs().maxCoeff() < 1e-9);
        const auto v = apply_matrix(net, m, unit_state(net.source()));
        for (std::size_t k = 0; k < net.modes().size(); ++k)
            REQUIRE(near(v(static_cast<Eigen::Index>(k)), out.amplitude(net.modes()[k])));
    }
}

TEST_CASE("rotor rebinding and phase override", "[network]") {
    const Network net = mach_zehnder_preset(RotatingBody(0.0, 1.0), BeamSource(1.0));
    CHECK(has_rotor(net));
    const Network overridden = override_rotor_phase(net, std::numbers::pi);
    CHECK_FALSE(has_rotor(overridden));
    CHECK_THAT(probability("e", propagate(overridden, unit_state("a"))), WithinAbs(1.0, 1e-15));
    CHECK_THROWS_AS(override_rotor_phase(overridden, 1.0), NetworkError);

    const RotatingBody disk(754.0, 0.05);
    const Network rebound = rebind_rotors(net, disk, BeamSource(5.0));
    CHECK(propagate(rebound, unit_state("a"))
              .approx_equal(propagate(mach_zehnder_preset(disk, BeamSource(5.0)), unit_state("a"))));
}

TEST_CASE("michelson extrapolation doubles the rotor phase", "[network]") {
    const RotatingBody disk(754.0, 0.05);
    const BeamSource beam(1.0e6);
    const Network net = michelson_preset(disk, beam, Extrapolation{});
    const PureState out = propagate(net, unit_state("a"));
    CHECK(out.approx_equal(mach_zehnder_output(2.0 * parallel_flyby_shift(disk, beam)), 1e-9));
    CHECK_NOTHROW(compose_unitary(net));
}
