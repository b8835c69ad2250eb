#include <numbers>
#include <random>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "flyby/netlang.hpp"
#include "support/random_network.hpp"

using namespace flyby;
using Catch::Matchers::ContainsSubstring;

namespace {

constexpr const char* fig2 = R"(# Mach-Zehnder with a rotating object in arm b
mode a b c d e
source a
bs S1 a -> b c
rotor O b
mirror M1 b -> b
mirror M2 c -> c
bs S2 b c -> e d
detect D1 d
detect D2 e
)";

bool has_error(const ParseResult& r, std::size_t line, const std::string& text) {
    for (const auto& d : r.diagnostics)
        if (d.severity == Severity::error && d.line == line && d.message.find(text) != std::string::npos)
            return true;
    return false;
}

} // namespace

TEST_CASE("the Mach-Zehnder document matches the closed form", "[netlang]") {
    for (double omega : {0.0, 1.0, 1.0e6, 3.0e15}) {
        const RotatingBody disk(754.0, 0.05);
        const BeamSource beam(omega);
        const auto r = parse_network(fig2, disk, beam);
        REQUIRE(r.ok());
        CHECK(r.diagnostics.empty());
        const PureState out = propagate(*r.network, unit_state(r.network->source()));
        CHECK(out.approx_equal(mach_zehnder_output(parallel_flyby_shift(disk, beam))));
    }
}

TEST_CASE("phase statements reproduce the closed form", "[netlang]") {
    for (double delta = 0.0; delta < 4.0 * std::numbers::pi; delta += 0.37) {
        std::string text = fig2;
        text.replace(text.find("rotor O b"), 9, "phase O b " + netlang_detail::format_number(delta));
        const auto r = parse_network(text);
        REQUIRE(r.ok());
        REQUIRE(propagate(*r.network, unit_state("a")).approx_equal(mach_zehnder_output(delta)));
    }
}

TEST_CASE("documented errors carry line numbers", "[netlang]") {
    SECTION("empty document") {
        const auto r = parse_network("");
        CHECK_FALSE(r.ok());
        CHECK(has_error(r, 1, "missing source declaration"));
    }
    SECTION("identical splitter outputs") {
        const auto r = parse_network("mode a b\nsource a\nbs X a -> b b\n");
        CHECK(has_error(r, 3, "splitter outputs must differ"));
    }
    SECTION("unknown keyword") {
        const auto r = parse_network("mode a\nsource a\n\nlens L a\n");
        CHECK(has_error(r, 4, "unknown keyword 'lens'"));
        CHECK(r.diagnostics.front().column == 1);
    }
    SECTION("undeclared mode, column points at the token") {
        const auto r = parse_network("mode a b\nsource a\nmirror M a -> q\n");
        REQUIRE(has_error(r, 3, "undeclared mode 'q'"));
        CHECK(r.diagnostics.front().column == 15);
    }
    SECTION("duplicate element name") {
        const auto r = parse_network("mode a b\nsource a\nphase P a 1\nphase P a 2\n");
        CHECK(has_error(r, 4, "duplicate element name 'P'"));
    }
    SECTION("duplicate mode declaration") {
        const auto r = parse_network("mode a b\nmode b\nsource a\n");
        CHECK(has_error(r, 2, "duplicate mode 'b'"));
    }
    SECTION("rotor without body and beam") {
        const auto r = parse_network("mode a\nsource a\nrotor O a\n");
        CHECK(has_error(r, 3, "'rotor' requires a rotating body and beam"));
        CHECK_FALSE(parse_network("mode a\nsource a\nrotor O a\n", RotatingBody(1, 1)).ok());
    }
    SECTION("single-assignment violation names both elements") {
        const auto r = parse_network("mode a b c\nsource a\nbs S1 a -> b c\nmirror M1 b -> c\n");
        REQUIRE(has_error(r, 4, "single-assignment violation"));
        CHECK_THAT(r.diagnostics.front().message, ContainsSubstring("'M1'") && ContainsSubstring("'S1'"));
        CHECK(r.diagnostics.front().column == 16);
    }
    SECTION("bad numeric literal") {
        CHECK(has_error(parse_network("mode a\nsource a\nphase P a 0x10\n"), 3, "invalid numeric literal"));
        CHECK(has_error(parse_network("mode a\nsource a\nphase P a 1e999\n"), 3, "invalid numeric literal"));
        CHECK(has_error(parse_network("mode a\nsource a\nphase P a pi\n"), 3, "invalid numeric literal"));
    }
    SECTION("malformed statements") {
        CHECK(has_error(parse_network("mode a b c\nsource a\nbs S a b c\n"), 3, "'bs' expects"));
        CHECK(has_error(parse_network("mode a b\nsource a\nmirror M a b\n"), 3, "'mirror' expects"));
        CHECK(has_error(parse_network("mode a\nsource a\ndetect D\n"), 3, "'detect' expects"));
        CHECK(has_error(parse_network("mode a\nsource a b\n"), 2, "'source' expects"));
        CHECK(has_error(parse_network("mode 1a\nsource a\n"), 1, "invalid mode name '1a'"));
        CHECK(has_error(parse_network("mode a\nsource a\nsource a\n"), 3, "duplicate source"));
        CHECK(has_error(parse_network("mode a\nsource b\n"), 2, "undeclared mode 'b'"));
    }
    SECTION("all errors are collected in one pass") {
        const auto r = parse_network("mode a b\nsource a\nfoo\nmirror M a -> z\nbs X a -> b b\n");
        CHECK(has_error(r, 3, "unknown keyword"));
        CHECK(has_error(r, 4, "undeclared mode 'z'"));
        CHECK(has_error(r, 5, "splitter outputs must differ"));
    }
}

TEST_CASE("comments, blank lines and CRLF", "[netlang]") {
    const auto r = parse_network("# header\r\nmode a b   # two modes\r\n\r\n\tsource a\r\nbs S a -> a b\r\n"
                                 "detect D1 a\r\ndetect D2 b");
    REQUIRE(r.ok());
    CHECK(r.network->elements().size() == 1);
    CHECK(r.network->detectors().size() == 2);
}

TEST_CASE("warnings do not block parsing", "[netlang]") {
    const auto r = parse_network("mode a b\nsource a\nmirror M a -> b\n");
    REQUIRE(r.ok());
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].severity == Severity::warning);
}

TEST_CASE("format_network", "[netlang]") {
    SECTION("one mode, no elements") {
        const Network net({"a"}, "a", {}, {});
        CHECK(format_network(net) == "mode a\nsource a\n");
    }
    SECTION("canonical Mach-Zehnder text") {
        const Network net = mach_zehnder_preset(RotatingBody(754.0, 0.05), BeamSource(1.0));
        CHECK(format_network(net) == "mode a b c d e\n"
                                     "source a\n"
                                     "bs S1 a -> b c\n"
                                     "rotor O b\n"
                                     "mirror M1 b -> b\n"
                                     "mirror M2 c -> c\n"
                                     "bs S2 b c -> e d\n"
                                     "detect D1 d\n"
                                     "detect D2 e\n");
    }
    SECTION("diagnostic format") {
        CHECK(format_diagnostic({3, 7, "boom", Severity::error}, "x.ifo") == "x.ifo:3:7: error: boom");
    }
}

TEST_CASE("parse and format round-trip", "[netlang][property]") {
    const RotatingBody disk(754.0, 0.05);
    const BeamSource beam(2.9e15);
    std::mt19937_64 rng(314);
    testing::RandomNetworkOptions opt;
    opt.allow_rotors = true;
    opt.body = disk;
    opt.beam = beam;

    auto check_round_trip = [&](const Network& net) {
        const std::string text = format_network(net);
        const auto parsed = parse_network(text, disk, beam);
        REQUIRE(parsed.ok());
        REQUIRE(format_network(*parsed.network) == text);
        const PureState a = propagate(net, unit_state(net.source()));
        const PureState b = propagate(*parsed.network, unit_state(net.source()));
        REQUIRE(a.approx_equal(b));
    };

    check_round_trip(mach_zehnder_preset(disk, beam));
    for (int i = 0; i < 200; ++i)
        check_round_trip(testing::random_network(rng, opt));
}
