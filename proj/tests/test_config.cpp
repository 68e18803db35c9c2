#include "glsync/config.hpp"
#include "glsync/error.hpp"

#include <doctest.h>

using namespace glsync;

namespace {

ConfigError config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected ConfigError");
    return ConfigError(0, "", "");
}

} // namespace

TEST_CASE("empty text gives the defaults") {
    CHECK(parse_config("") == RunConfig{});
    CHECK(parse_config("# only a comment\n\n") == RunConfig{});
}

TEST_CASE("defaults round-trip through canonical text") {
    const RunConfig d;
    CHECK(parse_config(to_text(d)) == d);
    CHECK(to_text(parse_config(to_text(d))) == to_text(d));
}

TEST_CASE("a fully populated config round-trips") {
    RunConfig c;
    c.sim.h = 0.01;
    c.sim.n_steps = 1234;
    c.sim.transient_steps = 17;
    c.sim.k = 0.1 + 0.2; // not exactly 0.3
    c.sim.x0 = {1.0 / 3.0, -2, 1e-300};
    c.sim.y0 = {0, 0, 7};
    c.sim.sigma = {-1, 0.25, 0.7};
    c.sim.terms = ControlTerms{}.without(ControlTerms::uc2).without(ControlTerms::ub3);
    c.convergence_eps = 1e-6;
    c.preset = SweepPreset::literal;
    c.grid = Grid{0, 1, 0.1};
    c.case_id = 4;
    c.regime = Regime::positive;
    c.amplitude = 0.02;
    c.offset = 0.5;
    c.injection = Injection::mask;
    c.bands[1] = Band{1.15, 1.25};
    c.bounds = Bounds{21, 30, 21};
    const auto text = to_text(c);
    CHECK(parse_config(text) == c);
    CHECK(text.find("control_terms = ua1,ub1,uc1,ua2,ub2,ua3") != std::string::npos);
}

TEST_CASE("comments, whitespace and partial sections") {
    const auto c = parse_config("  [sim]  \n  h=0.02   # finer\nk = 1\n[comms]\nregime = zero\n");
    CHECK(c.sim.h == 0.02);
    CHECK(c.sim.k == 1.0);
    CHECK(c.regime == Regime::zero);
    CHECK(c.sim.n_steps == SimConfig{}.n_steps);
}

TEST_CASE("errors carry line and key") {
    auto e = config_error("[sim]\nk = 0.5\nh = -0.1\n");
    CHECK(e.line() == 3);
    CHECK(e.key() == "h");
    CHECK(std::string(e.what()).find("'h'") != std::string::npos);

    e = config_error("[sim]\nh = 0\n");
    CHECK(e.key() == "h");

    e = config_error("[sim]\nbogus = 1\n");
    CHECK(e.line() == 2);
    CHECK(e.key() == "bogus");

    e = config_error("[nowhere]\n");
    CHECK(e.line() == 1);

    e = config_error("h = 0.05\n");
    CHECK(e.key() == "h");

    e = config_error("[sim]\nh = 0.05\nh = 0.05\n");
    CHECK(e.line() == 3);

    e = config_error("[sim]\nx0 = 1,2\n");
    CHECK(e.key() == "x0");

    e = config_error("[sim]\nn_steps = 10\ntransient_steps = 10\n");
    CHECK(e.key() == "transient_steps");
    CHECK(e.line() == 3);

    e = config_error("[sigma]\ns3 = 1.5\n");
    CHECK(e.key() == "s3");

    e = config_error("[sigma]\ngrid = 1:0:0.1\n");
    CHECK(e.key() == "grid");

    e = config_error("[comms]\ncase = 9\n");
    CHECK(e.key() == "case");

    e = config_error("[sim]\ncontrol_terms = ua1,zz\n");
    CHECK(e.key() == "control_terms");

    e = config_error("[sim\n");
    CHECK(e.line() == 1);
}

TEST_CASE("grid helpers") {
    CHECK(parse_grid("-1:1:0.2") == Grid{-1, 1, 0.2});
    CHECK_THROWS_AS(parse_grid("0:1"), InvalidInput);
    CHECK_THROWS_AS(parse_grid("1:0:0.5"), InvalidInput);
    CHECK(default_grid(SweepPreset::literal) == Grid{0, 1, 0.2});
    CHECK(default_grid(SweepPreset::figure) == Grid{-1, 1, 0.2});
}

TEST_CASE("comms section maps onto the pipeline config") {
    const auto c = parse_config("[comms]\ncase = 2\nregime = positive\namplitude = 0.03\noffset = 0.1\n"
                                "injection = drive\nband3 = 3.4,3.6\n");
    const auto cc = comms_config(c);
    CHECK(cc.messages[2].freq == 3.5);
    CHECK(cc.messages[0].amplitude == 0.03);
    CHECK(cc.messages[1].offset == 0.1);
    CHECK(cc.injection == Injection::drive);
    CHECK(cc.band(2) == Band{3.4, 3.6});
    CHECK(cc.sim.sigma == regime_sigma(Regime::positive));
}

TEST_CASE("load_config reports unreadable files as IO errors") {
    CHECK_THROWS_AS(load_config("/nonexistent/glsync.cfg"), IoError);
}
