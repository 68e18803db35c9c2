#include "glsync/stability.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace glsync;

TEST_CASE("condition (i) is a > 0 in both forms") {
    const Bounds b{21, 30, 21};
    const auto s = conditions_symbolic(params_from_k(0.5), b);
    const auto k = conditions_k_poly(0.5, b);
    CHECK(s[0].holds);
    CHECK(s[0].margin == doctest::Approx(params_from_k(0.5).a));
    CHECK(k[0].margin == doctest::Approx(s[0].margin));
}

TEST_CASE("condition (ii) margins at k = 0.5, P = 21") {
    const Bounds b{21, 30, 21};
    const auto k = conditions_k_poly(0.5, b);
    CHECK(k[1].margin == doctest::Approx(422.535 - 441).epsilon(1e-9));
    CHECK_FALSE(k[1].holds);
    const auto s = conditions_symbolic(params_from_k(0.5), b);
    CHECK(s[1].margin == doctest::Approx(237.28 - 441).epsilon(2e-4));
}

TEST_CASE("symbolic condition (ii) by hand") {
    const auto p = GlsParams::from_coefficients(2, 3, -1, 0.5);
    const auto s = conditions_symbolic(p, {1, 1, 1});
    // 4 + 9 - 2*2*(3+1) - 2*0.5 - 1 = -5
    CHECK(s[1].margin == doctest::Approx(-5.0));
}

TEST_CASE("worst-case check: printed and flow-consistent Q coincide when P = 0") {
    // The two forms differ only through sigma3 * x3.
    const auto p = params_from_k(0.5);
    const auto a = pd_check_worstcase(p, {1, 1, 1}, {5, 5, 0}, QForm::printed);
    const auto b = pd_check_worstcase(p, {1, 1, 1}, {5, 5, 0}, QForm::flow_consistent);
    CHECK(a.holds == b.holds);
    CHECK(a.min_minor == doctest::Approx(b.min_minor));
}

TEST_CASE("larger bounds never improve the worst case") {
    const auto p = params_from_k(0.5);
    const auto small = pd_check_worstcase(p, {1, 1, 1}, {1, 1, 1}, QForm::flow_consistent);
    const auto large = pd_check_worstcase(p, {1, 1, 1}, {21, 30, 21}, QForm::flow_consistent);
    CHECK(large.min_minor <= small.min_minor);
    CHECK_FALSE(large.holds);
}

TEST_CASE("report with a bounds override skips integration") {
    SimConfig c;
    c.n_steps = 1; // far too short to estimate anything; must not matter
    c.transient_steps = 0;
    const auto r = stability_report(c, Bounds{21, 30, 21});
    CHECK_FALSE(r.bounds_simulated);
    CHECK(r.bounds == Bounds{21, 30, 21});
    const auto j = nlohmann::json::parse(to_json(r));
    CHECK(j["bounds_source"] == "override");
    CHECK(j.contains("symbolic"));
    CHECK(j.contains("k_poly"));
    CHECK(j["k"] == 0.5);
}

TEST_CASE("report at k = 0 from a simulation") {
    SimConfig c;
    c.k = 0.0;
    c.n_steps = 8000;
    const auto r = stability_report(c);
    CHECK(r.bounds_simulated);
    CHECK(r.bounds.M > 5);
    CHECK(r.bounds.P > 20);
    CHECK(to_json(r) == to_json(stability_report(c)));
}
