#include "glsync/error.hpp"
#include "glsync/format.hpp"
#include "glsync/integrator.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <sstream>

using namespace glsync;

namespace {

double decay_error(double h) {
    std::array<double, 1> s{1.0};
    const auto n = static_cast<int>(std::lround(1.0 / h));
    for (int i = 0; i < n; ++i)
        s = rk4_step<1>([](double, const std::array<double, 1>& u) { return std::array<double, 1>{-u[0]}; },
                        i * h, s, h);
    return std::abs(s[0] - std::exp(-1.0));
}

} // namespace

TEST_CASE("rk4 is fourth order on x' = -x") {
    const double e1 = decay_error(0.1), e2 = decay_error(0.05), e3 = decay_error(0.025);
    CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.025));
    CHECK(std::log2(e2 / e3) == doctest::Approx(4.0).epsilon(0.025));
}

TEST_CASE("rk4 is exact for polynomials up to degree 3 in t") {
    std::array<double, 1> s{0.0};
    auto f = [](double t, const std::array<double, 1>&) { return std::array<double, 1>{3 * t * t}; };
    s = rk4_step<1>(f, 0.0, s, 0.7);
    CHECK(s[0] == doctest::Approx(0.7 * 0.7 * 0.7).epsilon(1e-14));
}

TEST_CASE("rk4 rejects bad steps and non-finite states") {
    std::array<double, 1> s{1.0};
    auto f = [](double, const std::array<double, 1>& u) { return u; };
    CHECK_THROWS_AS(rk4_step<1>(f, 0, s, 0.0), InvalidInput);
    CHECK_THROWS_AS(rk4_step<1>(f, 0, s, -1.0), InvalidInput);
    auto bad = [](double, const std::array<double, 1>&) { return std::array<double, 1>{NAN}; };
    CHECK_THROWS_AS(rk4_step<1>(bad, 0, s, 0.1, 17), IntegrationDiverged);
    try {
        rk4_step<1>(bad, 0, s, 0.1, 17);
    } catch (const IntegrationDiverged& e) {
        CHECK(e.step() == 17);
    }
}

TEST_CASE("SimConfig validation") {
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    c.h = 0;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    c = {};
    c.transient_steps = c.n_steps;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    c = {};
    c.sigma = {2, 0, 0};
    CHECK_THROWS_AS(c.validate(), InvalidInput);
}

TEST_CASE("trajectory shape and time grid") {
    SimConfig c;
    c.n_steps = 100;
    c.transient_steps = 10;
    const auto tr = integrate_coupled(c);
    REQUIRE(tr.size() == 101);
    CHECK(tr.x.front() == c.x0);
    CHECK(tr.y.front() == c.y0);
    CHECK(tr.t(100) == 100 * 0.05); // index * h, no accumulated drift
    for (std::size_t i = 0; i < tr.size(); ++i) CHECK(tr.E[i] == error_vec(c.sigma, tr.x[i], tr.y[i]));

    const auto cut = discard_transient(tr, 10);
    CHECK(cut.size() == 91);
    CHECK(cut.t(0) == tr.t(10));
    CHECK(cut.x[0] == tr.x[10]);
    CHECK_THROWS_AS(discard_transient(tr, 101), InvalidInput);
}

TEST_CASE("master run equals the master half of the coupled run") {
    SimConfig c;
    c.n_steps = 500;
    c.transient_steps = 0;
    const auto m = integrate_master(c);
    const auto cp = integrate_coupled(c);
    CHECK_FALSE(m.coupled());
    for (std::size_t i = 0; i < m.size(); ++i) REQUIRE(m.x[i] == cp.x[i]);
}

TEST_CASE("integration is bit-deterministic") {
    SimConfig c;
    c.n_steps = 3000;
    c.sigma = {1, 1, -1};
    const auto a = integrate_coupled(c), b = integrate_coupled(c);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.E == b.E);
}

TEST_CASE("empty hooks reproduce the plain coupled run") {
    SimConfig c;
    c.n_steps = 800;
    c.transient_steps = 0;
    const auto plain = integrate_coupled(c);
    const auto hooked = integrate_coupled(c, CouplingHooks{});
    CHECK(hooked.traj.x == plain.x);
    CHECK(hooked.traj.y == plain.y);
    REQUIRE(hooked.transmitted.size() == plain.size());
    CHECK(hooked.transmitted[5] == plain.x[5]);
}

TEST_CASE("divergence sentinel trips") {
    SimConfig c;
    c.h = 0.5; // far beyond the stability limit of RK4 on this system
    c.n_steps = 2000;
    c.transient_steps = 0;
    CHECK_THROWS_AS(integrate_master(c), IntegrationDiverged);
}

TEST_CASE("bounds are componentwise maxima") {
    Trajectory t;
    t.x = {{1, -5, 2}, {-3, 4, -7}};
    const auto b = estimate_bounds(t);
    CHECK(b == Bounds{3, 5, 7});
}

TEST_CASE("trajectory CSV round-trips numbers") {
    SimConfig c;
    c.n_steps = 20;
    c.transient_steps = 0;
    const auto tr = integrate_coupled(c);
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,x1,x2,x3,y1,y2,y3,E1,E2,E3");
    int rows = 0;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ls, cell, ',')) v.push_back(parse_double(cell));
        REQUIRE(v.size() == 10);
        CHECK(v[1] == tr.x[static_cast<std::size_t>(rows)][0]);
        CHECK(v[9] == tr.E[static_cast<std::size_t>(rows)][2]);
        ++rows;
    }
    CHECK(rows == 21);
    Trajectory master = integrate_master(c);
    std::ostringstream sink;
    CHECK_THROWS_AS(write_trajectory_csv(sink, master), InvalidInput);
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 123456789.0}) {
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(0.05) == "0.05");
    CHECK(format_double(NAN) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
    CHECK(std::isnan(parse_double("nan")));
    CHECK_THROWS_AS(parse_double("1.0x"), InvalidInput);
    CHECK_THROWS_AS(parse_double(""), InvalidInput);
}
