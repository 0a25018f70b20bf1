#include <cmath>
#include <sstream>

#include <doctest.h>

#include "cpscause/simulator.hpp"
#include "cpscause/trajectory.hpp"

using namespace cpscause;

namespace {

// battery(t) = 10 - t on [0,10), brakes = 0.2, speed = 10.
Trajectory linear_run() {
    TimeGrid g(0.0, 0.01, 1000);
    std::vector<double> battery(g.count), brakes(g.count, 0.2), speed(g.count, 10.0);
    for (std::size_t k = 0; k < g.count; ++k) battery[k] = 10.0 - g.time(k);
    return Trajectory(g, {"battery", "brakes", "speed"}, {battery, brakes, speed});
}

Trajectory constant(const TimeGrid& g, const std::string& var, double v) {
    return Trajectory(g, {var}, {std::vector<double>(g.count, v)});
}

}  // namespace

TEST_CASE("grid and interval basics") {
    TimeGrid g(0.0, 0.01, 1000);
    CHECK(g.end() == doctest::Approx(10.0));
    CHECK(g.snap(5.0) == 500);
    CHECK(g.snap(5.004) == 500);
    CHECK(g.snap(10.0) == 1000);
    CHECK_THROWS_AS(g.snap(10.02), DomainError);
    CHECK_THROWS_AS(TimeInterval(2.0, 2.0), ContractError);
    CHECK_THROWS_AS(TimeGrid(0.0, 0.0, 10), ContractError);
    TimeGrid h(2.0, 0.01, 100);
    CHECK(h.aligned_with(g));
    CHECK(h.offset_in(g) == 200);
    CHECK_FALSE(TimeGrid(0.005, 0.01, 10).aligned_with(g));
}

TEST_CASE("constructor rejects non-finite samples and bad shapes") {
    TimeGrid g(0.0, 0.01, 3);
    CHECK_THROWS_AS(Trajectory(g, {"x"}, {{1.0, NAN, 2.0}}), ContractError);
    CHECK_THROWS_AS(Trajectory(g, {"x"}, {{1.0, INFINITY, 2.0}}), ContractError);
    CHECK_THROWS_AS(Trajectory(g, {"x"}, {{1.0, 2.0}}), ContractError);
    CHECK_THROWS_AS(Trajectory(g, {"x", "x"}, {{1, 2, 3}, {1, 2, 3}}), ContractError);
}

TEST_CASE("project") {
    Trajectory x = linear_run();
    Trajectory b = project(x, {"battery"});
    CHECK(b.variables() == std::vector<std::string>{"battery"});
    CHECK(b.column("battery") == x.column("battery"));
    CHECK(same_trajectory(project(x, x.variables()), x, 0.0));
    CHECK_THROWS_AS(project(x, {"nope"}), DomainError);

    Builtin av = builtin("av_running_example");
    Trajectory c = simulate(av.model, av.scenario);
    Trajectory brakes = project(c, {"brakes"});
    for (double v : brakes.column("brakes")) CHECK(v == 0.2);
    CHECK(brakes.span() == TimeInterval(0.0, c.grid().end()));
}

TEST_CASE("slice") {
    Trajectory x = linear_run();
    TrajectorySlice s = slice(x, {"battery"}, TimeInterval(4, 6));
    REQUIRE(s.size() == 200);
    CHECK(s.value("battery", 0) == doctest::Approx(6.0));
    CHECK(s.value("battery", 199) == doctest::Approx(4.01));
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(s.value("battery", k) > 4.0);
    CHECK(s.grid().offset_in(x.grid()) == 400);

    CHECK(same_trajectory(slice(x, x.span()), x, 0.0));
    CHECK_THROWS_AS(slice(x, TimeInterval(9, 11)), DomainError);
}

TEST_CASE("equals_on") {
    Trajectory x = linear_run();
    CHECK(equals_on(x, x, TimeInterval(0, 10), 0.0));
    CHECK(equals_on(x, x, TimeInterval(3.5, 3.51), 0.0));

    TimeGrid g(0.0, 0.01, 100);
    const double tol = 1e-6;
    CHECK_FALSE(equals_on(constant(g, "a", 5.0), constant(g, "a", 5.0 + 2 * tol), TimeInterval(0, 1), tol));
    CHECK(equals_on(constant(g, "a", 5.0), constant(g, "a", 5.0 + 0.5 * tol), TimeInterval(0, 1), tol));

    // Misaligned grids, or no shared variable, are caller errors.
    CHECK_THROWS_AS(equals_on(constant(g, "a", 1), constant(TimeGrid(0.005, 0.01, 100), "a", 1), TimeInterval(0.2, 0.5)),
                    ContractError);
    CHECK_THROWS_AS(equals_on(constant(g, "a", 1), constant(g, "b", 1), TimeInterval(0, 1)), ContractError);
}

TEST_CASE("equals_on holds inside an override and fails outside it") {
    Trajectory b = linear_run();
    // Smooth replacement for battery everywhere except [3,7).
    std::vector<TrajectorySlice> outside;
    for (auto iv : {TimeInterval(0, 3), TimeInterval(7, 10)}) {
        IndexRange r = b.range_of(iv);
        TimeGrid sg(b.grid().time(r.begin), b.grid().step, r.size());
        std::vector<double> vals(r.size());
        for (std::size_t k = 0; k < r.size(); ++k) vals[k] = 3.0 + std::sin(sg.time(k));
        outside.emplace_back(sg, std::vector<std::string>{"battery"}, std::vector<std::vector<double>>{vals});
    }
    Trajectory a = override_with(b, outside);
    // Oracle: compare samples directly.
    IndexRange in = b.range_of(TimeInterval(3, 7));
    for (std::size_t k = in.begin; k < in.end; ++k) REQUIRE(a.value("battery", k) == b.value("battery", k));
    CHECK(a.value("battery", 0) == 3.0);
    CHECK(equals_on(a, b, TimeInterval(3, 7)));
    CHECK_FALSE(equals_on(a, b, TimeInterval(2, 7)));
    CHECK_FALSE(equals_on(a, b, TimeInterval(3, 8)));
}

TEST_CASE("is_alternative") {
    TimeGrid g(0.0, 0.01, 1000);
    auto brakes = [&](double v, double hi) { return slice(constant(g, "brakes", v), TimeInterval(0, hi)); };
    CHECK(is_alternative({brakes(0.2, 10)}, {brakes(0.8, 10)}));
    CHECK(is_alternative({brakes(0.8, 10)}, {brakes(0.2, 10)}));
    CHECK_FALSE(is_alternative({brakes(0.2, 10)}, {brakes(0.2, 10)}));
    CHECK_FALSE(is_alternative({brakes(0.2, 5)}, {brakes(0.8, 10)}));
    CHECK_FALSE(is_alternative({brakes(0.2, 10)}, {}));
    // Pairing is by variable and domain, not by position.
    auto lidar = [&](double v) { return slice(constant(g, "lidarRange", v), TimeInterval(0, 5)); };
    CHECK(is_alternative({brakes(0.2, 10), lidar(20)}, {lidar(30), brakes(0.8, 10)}));
    CHECK_FALSE(is_alternative({brakes(0.2, 10), lidar(20)}, {lidar(20), brakes(0.8, 10)}));
}

TEST_CASE("override_with") {
    Trajectory x = linear_run();
    CHECK(same_trajectory(override_with(x, {}), x, 0.0));

    TimeGrid g = x.grid();
    std::set<std::string> constants{"brakes"};
    Trajectory strong = override_with(x, {constant(g, "brakes", 0.8)}, constants);
    for (double v : strong.column("brakes")) CHECK(v == 0.8);
    CHECK_THROWS_AS(override_with(x, {slice(constant(g, "brakes", 0.8), TimeInterval(2, 3))}, constants),
                    ContractError);

    // battery raised on [0,5): unchanged afterwards.
    TrajectorySlice high = slice(constant(g, "battery", 50.0), TimeInterval(0, 5));
    Trajectory y = override_with(x, {high});
    CHECK(y.value("battery", 0) == 50.0);
    CHECK(y.value("battery", 499) == 50.0);
    CHECK(equals_on(y, x, TimeInterval(5, 10), 0.0));
    CHECK(equals_on(y, x, TimeInterval(0, 10)) == false);

    CHECK_THROWS_AS(override_with(x, {slice(constant(g, "ghost", 1), TimeInterval(0, 1))}), DomainError);
    CHECK_THROWS_AS(override_with(x, {high, high}), ContractError);
}

TEST_CASE("csv round trip is exact") {
    Trajectory x = linear_run();
    std::stringstream ss;
    write_csv(ss, x);
    Trajectory y = read_csv(ss);
    CHECK(y.grid().count == x.grid().count);
    CHECK(same_trajectory(x, y, 0.0));

    std::stringstream bad("time,a\n0,1\n0.01,zz\n");
    CHECK_THROWS_AS(read_csv(bad), ParseError);
    std::stringstream uneven("time,a\n0,1\n0.01,2\n0.03,3\n");
    CHECK_THROWS_AS(read_csv(uneven), ParseError);
    CHECK(parse_double(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("slices csv keeps each slice's own interval") {
    Trajectory x = linear_run();
    std::vector<TrajectorySlice> s{slice(x, "battery", TimeInterval(2, 3)), slice(x, "brakes", TimeInterval(0, 10))};
    std::stringstream ss;
    write_slices_csv(ss, x.grid(), s);
    auto back = slices_from_table(read_csv_table(ss));
    REQUIRE(back.size() == 2);
    for (const auto& orig : s) {
        bool found = false;
        for (const auto& b : back)
            if (b.variables() == orig.variables()) {
                found = true;
                CHECK(b.grid().offset_in(x.grid()) == orig.grid().offset_in(x.grid()));
                CHECK(same_trajectory(b, orig, 0.0));
            }
        CHECK(found);
    }
}
