#include <doctest.h>

#include "cpscause/causal_model.hpp"
#include "cpscause/simulator.hpp"

using namespace cpscause;

namespace {

struct Av {
    Builtin b = builtin("av_running_example");
    Trajectory c = simulate(b.model, b.scenario);
    Trajectory u() const { return project(c, b.model.inputs()); }
    TrajectorySlice brakes(double v) const {
        return Trajectory(c.grid(), {"brakes"}, {std::vector<double>(c.size(), v)});
    }
};

SystemModel two_var(const std::string& a_rhs, const std::string& b_rhs, bool b_ode = false) {
    std::string b = b_ode ? R"({"ode": ")" + b_rhs + R"("})" : "\"" + b_rhs + "\"";
    return model_from_json(R"({"duration": 1, "variables": [{"name": "A"}, {"name": "B", "init": 0}],
        "equations": {"A": ")" + a_rhs + R"(", "B": )" + b + "}}");
}

}  // namespace

TEST_CASE("check_acyclic") {
    Av av;
    CHECK(check_acyclic(av.b.model).ok);
    for (const auto& name : builtin_names()) CHECK(check_acyclic(builtin(name).model).ok);

    AcyclicReport r = check_acyclic(two_var("B", "A"));
    CHECK_FALSE(r.ok);
    CHECK(r.cycle == std::vector<std::string>{"A", "B"});
    CHECK_THROWS_AS(two_var("B", "A").validate(), ContractError);

    // A reads B at the same sample; B integrates A: feedback only across samples.
    CHECK(check_acyclic(two_var("B + 1", "A", true)).ok);
}

TEST_CASE("update filters R and rejects partial assignments to constants") {
    Av av;
    CausalModel m(av.b.model, av.c);
    Trajectory y = simulate(av.b.model, av.b.scenario, {av.brakes(0.8)});
    m = add_trajectory(m, y, {m.key_of(av.brakes(0.8), "brakes")});
    REQUIRE(m.store().size() == 2);

    CausalModel up = update(m, {av.brakes(0.8)});
    REQUIRE(up.store().size() == 1);
    CHECK(same_trajectory(*up.store()[0].trajectory, y));
    CHECK(up.severed().size() == 1);

    CausalModel same = update(m, {});
    CHECK(same.store().size() == 2);
    CHECK(same.severed().empty());

    CHECK_THROWS_AS(update(m, {slice(av.brakes(0.8), TimeInterval(2, 3))}), ContractError);
    TrajectorySlice ped(av.c.grid(), {"pedestrianPosition"}, {std::vector<double>(av.c.size(), 70.0)});
    CHECK_THROWS_AS(update(m, {ped}), ContractError);
}

TEST_CASE("satisfies") {
    Av av;
    CausalModel m(av.b.model, av.c);
    auto phi = EventExpression::parse(av.b.phi);
    CHECK(satisfies(m, av.u(), phi));
    CHECK(satisfies(m, av.u(), CauseEvent{{slice(av.c, "lidarRange", TimeInterval(0, 5)),
                                          slice(av.c, "battery", TimeInterval(3, 7))}}));

    // "The car is still moving somewhere in [8.9,9)" holds in c; with brakes at 0.8 it stopped.
    auto moving = EventExpression::parse("!(speed <=_[8.9,9) 0)");
    CHECK(satisfies(m, av.u(), moving));
    Trajectory y = simulate(av.b.model, av.b.scenario, {av.brakes(0.8)});
    m = add_trajectory(m, y, {m.key_of(av.brakes(0.8), "brakes")});
    CHECK_FALSE(satisfies(update(m, {av.brakes(0.8)}), av.u(), moving));
    CHECK(satisfies(update(m, {av.brakes(0.8)}), av.u(), negate(moving)));
}

TEST_CASE("context and determinism errors") {
    Av av;
    CausalModel m(av.b.model, av.c);
    // No R entry under this intervention.
    CHECK_THROWS_AS(satisfies(update(m, {av.brakes(0.5)}), av.u(), EventExpression::parse(av.b.phi)), ContextError);

    // A context nobody produced.
    Trajectory other_u = av.u();
    auto cols = std::move(Trajectory(other_u)).release_columns();
    for (auto& v : cols[other_u.index_of("pedestrianPosition")]) v = 70;
    Trajectory u2(other_u.grid(), other_u.variables(), cols);
    CHECK_THROWS_AS(resolve_context(m, u2), ContextError);

    // Two different trajectories with the same context and provenance.
    auto ccols = std::move(Trajectory(av.c)).release_columns();
    ccols[av.c.index_of("speed")][5] += 0.5;
    Trajectory twin(av.c.grid(), av.c.variables(), ccols);
    CausalModel two = add_trajectory(m, twin, {});
    CHECK_THROWS_AS(resolve_context(two, av.u()), DeterminismError);
}

TEST_CASE("add_trajectory") {
    Av av;
    CausalModel m(av.b.model, av.c);
    CHECK(add_trajectory(m, av.c).store().size() == 1);
    CHECK(add_trajectory(add_trajectory(m, av.c), av.c).store().size() == 1);

    Trajectory y = simulate(av.b.model, av.b.scenario, {av.brakes(0.8)});
    CHECK(add_trajectory(m, y, {m.key_of(av.brakes(0.8), "brakes")}).store().size() == 2);

    auto cols = std::move(Trajectory(av.c)).release_columns();
    for (auto& v : cols[av.c.index_of("brakes")]) v = 300;
    Trajectory absurd(av.c.grid(), av.c.variables(), cols);
    try {
        add_trajectory(m, absurd);
        FAIL("expected BoundsError");
    } catch (const BoundsError& e) {
        CHECK(e.variable == "brakes");
        CHECK(e.time == 0.0);
    }
}

TEST_CASE("roles") {
    Av av;
    CausalModel m(av.b.model, av.c);
    CHECK(m.endogenous() == std::vector<std::string>{"brakes", "battery", "lidarRange"});
    CHECK(std::find(m.exogenous().begin(), m.exogenous().end(), "speed") != m.exogenous().end());

    SystemModel s = av.b.model;
    CHECK_THROWS_AS(s.set_endogenous({"brakes", "nope"}), DomainError);
    CHECK_THROWS_AS(s.set_endogenous({"pedestrianPosition"}), DomainError);
    s.set_endogenous({"speed"});
    CHECK(s.endogenous() == std::vector<std::string>{"speed"});
}
