#include <doctest.h>

#include "cpscause/errors.hpp"
#include "cpscause/hp_discrete.hpp"

using namespace cpscause;

namespace {

const DiscreteEvent kHit{{{"PH", 1}}, false};

DiscreteValuation ctx(int a, int b) { return {{"uA", a}, {"uB", b}}; }

// Same model as at_bt_model(), once as truth tables and once as expressions.
const char* kTables = R"json({
  "exogenous": [{"name": "uA", "range": [0, 1]}, {"name": "uB", "range": [0, 1]}],
  "endogenous": [
    {"name": "AT", "range": [0, 1], "parents": ["uA"], "table": {"0": 0, "1": 1}},
    {"name": "BT", "range": [0, 1], "parents": ["uB"], "table": {"0": 0, "1": 1}},
    {"name": "AH", "range": [0, 1], "parents": ["AT"], "table": {"0": 1, "1": 0}},
    {"name": "BH", "range": [0, 1], "parents": ["AT", "BT"], "table": {"0,0": 0, "0,1": 0, "1,0": 1, "1,1": 0}},
    {"name": "PH", "range": [0, 1], "parents": ["AH", "BH"], "table": {"0,0": 0, "0,1": 1, "1,0": 1, "1,1": 1}}
  ]})json";

const char* kExprs = R"json({
  "exogenous": [{"name": "uA", "range": [0, 1]}, {"name": "uB", "range": [0, 1]}],
  "endogenous": [
    {"name": "AT", "range": [0, 1], "parents": ["uA"], "expr": "uA"},
    {"name": "BT", "range": [0, 1], "parents": ["uB"], "expr": "uB"},
    {"name": "AH", "range": [0, 1], "parents": ["AT"], "expr": "1 - AT"},
    {"name": "BH", "range": [0, 1], "parents": ["AT", "BT"], "expr": "AT * (1 - BT)"},
    {"name": "PH", "range": [0, 1], "parents": ["AH", "BH"], "expr": "AH + BH - AH * BH"}
  ]})json";

}  // namespace

TEST_CASE("evaluate") {
    DiscreteModel m = at_bt_model();
    DiscreteValuation v = evaluate(m, ctx(0, 0));
    CHECK(v.at("AT") == 0);
    CHECK(v.at("BT") == 0);
    CHECK(v.at("AH") == 1);
    CHECK(v.at("BH") == 0);
    CHECK(v.at("PH") == 1);
    CHECK(evaluate(m, ctx(1, 1)).at("PH") == 0);
    CHECK(evaluate(m, ctx(1, 0)).at("BH") == 1);
    CHECK(evaluate(m, ctx(1, 0)).at("PH") == 1);
    // Interventions override equations.
    CHECK(evaluate(m, ctx(0, 0), {{"AT", 1}}).at("BH") == 1);
    CHECK(evaluate(m, ctx(0, 0), {{"AT", 1}, {"BH", 0}}).at("PH") == 0);
}

TEST_CASE("verdicts for the three classic candidates") {
    DiscreteModel m = at_bt_model();
    auto a = is_cause_discrete(m, ctx(0, 0), {{"AT", 0}}, kHit);
    CHECK(a.is_cause());
    CHECK(a.W == std::vector<std::string>{"BH"});
    CHECK(a.w == DiscreteValuation{{"BH", 0}});
    CHECK(a.x_prime == DiscreteValuation{{"AT", 1}});

    auto b = is_cause_discrete(m, ctx(0, 0), {{"BT", 1}}, kHit);
    CHECK_FALSE(b.ac1);
    CHECK_FALSE(b.is_cause());

    auto ab = is_cause_discrete(m, ctx(0, 0), {{"AT", 0}, {"BT", 0}}, kHit);
    CHECK(ab.ac1);
    CHECK(ab.ac2);
    CHECK_FALSE(ab.ac3);
}

TEST_CASE("json models match the built-in one on every context and intervention") {
    DiscreteModel ref = at_bt_model();
    for (const char* text : {kTables, kExprs}) {
        DiscreteModel m = discrete_model_from_json(text);
        for (int a = 0; a <= 1; ++a)
            for (int b = 0; b <= 1; ++b) {
                CHECK(evaluate(m, ctx(a, b)) == evaluate(ref, ctx(a, b)));
                for (const auto& var : {"AT", "BT", "AH", "BH"})
                    for (int val = 0; val <= 1; ++val)
                        CHECK(evaluate(m, ctx(a, b), {{var, val}}) == evaluate(ref, ctx(a, b), {{var, val}}));
            }
    }
}

TEST_CASE("every cause re-verifies and singletons are minimal") {
    DiscreteModel m = at_bt_model();
    std::vector<std::string> names{"AT", "BT", "AH", "BH", "PH"};
    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b) {
            DiscreteValuation actual = evaluate(m, ctx(a, b));
            for (std::size_t i = 0; i < names.size(); ++i)
                for (std::size_t j = i; j < names.size(); ++j) {
                    DiscreteValuation x{{names[i], actual.at(names[i])}, {names[j], actual.at(names[j])}};
                    auto r = is_cause_discrete(m, ctx(a, b), x, kHit);
                    if (x.size() == 1 && r.ac1 && r.ac2) CHECK(r.ac3);
                    if (!r.is_cause()) continue;
                    // AC1 again: actual world agrees with x and the effect.
                    CHECK(kHit.eval(actual));
                    // AC2 again: the witness flips the effect.
                    DiscreteValuation iv = r.w;
                    iv.insert(r.x_prime.begin(), r.x_prime.end());
                    CHECK(evaluate(m, ctx(a, b), iv).at("PH") == 0);
                    for (const auto& [n, v] : r.w) CHECK(actual.at(n) == v);
                }
        }
}

TEST_CASE("errors") {
    DiscreteModel m = at_bt_model();
    CHECK_THROWS_AS(is_cause_discrete(m, ctx(0, 0), {{"uA", 0}}, kHit), ContractError);
    CHECK_THROWS_AS(is_cause_discrete(m, ctx(0, 0), {}, kHit), ContractError);
    CHECK_THROWS_AS(discrete_model_from_json("{"), ParseError);
    CHECK_THROWS_AS(discrete_model_from_json(R"({"exogenous": [], "endogenous": [
        {"name": "A", "range": [0, 1], "parents": ["B"], "expr": "B"},
        {"name": "B", "range": [0, 1], "parents": ["A"], "expr": "A"}]})"),
                    ContractError);
}
