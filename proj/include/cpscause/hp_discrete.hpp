#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace cpscause {

using DiscreteValuation = std::map<std::string, int>;

struct DiscreteVariable {
    std::string name;
    std::vector<int> range;
};

struct DiscreteModel {
    std::vector<DiscreteVariable> exogenous;
    std::vector<DiscreteVariable> endogenous;
    std::map<std::string, std::vector<std::string>> parents;
    std::map<std::string, std::function<int(const DiscreteValuation&)>> functions;

    const DiscreteVariable& variable(const std::string& name) const;
    // Endogenous variables in an order where parents come first; throws on cycles.
    std::vector<std::string> topological_order() const;
};

// {"exogenous":[{"name","range"}], "endogenous":[{"name","range","parents",
//   "table":{"p1,p2": v, ...}} | {"name","range","parents","expr": "..."}]}
DiscreteModel discrete_model_from_json(const std::string& text);

// Two vehicles and a pedestrian: AT/BT are the turns, AH/BH/PH the hits.
DiscreteModel at_bt_model();

// Conjunction of X = x atoms.
struct DiscreteEvent {
    DiscreteValuation atoms;
    bool negated = false;
    bool eval(const DiscreteValuation& v) const;
};

DiscreteValuation evaluate(const DiscreteModel& m, const DiscreteValuation& u,
                           const DiscreteValuation& interventions = {});

struct DiscreteCauseResult {
    bool ac1 = false;
    bool ac2 = false;
    bool ac3 = false;
    bool is_cause() const { return ac1 && ac2 && ac3; }
    std::vector<std::string> W;
    DiscreteValuation w;
    DiscreteValuation x_prime;
};

// Exhaustive check. Contingencies are frozen at actual values; W is enumerated by
// increasing size, then in declaration order, and the first witness wins.
DiscreteCauseResult is_cause_discrete(const DiscreteModel& m, const DiscreteValuation& u, const DiscreteValuation& x,
                                      const DiscreteEvent& phi);

// AC2 alone, exposed for cross-checking.
bool discrete_ac2(const DiscreteModel& m, const DiscreteValuation& u, const DiscreteValuation& x,
                  const DiscreteEvent& phi, DiscreteCauseResult* witness = nullptr);

}  // namespace cpscause
