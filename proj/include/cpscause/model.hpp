#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cpscause/event.hpp"
#include "cpscause/expression.hpp"
#include "cpscause/trajectory.hpp"

namespace cpscause {

enum class Role { Endogenous, Exogenous };

struct VariableSpec {
    std::string name;
    Role role = Role::Endogenous;
    double min = -1e300;
    double max = 1e300;
    bool is_constant = false;
    std::optional<double> init;  // ODE initial state / piecewise pre-state
};

struct Branch {
    std::optional<EventExpression> when;  // nullopt: else-branch
    Expression then;
};

// Either a single expression or a guarded list. Guards read the previous sample.
struct RightHandSide {
    Expression expr;
    std::vector<Branch> branches;
    bool piecewise() const { return !branches.empty(); }
};

struct StructuralEquation {
    std::string target;
    bool ode = false;  // rhs is the derivative, integrated by forward Euler
    RightHandSide rhs;

    // Variables read at the same sample (closed-form and piecewise results).
    std::set<std::string> same_slice_refs() const;
    // Variables read from the previous sample (ODE right-hand sides and guards).
    std::set<std::string> backward_refs() const;
};

struct SystemModel {
    std::string name;
    std::vector<VariableSpec> variables;
    std::map<std::string, StructuralEquation> equations;
    double duration = 10.0;
    double dt = kDefaultDt;
    std::string phi;  // optional default effect

    const VariableSpec& spec(const std::string& name) const;
    VariableSpec* find(const std::string& name);
    bool has(const std::string& name) const;
    std::vector<std::string> names() const;
    // Variables with no equation: supplied by the scenario.
    std::vector<std::string> inputs() const;
    std::vector<std::string> endogenous() const;
    std::vector<std::string> exogenous() const;
    std::set<std::string> constants() const;
    std::size_t sample_count() const;
    TimeGrid grid() const;

    // Structural checks: names, bounds, references, roles. Throws ContractError.
    void validate() const;
    // Overrides declared roles; every listed name becomes endogenous, all others exogenous.
    void set_endogenous(const std::vector<std::string>& names);
};

// Exogenous inputs: closed forms in `t`, or a trajectory on the model grid.
struct Scenario {
    std::map<std::string, Expression> equations;
    std::optional<Trajectory> trajectory;
};

struct AcyclicReport {
    bool ok = true;
    std::vector<std::string> cycle;
};
AcyclicReport check_acyclic(const SystemModel& m);

// ---- JSON ----------------------------------------------------------------

SystemModel model_from_json(const std::string& text);
std::string model_to_json(const SystemModel& m);
// Reads "scenario" from a model document if present.
std::optional<Scenario> embedded_scenario(const std::string& model_text);
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);

// `path` ending in .csv is read as an input trajectory, anything else as JSON.
Scenario load_scenario(const std::string& path, double dt);
std::string read_text_file(const std::string& path);

}  // namespace cpscause
