#pragma once

#include <string>
#include <vector>

#include "cpscause/event.hpp"
#include "cpscause/model.hpp"
#include "cpscause/trajectory.hpp"

namespace cpscause {

// Fixed-step simulation of a model under one scenario. Compiled once; run() is const
// and may be called concurrently.
class Simulator {
public:
    Simulator(const SystemModel& model, const Scenario& scenario);

    const TimeGrid& grid() const { return grid_; }
    const std::vector<std::string>& variables() const { return names_; }

    // Forced slices replace the target's samples on their interval; dependents see the forced values.
    Trajectory run(const std::vector<TrajectorySlice>& forced = {}) const;
    // Reuses the prefix of `base` (a run with no forcing before the earliest forced sample).
    Trajectory run_from(const Trajectory& base, const std::vector<TrajectorySlice>& forced) const;

private:
    enum class Kind { Input, Ode, Closed, Piecewise };
    struct CompiledBranch {
        bool has_guard = false;
        CompiledCondition guard;
        CompiledExpression then;
    };
    struct Var {
        Kind kind = Kind::Input;
        double init = 0.0;
        CompiledExpression expr;
        std::vector<CompiledBranch> branches;
    };

    // Guards read `prev`; the selected expression reads `cur`.
    double eval_var(const Var& v, const double* prev, double prev_t, const double* cur, double cur_t) const;
    Trajectory simulate(const std::vector<TrajectorySlice>& forced, const Trajectory* base, std::size_t k0) const;

    TimeGrid grid_;
    std::vector<std::string> names_;
    std::vector<Var> vars_;
    std::vector<int> ode_order_;
    std::vector<int> algebraic_order_;
    std::vector<std::vector<double>> inputs_;  // per variable; empty when not an input
    double tol_ = kDefaultTol;
};

Trajectory simulate(const SystemModel& model, const Scenario& scenario,
                    const std::vector<TrajectorySlice>& forced = {});

struct Builtin {
    SystemModel model;
    Scenario scenario;
    std::string phi;
};

// av_running_example, suspension_nominal, suspension_mutant1, suspension_mutant2
Builtin builtin(const std::string& name);
std::vector<std::string> builtin_names();
// Raw JSON document of a builtin (model plus embedded scenario).
std::string builtin_json(const std::string& name);

}  // namespace cpscause
