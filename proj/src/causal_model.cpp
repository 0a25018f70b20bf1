#include "cpscause/causal_model.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace cpscause {

AcyclicReport check_acyclic(const SystemModel& m) {
    // Nodes are variables; an edge a -> b means a reads b in the same slice.
    // Reads of the previous sample point backwards in time and cannot close a cycle.
    std::map<std::string, std::vector<std::string>> edges;
    for (const auto& [name, eq] : m.equations)
        for (const auto& r : eq.same_slice_refs())
            if (m.equations.count(r)) edges[name].push_back(r);

    std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
    std::vector<std::string> stack;
    AcyclicReport report;
    std::function<bool(const std::string&)> dfs = [&](const std::string& v) {
        state[v] = 1;
        stack.push_back(v);
        for (const auto& w : edges[v]) {
            if (state[w] == 1) {
                auto it = std::find(stack.begin(), stack.end(), w);
                report.cycle.assign(it, stack.end());
                return false;
            }
            if (state[w] == 0 && !dfs(w)) return false;
        }
        stack.pop_back();
        state[v] = 2;
        return true;
    };
    for (const auto& [name, eq] : m.equations) {
        if (state[name] == 0 && !dfs(name)) {
            report.ok = false;
            std::sort(report.cycle.begin(), report.cycle.end());
            return report;
        }
    }
    return report;
}

void check_bounds(const SystemModel& system, const Trajectory& t, double tol) {
    for (const auto& v : system.variables) {
        if (!t.has(v.name)) continue;
        const auto& col = t.column(v.name);
        for (std::size_t k = 0; k < col.size(); ++k)
            if (col[k] < v.min - tol || col[k] > v.max + tol) throw BoundsError(v.name, t.grid().time(k), col[k]);
    }
}

CausalModel::CausalModel(SystemModel system, const Trajectory& c, double tol)
    : system_(std::move(system)), grid_(c.grid()), tol_(tol) {
    for (const auto& v : system_.variables) {
        if (!c.has(v.name)) throw ContractError("trajectory c lacks variable '" + v.name + "'");
        (v.role == Role::Endogenous ? V_ : U_).push_back(v.name);
    }
    if (V_.empty()) throw ContractError("causal model needs at least one endogenous variable");
    for (const auto& n : U_)
        for (const auto& v : V_)
            if (n == v) throw ContractError("U and V overlap");
    check_bounds(system_, c, tol_);
    R_.push_back({std::make_shared<const Trajectory>(c), {Provenance{}}});
}

CausalModel CausalModel::with_slice_count(std::size_t k) const {
    if (k == 0) throw ContractError("slice count must be positive");
    CausalModel m = *this;
    m.slice_count_ = k;
    return m;
}

AssignmentKey CausalModel::key_of(const TrajectorySlice& s, const std::string& var) const {
    long off = s.grid().offset_in(grid_);
    if (off < 0 || off + static_cast<long>(s.size()) > static_cast<long>(grid_.count))
        throw DomainError("slice of '" + var + "' lies outside the model's time span");
    return {var, static_cast<std::size_t>(off), static_cast<std::size_t>(off) + s.size()};
}

CausalModel update(const CausalModel& m, const std::vector<TrajectorySlice>& assignments) {
    CausalModel out = m;
    for (const auto& s : assignments) {
        for (const auto& var : s.variables()) {
            const auto& spec = m.system().spec(var);
            if (spec.role != Role::Endogenous)
                throw ContractError("cannot intervene on exogenous variable '" + var + "'");
            AssignmentKey key = m.key_of(s, var);
            if (spec.is_constant && (key.begin != 0 || key.end != m.grid().count))
                throw ContractError("constant '" + var + "' can only be assigned over its whole duration");
            out.severed_.insert(key);
        }
    }
    std::vector<StoredTrajectory> kept;
    for (const auto& r : m.R_) {
        bool ok = true;
        for (const auto& s : assignments)
            if (!equals_on(*r.trajectory, s, s.span(), m.tol())) {
                ok = false;
                break;
            }
        if (ok) kept.push_back(r);
    }
    out.R_ = std::move(kept);
    return out;
}

CausalModel add_trajectory(const CausalModel& m, const Trajectory& t, const Provenance& provenance) {
    if (!(t.grid().count == m.grid().count) || !t.grid().aligned_with(m.grid()) || t.grid().offset_in(m.grid()) != 0)
        throw ContractError("trajectory grid differs from the model grid");
    for (const auto& v : m.system().variables)
        if (!t.has(v.name)) throw ContractError("trajectory lacks variable '" + v.name + "'");
    if (t.variables().size() != m.system().variables.size())
        throw ContractError("trajectory has variables outside U and V");
    check_bounds(m.system(), t, m.tol());
    CausalModel out = m;
    for (auto& r : out.R_) {
        if (same_trajectory(*r.trajectory, t, m.tol())) {
            r.provenance.insert(provenance);
            return out;
        }
    }
    out.R_.push_back({std::make_shared<const Trajectory>(t), {provenance}});
    return out;
}

const Trajectory& resolve_context(const CausalModel& m, const Trajectory& u) {
    const Trajectory* found = nullptr;
    for (const auto& r : m.store()) {
        if (!r.provenance.count(m.severed())) continue;
        if (!u.empty() && !equals_on(*r.trajectory, u, u.span(), m.tol())) continue;
        if (found && !same_trajectory(*found, *r.trajectory, m.tol()))
            throw DeterminismError("several trajectories in R match the context");
        found = r.trajectory.get();
    }
    if (!found) throw ContextError("no trajectory in R matches the context under the current interventions");
    return *found;
}

bool satisfies(const CausalModel& m, const Trajectory& u, const EventExpression& phi) {
    return holds(phi, resolve_context(m, u), m.tol());
}

bool satisfies(const CausalModel& m, const Trajectory& u, const CauseEvent& ce) {
    return holds(ce, resolve_context(m, u), m.tol());
}

}  // namespace cpscause
