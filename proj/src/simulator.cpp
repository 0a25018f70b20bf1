#include "cpscause/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace cpscause {

Simulator::Simulator(const SystemModel& model, const Scenario& scenario) : grid_(model.grid()) {
    model.validate();
    names_ = model.names();
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < names_.size(); ++i) index[names_[i]] = static_cast<int>(i);
    auto resolve = [&](const std::string& n) {
        auto it = index.find(n);
        return it == index.end() ? -1 : it->second;
    };

    vars_.resize(names_.size());
    inputs_.resize(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
        const auto& spec = model.variables[i];
        Var& v = vars_[i];
        auto eq = model.equations.find(spec.name);
        if (eq == model.equations.end()) {
            v.kind = Kind::Input;
            std::vector<double>& col = inputs_[i];
            col.resize(grid_.count);
            if (scenario.trajectory && scenario.trajectory->has(spec.name)) {
                const Trajectory& st = *scenario.trajectory;
                if (!st.grid().aligned_with(grid_))
                    throw ContractError("scenario trajectory is not on the model grid (dt " + format_double(grid_.step) + ")");
                long off = grid_.offset_in(st.grid());
                if (off < 0 || off + static_cast<long>(grid_.count) > static_cast<long>(st.size()))
                    throw ContractError("scenario input '" + spec.name + "' does not span the model duration");
                const auto& src = st.column(spec.name);
                std::copy(src.begin() + off, src.begin() + off + static_cast<long>(grid_.count), col.begin());
            } else if (auto se = scenario.equations.find(spec.name); se != scenario.equations.end()) {
                if (!se->second.variables().empty())
                    throw ContractError("scenario input '" + spec.name + "' may only depend on t");
                CompiledExpression ce(se->second, [](const std::string&) { return -1; });
                for (std::size_t k = 0; k < grid_.count; ++k) col[k] = ce.eval(nullptr, grid_.time(k));
            } else if (spec.init) {
                std::fill(col.begin(), col.end(), *spec.init);
            } else {
                throw ContractError("scenario does not provide input '" + spec.name + "'");
            }
            for (std::size_t k = 0; k < col.size(); ++k)
                if (!std::isfinite(col[k])) throw SimulationError("non-finite input '" + spec.name + "'", grid_.time(k));
            continue;
        }
        const StructuralEquation& e = eq->second;
        v.init = spec.init.value_or(0.0);
        if (e.rhs.piecewise()) {
            for (const auto& b : e.rhs.branches) {
                CompiledBranch cb;
                cb.has_guard = b.when.has_value();
                if (b.when) cb.guard = CompiledCondition(*b.when, resolve);
                cb.then = CompiledExpression(b.then, resolve);
                v.branches.push_back(std::move(cb));
            }
        } else {
            v.expr = CompiledExpression(e.rhs.expr, resolve);
        }
        v.kind = e.ode ? Kind::Ode : e.rhs.piecewise() ? Kind::Piecewise : Kind::Closed;
        if (e.ode) ode_order_.push_back(static_cast<int>(i));
    }

    // Algebraic variables in dependency order; validate() already rejected cycles.
    std::vector<int> state(names_.size(), 0);
    std::function<void(int)> visit = [&](int i) {
        if (state[static_cast<std::size_t>(i)]) return;
        state[static_cast<std::size_t>(i)] = 1;
        const auto& eq = model.equations.at(names_[static_cast<std::size_t>(i)]);
        for (const auto& r : eq.same_slice_refs()) {
            int j = index.at(r);
            Kind k = vars_[static_cast<std::size_t>(j)].kind;
            if (k == Kind::Closed || k == Kind::Piecewise) visit(j);
        }
        algebraic_order_.push_back(i);
    };
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (vars_[i].kind == Kind::Closed || vars_[i].kind == Kind::Piecewise) visit(static_cast<int>(i));
}

double Simulator::eval_var(const Var& v, const double* prev, double prev_t, const double* cur, double cur_t) const {
    if (v.branches.empty()) return v.expr.eval(cur, cur_t);
    for (const auto& b : v.branches)
        if (!b.has_guard || b.guard.eval(prev, prev_t, tol_)) return b.then.eval(cur, cur_t);
    throw SimulationError("no piecewise branch applies", cur_t);
}

Trajectory Simulator::simulate(const std::vector<TrajectorySlice>& forced, const Trajectory* base, std::size_t k0) const {
    const std::size_t n = grid_.count;
    const std::size_t nv = names_.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<std::vector<double>> force(nv);
    for (const auto& s : forced) {
        long off = s.grid().offset_in(grid_);
        if (off < 0 || off + static_cast<long>(s.size()) > static_cast<long>(n))
            throw DomainError("forced slice lies outside the simulated span");
        for (std::size_t vi = 0; vi < s.variables().size(); ++vi) {
            auto it = std::find(names_.begin(), names_.end(), s.variables()[vi]);
            if (it == names_.end()) throw DomainError("unknown variable '" + s.variables()[vi] + "'");
            auto& f = force[static_cast<std::size_t>(it - names_.begin())];
            if (f.empty()) f.assign(n, nan);
            for (std::size_t k = 0; k < s.size(); ++k) f[static_cast<std::size_t>(off) + k] = s.column(vi)[k];
        }
    }

    std::vector<std::vector<double>> cols(nv, std::vector<double>(n));
    std::vector<double> prev(nv), row(nv);
    double prev_t = grid_.start;

    // Arithmetic failures surface as simulation failures so callers treat them like divergence.
    try {
        if (k0 == 0) {
            // Pre-state: inputs at t0, ODE and piecewise at their init values, closed forms on top.
            for (std::size_t i = 0; i < nv; ++i)
                prev[i] = vars_[i].kind == Kind::Input ? inputs_[i][0] : vars_[i].init;
            for (int i : algebraic_order_) {
                const Var& v = vars_[static_cast<std::size_t>(i)];
                if (v.kind == Kind::Closed) prev[static_cast<std::size_t>(i)] = v.expr.eval(prev.data(), prev_t);
            }
        } else {
            for (std::size_t i = 0; i < nv; ++i) {
                const auto& src = base->column(names_[i]);
                std::copy(src.begin(), src.begin() + static_cast<long>(k0), cols[i].begin());
                prev[i] = src[k0 - 1];
            }
            prev_t = grid_.time(k0 - 1);
        }

        const double dt = grid_.step;
        for (std::size_t k = k0; k < n; ++k) {
            const double t = grid_.time(k);
            for (std::size_t i = 0; i < nv; ++i)
                if (vars_[i].kind == Kind::Input) row[i] = inputs_[i][k];
            for (int i : ode_order_) {
                const Var& v = vars_[static_cast<std::size_t>(i)];
                row[static_cast<std::size_t>(i)] =
                    k == 0 ? v.init : prev[static_cast<std::size_t>(i)] + dt * eval_var(v, prev.data(), prev_t, prev.data(), prev_t);
            }
            for (std::size_t i = 0; i < nv; ++i)
                if (!force[i].empty() && !std::isnan(force[i][k])) row[i] = force[i][k];
            for (int i : algebraic_order_) {
                auto ui = static_cast<std::size_t>(i);
                if (!force[ui].empty() && !std::isnan(force[ui][k])) continue;
                row[ui] = eval_var(vars_[ui], prev.data(), prev_t, row.data(), t);
            }
            for (std::size_t i = 0; i < nv; ++i) {
                if (!std::isfinite(row[i])) throw SimulationError("non-finite value of '" + names_[i] + "'", t);
                cols[i][k] = row[i];
            }
            std::swap(prev, row);
            prev_t = t;
        }
    } catch (const EvalError& e) {
        throw SimulationError(e.reason, e.time);
    }
    return Trajectory(grid_, names_, std::move(cols));
}

Trajectory Simulator::run(const std::vector<TrajectorySlice>& forced) const { return simulate(forced, nullptr, 0); }

Trajectory Simulator::run_from(const Trajectory& base, const std::vector<TrajectorySlice>& forced) const {
    if (!(base.grid().count == grid_.count) || !base.grid().aligned_with(grid_) || base.grid().offset_in(grid_) != 0)
        throw ContractError("base trajectory is not on the simulator grid");
    std::size_t k0 = grid_.count;
    for (const auto& s : forced) {
        long off = s.grid().offset_in(grid_);
        if (off < 0) throw DomainError("forced slice starts before the simulated span");
        k0 = std::min(k0, static_cast<std::size_t>(off));
    }
    if (forced.empty()) k0 = grid_.count;
    if (k0 == 0) return simulate(forced, nullptr, 0);
    return simulate(forced, &base, k0);
}

Trajectory simulate(const SystemModel& model, const Scenario& scenario, const std::vector<TrajectorySlice>& forced) {
    return Simulator(model, scenario).run(forced);
}

}  // namespace cpscause
