#include "cpscause/hp_discrete.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "cpscause/errors.hpp"
#include "cpscause/expression.hpp"

namespace cpscause {

const DiscreteVariable& DiscreteModel::variable(const std::string& name) const {
    for (const auto* vs : {&exogenous, &endogenous})
        for (const auto& v : *vs)
            if (v.name == name) return v;
    throw DomainError("unknown variable '" + name + "'");
}

std::vector<std::string> DiscreteModel::topological_order() const {
    std::vector<std::string> order;
    std::map<std::string, int> state;
    std::set<std::string> endo;
    for (const auto& v : endogenous) endo.insert(v.name);
    std::function<void(const std::string&)> visit = [&](const std::string& n) {
        if (state[n] == 2) return;
        if (state[n] == 1) throw ContractError("cyclic dependency through '" + n + "'");
        state[n] = 1;
        auto it = parents.find(n);
        if (it != parents.end())
            for (const auto& p : it->second)
                if (endo.count(p)) visit(p);
        state[n] = 2;
        order.push_back(n);
    };
    for (const auto& v : endogenous) visit(v.name);
    return order;
}

bool DiscreteEvent::eval(const DiscreteValuation& v) const {
    bool all = true;
    for (const auto& [name, val] : atoms) {
        auto it = v.find(name);
        if (it == v.end()) throw DomainError("formula references unknown variable '" + name + "'");
        if (it->second != val) {
            all = false;
            break;
        }
    }
    return negated ? !all : all;
}

DiscreteValuation evaluate(const DiscreteModel& m, const DiscreteValuation& u, const DiscreteValuation& interventions) {
    DiscreteValuation v;
    for (const auto& x : m.exogenous) {
        auto it = u.find(x.name);
        if (it == u.end()) throw ContractError("context lacks '" + x.name + "'");
        v[x.name] = it->second;
    }
    for (const auto& name : m.topological_order()) {
        auto iv = interventions.find(name);
        if (iv != interventions.end()) {
            v[name] = iv->second;
            continue;
        }
        auto f = m.functions.find(name);
        if (f == m.functions.end()) throw ContractError("no function for '" + name + "'");
        v[name] = f->second(v);
    }
    return v;
}

namespace {

std::vector<DiscreteValuation> settings(const DiscreteModel& m, const std::vector<std::string>& vars) {
    std::vector<DiscreteValuation> out{{}};
    for (const auto& n : vars) {
        std::vector<DiscreteValuation> next;
        for (const auto& partial : out)
            for (int val : m.variable(n).range) {
                auto p = partial;
                p[n] = val;
                next.push_back(std::move(p));
            }
        out = std::move(next);
    }
    return out;
}

bool ac2_for(const DiscreteModel& m, const DiscreteValuation& u, const DiscreteValuation& x, const DiscreteEvent& phi,
             DiscreteCauseResult* witness) {
    DiscreteValuation actual = evaluate(m, u);
    std::vector<std::string> xvars;
    for (const auto& [n, _] : x) xvars.push_back(n);
    std::vector<std::string> rest;
    for (const auto& v : m.endogenous)
        if (!x.count(v.name)) rest.push_back(v.name);

    auto alternatives = settings(m, xvars);
    DiscreteEvent not_phi = phi;
    not_phi.negated = !phi.negated;
    for (std::size_t size = 0; size <= rest.size(); ++size) {
        // Subsets of `rest` of this size, in declaration order.
        std::vector<bool> pick(rest.size(), false);
        std::fill(pick.begin(), pick.begin() + static_cast<long>(size), true);
        do {
            DiscreteValuation w;
            std::vector<std::string> W;
            for (std::size_t i = 0; i < rest.size(); ++i)
                if (pick[i]) {
                    W.push_back(rest[i]);
                    w[rest[i]] = actual.at(rest[i]);
                }
            for (const auto& xp : alternatives) {
                if (xp == x) continue;
                DiscreteValuation iv = w;
                iv.insert(xp.begin(), xp.end());
                if (not_phi.eval(evaluate(m, u, iv))) {
                    if (witness) {
                        witness->W = W;
                        witness->w = w;
                        witness->x_prime = xp;
                    }
                    return true;
                }
            }
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    return false;
}

}  // namespace

bool discrete_ac2(const DiscreteModel& m, const DiscreteValuation& u, const DiscreteValuation& x,
                  const DiscreteEvent& phi, DiscreteCauseResult* witness) {
    return ac2_for(m, u, x, phi, witness);
}

DiscreteCauseResult is_cause_discrete(const DiscreteModel& m, const DiscreteValuation& u, const DiscreteValuation& x,
                                      const DiscreteEvent& phi) {
    DiscreteCauseResult r;
    if (x.empty()) throw ContractError("cause needs at least one variable");
    for (const auto& [n, _] : x) {
        bool endo = std::any_of(m.endogenous.begin(), m.endogenous.end(),
                                [&](const DiscreteVariable& v) { return v.name == n; });
        if (!endo) throw ContractError("'" + n + "' is not endogenous");
    }
    DiscreteValuation actual = evaluate(m, u);
    r.ac1 = phi.eval(actual);
    for (const auto& [n, val] : x)
        if (actual.at(n) != val) r.ac1 = false;
    if (!r.ac1) return r;
    r.ac2 = ac2_for(m, u, x, phi, &r);
    if (!r.ac2) return r;
    // Minimality: no strict non-empty subset may satisfy AC2 (AC1 is inherited).
    std::vector<std::pair<std::string, int>> items(x.begin(), x.end());
    r.ac3 = true;
    const std::size_t n = items.size();
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
        DiscreteValuation sub;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i)) sub.insert(items[i]);
        if (ac2_for(m, u, sub, phi, nullptr)) {
            r.ac3 = false;
            break;
        }
    }
    return r;
}

DiscreteModel at_bt_model() {
    DiscreteModel m;
    m.exogenous = {{"uA", {0, 1}}, {"uB", {0, 1}}};
    m.endogenous = {{"AT", {0, 1}}, {"BT", {0, 1}}, {"AH", {0, 1}}, {"BH", {0, 1}}, {"PH", {0, 1}}};
    m.parents = {{"AT", {"uA"}}, {"BT", {"uB"}}, {"AH", {"AT"}}, {"BH", {"AT", "BT"}}, {"PH", {"AH", "BH"}}};
    m.functions["AT"] = [](const DiscreteValuation& v) { return v.at("uA"); };
    m.functions["BT"] = [](const DiscreteValuation& v) { return v.at("uB"); };
    // A turning left (AT = 0) hits the pedestrian; B only hits when A has turned right and B goes left.
    m.functions["AH"] = [](const DiscreteValuation& v) { return 1 - v.at("AT"); };
    m.functions["BH"] = [](const DiscreteValuation& v) { return v.at("AT") * (1 - v.at("BT")); };
    m.functions["PH"] = [](const DiscreteValuation& v) { return (v.at("AH") || v.at("BH")) ? 1 : 0; };
    return m;
}

DiscreteModel discrete_model_from_json(const std::string& text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), 1, static_cast<int>(e.byte));
    }
    DiscreteModel m;
    auto read_vars = [](const json& arr, std::vector<DiscreteVariable>& out) {
        for (const auto& v : arr) {
            DiscreteVariable d{v.at("name").get<std::string>(), v.at("range").get<std::vector<int>>()};
            if (d.range.empty()) throw ContractError("variable '" + d.name + "' has an empty range");
            out.push_back(std::move(d));
        }
    };
    try {
        read_vars(j.at("exogenous"), m.exogenous);
        read_vars(j.at("endogenous"), m.endogenous);
        for (const auto& v : j.at("endogenous")) {
            std::string name = v.at("name").get<std::string>();
            auto ps = v.value("parents", std::vector<std::string>{});
            m.parents[name] = ps;
            if (v.contains("table")) {
                std::map<std::string, int> table;
                for (const auto& [k, val] : v["table"].items()) table[k] = val.get<int>();
                m.functions[name] = [ps, table, name](const DiscreteValuation& val) {
                    std::string key;
                    for (std::size_t i = 0; i < ps.size(); ++i) key += (i ? "," : "") + std::to_string(val.at(ps[i]));
                    auto it = table.find(key);
                    if (it == table.end()) throw ContractError("truth table of '" + name + "' lacks row " + key);
                    return it->second;
                };
            } else {
                Expression e = Expression::parse(v.at("expr").get<std::string>());
                for (const auto& r : e.variables())
                    if (std::find(ps.begin(), ps.end(), r) == ps.end())
                        throw ContractError("expression of '" + name + "' reads non-parent '" + r + "'");
                CompiledExpression ce(e, [ps](const std::string& n) {
                    return static_cast<int>(std::find(ps.begin(), ps.end(), n) - ps.begin());
                });
                m.functions[name] = [ps, ce](const DiscreteValuation& val) {
                    std::vector<double> row;
                    for (const auto& p : ps) row.push_back(val.at(p));
                    return static_cast<int>(std::lround(ce.eval(row.data(), 0.0)));
                };
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("discrete model: ") + e.what(), 1, 1);
    }
    m.topological_order();
    return m;
}

}  // namespace cpscause
