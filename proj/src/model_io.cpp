#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cpscause/model.hpp"

namespace cpscause {

using nlohmann::json;

namespace {

void collect(const RightHandSide& rhs, std::set<std::string>& then_refs, std::set<std::string>& guard_refs) {
    if (!rhs.piecewise()) {
        auto v = rhs.expr.variables();
        then_refs.insert(v.begin(), v.end());
        return;
    }
    for (const auto& b : rhs.branches) {
        auto v = b.then.variables();
        then_refs.insert(v.begin(), v.end());
        if (b.when) {
            auto g = b.when->variables();
            guard_refs.insert(g.begin(), g.end());
        }
    }
}

}  // namespace

std::set<std::string> StructuralEquation::same_slice_refs() const {
    if (ode) return {};
    std::set<std::string> then_refs, guard_refs;
    collect(rhs, then_refs, guard_refs);
    return then_refs;
}

std::set<std::string> StructuralEquation::backward_refs() const {
    std::set<std::string> then_refs, guard_refs;
    collect(rhs, then_refs, guard_refs);
    if (ode) guard_refs.insert(then_refs.begin(), then_refs.end());
    return guard_refs;
}

const VariableSpec& SystemModel::spec(const std::string& n) const {
    for (const auto& v : variables)
        if (v.name == n) return v;
    throw DomainError("unknown variable '" + n + "'");
}

VariableSpec* SystemModel::find(const std::string& n) {
    for (auto& v : variables)
        if (v.name == n) return &v;
    return nullptr;
}

bool SystemModel::has(const std::string& n) const {
    return std::any_of(variables.begin(), variables.end(), [&](const VariableSpec& v) { return v.name == n; });
}

std::vector<std::string> SystemModel::names() const {
    std::vector<std::string> out;
    for (const auto& v : variables) out.push_back(v.name);
    return out;
}

std::vector<std::string> SystemModel::inputs() const {
    std::vector<std::string> out;
    for (const auto& v : variables)
        if (!equations.count(v.name)) out.push_back(v.name);
    return out;
}

std::vector<std::string> SystemModel::endogenous() const {
    std::vector<std::string> out;
    for (const auto& v : variables)
        if (v.role == Role::Endogenous) out.push_back(v.name);
    return out;
}

std::vector<std::string> SystemModel::exogenous() const {
    std::vector<std::string> out;
    for (const auto& v : variables)
        if (v.role == Role::Exogenous) out.push_back(v.name);
    return out;
}

std::set<std::string> SystemModel::constants() const {
    std::set<std::string> out;
    for (const auto& v : variables)
        if (v.is_constant) out.insert(v.name);
    return out;
}

std::size_t SystemModel::sample_count() const {
    double n = std::nearbyint(duration / dt);
    if (std::abs(n * dt - duration) > 1e-6 * std::max(1.0, duration))
        throw ContractError("duration " + format_double(duration) + " is not a multiple of dt " + format_double(dt));
    return static_cast<std::size_t>(n);
}

TimeGrid SystemModel::grid() const { return TimeGrid(0.0, dt, sample_count()); }

void SystemModel::validate() const {
    if (!(dt > 0) || !std::isfinite(dt)) throw ContractError("dt must be positive");
    if (!(duration >= 0) || !std::isfinite(duration)) throw ContractError("duration must be non-negative");
    sample_count();
    std::set<std::string> seen;
    for (const auto& v : variables) {
        if (v.name.empty() || v.name == "t" || v.name.rfind("__", 0) == 0)
            throw ContractError("invalid variable name '" + v.name + "'");
        if (!seen.insert(v.name).second) throw ContractError("duplicate variable '" + v.name + "'");
        if (!(v.min <= v.max)) throw ContractError("variable '" + v.name + "' has min > max");
        bool has_eq = equations.count(v.name) != 0;
        if (!has_eq && v.role == Role::Endogenous)
            throw ContractError("variable '" + v.name + "' has no equation, so it is an input and must be exogenous");
        if (v.role == Role::Endogenous && !(std::isfinite(v.min) && std::isfinite(v.max) && v.min < v.max))
            throw ContractError("endogenous variable '" + v.name + "' needs finite bounds with min < max");
    }
    bool any_endo = std::any_of(variables.begin(), variables.end(),
                                [](const VariableSpec& v) { return v.role == Role::Endogenous; });
    if (!any_endo) throw ContractError("model has no endogenous variables");
    for (const auto& [name, eq] : equations) {
        if (!seen.count(name)) throw ContractError("equation for undeclared variable '" + name + "'");
        if (eq.target != name) throw ContractError("equation target mismatch for '" + name + "'");
        auto refs = eq.same_slice_refs();
        auto back = eq.backward_refs();
        refs.insert(back.begin(), back.end());
        for (const auto& r : refs)
            if (!seen.count(r)) throw ContractError("equation for '" + name + "' references unknown variable '" + r + "'");
        if (eq.ode && !spec(name).init) throw ContractError("ODE variable '" + name + "' needs an init value");
        if (eq.rhs.piecewise()) {
            const auto& br = eq.rhs.branches;
            for (std::size_t i = 0; i + 1 < br.size(); ++i)
                if (!br[i].when) throw ContractError("else-branch must be last in equation for '" + name + "'");
        }
    }
    auto report = check_acyclic(*this);
    if (!report.ok) {
        std::string msg = "cyclic same-slice dependency:";
        for (const auto& v : report.cycle) msg += " " + v;
        throw ContractError(msg);
    }
}

void SystemModel::set_endogenous(const std::vector<std::string>& names) {
    std::set<std::string> want(names.begin(), names.end());
    for (const auto& n : want) {
        if (!has(n)) throw DomainError("unknown variable '" + n + "' in endogenous list");
        if (!equations.count(n)) throw DomainError("'" + n + "' is a scenario input and cannot be endogenous");
    }
    for (auto& v : variables) v.role = want.count(v.name) ? Role::Endogenous : Role::Exogenous;
}

// ---- JSON ----------------------------------------------------------------

namespace {

[[noreturn]] void rethrow_json(const json::parse_error& e, const std::string& text) {
    std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    std::string msg = e.what();
    auto p = msg.find("parse error");
    throw ParseError("malformed JSON: " + (p == std::string::npos ? msg : msg.substr(p)), line, col);
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        rethrow_json(e, text);
    }
}

template <class F>
auto in_field(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what(), e.line, e.column);
    } catch (const json::exception& e) {
        throw ParseError(where + ": " + e.what(), 0, 0);
    }
}

double number_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ParseError(std::string("'") + key + "' must be a number", 0, 0);
    return j[key].get<double>();
}

Expression expr_of(const json& j) {
    if (j.is_number()) return Expression::number(j.get<double>());
    if (!j.is_string()) throw ParseError("expected an expression string", 0, 0);
    return Expression::parse(j.get<std::string>());
}

RightHandSide rhs_of(const json& j) {
    RightHandSide rhs;
    if (!j.is_array()) {
        rhs.expr = expr_of(j);
        return rhs;
    }
    if (j.empty()) throw ParseError("piecewise equation needs at least one branch", 0, 0);
    for (const auto& b : j) {
        if (!b.is_object() || !b.contains("then")) throw ParseError("piecewise branch needs a 'then'", 0, 0);
        Branch br;
        if (b.contains("when")) {
            if (!b["when"].is_string()) throw ParseError("'when' must be a string", 0, 0);
            br.when = EventExpression::parse_condition(b["when"].get<std::string>());
        }
        br.then = expr_of(b["then"]);
        rhs.branches.push_back(std::move(br));
    }
    return rhs;
}

json rhs_to_json(const RightHandSide& rhs) {
    if (!rhs.piecewise()) return rhs.expr.to_string();
    json arr = json::array();
    for (const auto& b : rhs.branches) {
        json o;
        if (b.when) o["when"] = b.when->to_string();
        o["then"] = b.then.to_string();
        arr.push_back(o);
    }
    return arr;
}

Scenario scenario_from(const json& j) {
    Scenario s;
    if (!j.is_object()) throw ParseError("scenario must be an object", 0, 0);
    if (j.contains("inputs")) {
        if (!j["inputs"].is_object()) throw ParseError("'inputs' must be an object", 0, 0);
        for (const auto& [name, e] : j["inputs"].items())
            s.equations[name] = in_field("input '" + name + "'", [&] { return expr_of(e); });
    }
    return s;
}

}  // namespace

SystemModel model_from_json(const std::string& text) {
    json j = parse_json(text);
    if (!j.is_object()) throw ParseError("model must be a JSON object", 1, 1);
    SystemModel m;
    in_field("model", [&] {
        if (j.contains("name")) m.name = j["name"].get<std::string>();
        m.duration = number_or(j, "duration", m.duration);
        m.dt = number_or(j, "dt", m.dt);
        if (j.contains("phi")) m.phi = j["phi"].get<std::string>();
        return 0;
    });
    if (!j.contains("variables") || !j["variables"].is_array()) throw ParseError("model needs a 'variables' array", 1, 1);
    for (const auto& v : j["variables"]) {
        VariableSpec s;
        in_field("variable", [&] {
            s.name = v.at("name").get<std::string>();
            return 0;
        });
        in_field("variable '" + s.name + "'", [&] {
            std::string role = v.value("role", std::string("endogenous"));
            if (role == "endogenous") s.role = Role::Endogenous;
            else if (role == "exogenous") s.role = Role::Exogenous;
            else throw ParseError("role must be 'endogenous' or 'exogenous'", 0, 0);
            s.min = number_or(v, "min", s.min);
            s.max = number_or(v, "max", s.max);
            s.is_constant = v.value("constant", false);
            if (v.contains("init")) s.init = v["init"].get<double>();
            return 0;
        });
        m.variables.push_back(std::move(s));
    }
    if (j.contains("equations")) {
        if (!j["equations"].is_object()) throw ParseError("'equations' must be an object", 1, 1);
        for (const auto& [name, e] : j["equations"].items()) {
            StructuralEquation eq;
            eq.target = name;
            in_field("equation '" + name + "'", [&] {
                if (e.is_object()) {
                    if (!e.contains("ode")) throw ParseError("object equations must have an 'ode' key", 0, 0);
                    eq.ode = true;
                    eq.rhs = rhs_of(e["ode"]);
                } else {
                    eq.rhs = rhs_of(e);
                }
                return 0;
            });
            m.equations[name] = std::move(eq);
        }
    }
    return m;
}

std::string model_to_json(const SystemModel& m) {
    json j;
    j["name"] = m.name;
    j["duration"] = m.duration;
    j["dt"] = m.dt;
    if (!m.phi.empty()) j["phi"] = m.phi;
    json vars = json::array();
    for (const auto& v : m.variables) {
        json o;
        o["name"] = v.name;
        o["role"] = v.role == Role::Endogenous ? "endogenous" : "exogenous";
        if (std::isfinite(v.min) && v.min > -1e299) o["min"] = v.min;
        if (std::isfinite(v.max) && v.max < 1e299) o["max"] = v.max;
        if (v.is_constant) o["constant"] = true;
        if (v.init) o["init"] = *v.init;
        vars.push_back(o);
    }
    j["variables"] = vars;
    json eqs = json::object();
    for (const auto& [name, eq] : m.equations) {
        if (eq.ode) eqs[name] = json{{"ode", rhs_to_json(eq.rhs)}};
        else eqs[name] = rhs_to_json(eq.rhs);
    }
    j["equations"] = eqs;
    return j.dump(2);
}

std::optional<Scenario> embedded_scenario(const std::string& model_text) {
    json j = parse_json(model_text);
    if (!j.is_object() || !j.contains("scenario")) return std::nullopt;
    return scenario_from(j["scenario"]);
}

Scenario scenario_from_json(const std::string& text) { return scenario_from(parse_json(text)); }

std::string scenario_to_json(const Scenario& s) {
    json inputs = json::object();
    for (const auto& [name, e] : s.equations) inputs[name] = e.to_string();
    return json{{"inputs", inputs}}.dump(2);
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Scenario load_scenario(const std::string& path, double dt) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
        Scenario s;
        s.trajectory = read_csv_file(path, dt);
        return s;
    }
    return scenario_from_json(read_text_file(path));
}

}  // namespace cpscause
