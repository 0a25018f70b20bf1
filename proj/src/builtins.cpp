#include <map>

#include "cpscause/simulator.hpp"

namespace cpscause {

namespace {

const std::map<std::string, std::string>& documents() {
    static const std::map<std::string, std::string> docs = {
#include "builtin_models.inc"
    };
    return docs;
}

}  // namespace

std::vector<std::string> builtin_names() {
    return {"av_running_example", "suspension_nominal", "suspension_mutant1", "suspension_mutant2"};
}

std::string builtin_json(const std::string& name) {
    auto it = documents().find(name);
    if (it == documents().end()) throw DomainError("unknown builtin model '" + name + "'");
    return it->second;
}

Builtin builtin(const std::string& name) {
    std::string text = builtin_json(name);
    Builtin b;
    b.model = model_from_json(text);
    b.model.validate();
    b.scenario = embedded_scenario(text).value_or(Scenario{});
    b.phi = b.model.phi;
    return b;
}

}  // namespace cpscause
