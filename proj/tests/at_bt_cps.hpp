#pragma once
// The AT/BT model written as constant trajectories, and an exhaustive
// comparison of the continuous checker against hp_discrete. Shared by the unit test and the
// acceptance binary.

#include <sstream>
#include <string>
#include <vector>

#include "cpscause/cause_checker.hpp"
#include "cpscause/hp_discrete.hpp"

namespace cpscause::at_bt {

inline const std::vector<std::string> kEndogenous{"AT", "BT", "AH", "BH", "PH"};

// Five samples are plenty: every variable is constant.
inline SystemModel system() {
    return model_from_json(R"json({
      "name": "at_bt", "duration": 0.05, "dt": 0.01,
      "variables": [
        {"name": "uA", "role": "exogenous", "constant": true},
        {"name": "uB", "role": "exogenous", "constant": true},
        {"name": "AT", "min": 0, "max": 1, "constant": true},
        {"name": "BT", "min": 0, "max": 1, "constant": true},
        {"name": "AH", "min": 0, "max": 1, "constant": true},
        {"name": "BH", "min": 0, "max": 1, "constant": true},
        {"name": "PH", "min": 0, "max": 1, "constant": true}
      ],
      "equations": {
        "AT": "uA", "BT": "uB",
        "AH": "1 - AT",
        "BH": "AT * (1 - BT)",
        "PH": "AH + BH - AH * BH"
      }
    })json");
}

inline Scenario scenario(int ua, int ub) {
    return scenario_from_json(R"({"inputs": {"uA": ")" + std::to_string(ua) + R"(", "uB": ")" +
                              std::to_string(ub) + R"("}})");
}

inline EventExpression phi() { return EventExpression::parse("PH =_dom 1"); }

inline EnumeratingSearcher searcher() {
    std::map<std::string, std::vector<double>> values;
    for (const auto& v : kEndogenous) values[v] = {0.0, 1.0};
    return EnumeratingSearcher(values);
}

struct Verdict {
    bool ac1 = false, ac2 = false, ac3 = false;
    bool is_cause() const { return ac1 && ac2 && ac3; }
};

inline Verdict continuous_verdict(int ua, int ub, const std::vector<std::string>& X) {
    AnalysisContext ctx = AnalysisContext::make(system(), scenario(ua, ub), phi());
    CausalModel m = ctx.initial_model();
    auto search = searcher();
    std::vector<TrajectorySlice> x = ctx.frozen(X);
    Verdict v;
    v.ac1 = satisfies_ac1(ctx, m, x);
    if (!v.ac1) return v;
    auto cand = search.find(ctx, m, x, 0);
    if (!cand) return v;
    CauseVerdict cv = is_cause(ctx, m, *cand, search, 0);
    v.ac2 = cv.ac2;
    v.ac3 = cv.ac3;
    return v;
}

// AC2 where x' must differ from x in every component, which is what an alternative slice set
// requires. hp_discrete accepts any x' != x; the two agree on singletons and on final verdicts.
inline bool discrete_ac2_all_differ(const DiscreteModel& m, const DiscreteValuation& u, const DiscreteValuation& x) {
    DiscreteValuation actual = evaluate(m, u);
    std::vector<std::string> rest;
    for (const auto& v : m.endogenous)
        if (!x.count(v.name)) rest.push_back(v.name);
    for (unsigned wmask = 0; wmask < (1u << rest.size()); ++wmask) {
        DiscreteValuation iv;
        for (std::size_t i = 0; i < rest.size(); ++i)
            if (wmask & (1u << i)) iv[rest[i]] = actual.at(rest[i]);
        for (const auto& [n, val] : x) iv[n] = 1 - val;  // binary: the only differing value
        if (evaluate(m, u, iv).at("PH") != 1) return true;
    }
    return false;
}

inline Verdict discrete_verdict(int ua, int ub, const std::vector<std::string>& X) {
    DiscreteModel m = at_bt_model();
    DiscreteValuation u{{"uA", ua}, {"uB", ub}};
    DiscreteValuation actual = evaluate(m, u);
    DiscreteValuation x;
    for (const auto& v : X) x[v] = actual.at(v);
    auto r = is_cause_discrete(m, u, x, DiscreteEvent{{{"PH", 1}}, false});
    Verdict v{r.ac1, r.ac2, r.ac3};
    if (v.ac1) {
        v.ac2 = discrete_ac2_all_differ(m, u, x);
        // Cause verdict is taken from hp_discrete; AC3 is only meaningful once AC2 holds.
        v.ac3 = v.ac2 && r.is_cause();
    }
    return v;
}

struct Comparison {
    std::size_t cases = 0;
    std::vector<std::string> mismatches;
};

// All 4 contexts x every singleton and pair of endogenous variables.
inline Comparison compare_all() {
    std::vector<std::vector<std::string>> candidates;
    for (std::size_t i = 0; i < kEndogenous.size(); ++i) {
        candidates.push_back({kEndogenous[i]});
        for (std::size_t j = i + 1; j < kEndogenous.size(); ++j) candidates.push_back({kEndogenous[i], kEndogenous[j]});
    }
    Comparison out;
    for (int ua = 0; ua <= 1; ++ua)
        for (int ub = 0; ub <= 1; ++ub)
            for (const auto& X : candidates) {
                ++out.cases;
                Verdict c = continuous_verdict(ua, ub, X);
                Verdict d = discrete_verdict(ua, ub, X);
                if (c.ac1 != d.ac1 || c.ac2 != d.ac2 || c.ac3 != d.ac3) {
                    std::ostringstream os;
                    os << "u=(" << ua << ',' << ub << ") X={";
                    for (std::size_t i = 0; i < X.size(); ++i) os << (i ? "," : "") << X[i];
                    os << "} continuous " << c.ac1 << c.ac2 << c.ac3 << " discrete " << d.ac1 << d.ac2 << d.ac3;
                    out.mismatches.push_back(os.str());
                }
            }
    return out;
}

}  // namespace cpscause::at_bt
