// One PASS/FAIL line per primary acceptance criterion. Exit status is nonzero on any failure
// other than a recorded deviation.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "at_bt_cps.hpp"
#include "cpscause/search_engine.hpp"

using namespace cpscause;

namespace {

struct Line {
    int id;
    bool pass;
    std::string detail;
    std::string deviation;  // non-empty: failure is a recorded, expected deviation
};

std::vector<Line> lines;

void report(int id, bool pass, const std::string& detail, const std::string& deviation = "") {
    lines.push_back({id, pass, detail, pass ? "" : deviation});
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << detail;
    if (!pass && !deviation.empty()) std::cout << " (known deviation: " << deviation << ")";
    std::cout << std::endl;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s;
}

std::set<std::string> var_set(const CauseRecord& r) {
    auto v = r.variables();
    return {v.begin(), v.end()};
}

std::string set_name(const std::set<std::string>& s) { return "{" + join({s.begin(), s.end()}) + "}"; }

struct Run {
    SearchOutcome outcome;
    AnalysisContext ctx;
};

Run analyze(const std::string& name, const std::vector<std::string>& endogenous, std::uint64_t seed) {
    Builtin b = builtin(name);
    if (!endogenous.empty()) b.model.set_endogenous(endogenous);
    Run r{{}, AnalysisContext::make(b.model, b.scenario, EventExpression::parse(b.phi))};
    SearchConfig cfg;
    cfg.seed = seed;
    r.outcome = search(r.ctx, cfg);
    return r;
}

// Records of a and b pair up by variables with every interval endpoint within `slack`.
bool records_match(const std::vector<CauseRecord>& a, const std::vector<CauseRecord>& b, double slack) {
    for (const auto& ra : a) {
        bool found = false;
        for (const auto& rb : b) {
            if (ra.variables() != rb.variables()) continue;
            auto ia = ra.intervals(), ib = rb.intervals();
            bool close = true;
            for (std::size_t i = 0; i < ia.size(); ++i)
                close = close && std::abs(ia[i].lo - ib[i].lo) <= slack + 1e-9 &&
                        std::abs(ia[i].hi - ib[i].hi) <= slack + 1e-9;
            if (close) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

void criterion1() {
    const std::vector<std::string> endo{"brakes", "battery", "lidarRange"};
    const std::vector<std::uint64_t> seeds{1, 2, 3};
    std::vector<std::vector<CauseRecord>> per_seed;
    std::ostringstream detail;
    bool ok = true;
    double slowest = 0;
    for (auto seed : seeds) {
        Run r = analyze("av_running_example", endo, seed);
        slowest = std::max(slowest, r.outcome.seconds);
        std::set<std::set<std::string>> sets;
        for (const auto& c : r.outcome.causes) sets.insert(var_set(c));
        std::set<std::set<std::string>> want{{"lidarRange"}, {"battery", "brakes"}};
        if (sets != want) {
            ok = false;
            detail << "seed " << seed << " found";
            for (const auto& s : sets) detail << ' ' << set_name(s);
            detail << "; ";
        }
        per_seed.push_back(r.outcome.causes);
    }
    // One grid cell of the finest granularity.
    const double cell = 10.0 / SearchConfig{}.max_granularity;
    for (std::size_t i = 1; i < per_seed.size(); ++i)
        if (!records_match(per_seed[0], per_seed[i], cell) || !records_match(per_seed[i], per_seed[0], cell)) {
            ok = false;
            detail << "seed " << seeds[i] << " intervals differ from seed " << seeds[0] << "; ";
        }
    if (slowest > 300) {
        ok = false;
        detail << "slowest seed took " << slowest << " s; ";
    }
    detail << "causes {lidarRange} and {battery,brakes} only, over seeds 1,2,3; slowest " << std::round(slowest)
           << " s";
    report(1, ok, detail.str());
}

void criterion2() {
    Builtin b = builtin("av_running_example");
    Trajectory c = simulate(b.model, b.scenario);
    const auto& pos = c.column("carPosition");
    double t_hit = -1;
    for (std::size_t k = 0; k < c.size(); ++k)
        if (pos[k] >= 80) {
            t_hit = c.grid().time(k);
            break;
        }
    bool timing_ok = t_hit >= 8.0 && t_hit <= 9.0;

    TrajectorySlice strong(c.grid(), {"brakes"}, {std::vector<double>(c.size(), 0.8)});
    Trajectory s = simulate(b.model, b.scenario, {strong});
    const auto& acc = s.column("acceleration");
    const auto& spd = s.column("speed");
    const auto& p = s.column("carPosition");
    std::size_t onset = 0, stop = 0;
    while (onset < s.size() && acc[onset] >= 0) ++onset;
    stop = onset;
    while (stop < s.size() && spd[stop] > 0) ++stop;
    bool stopped = onset < s.size() && stop < s.size();
    // Deceleration sampled at `onset` acts on the interval [t_onset, t_onset + dt).
    double v0 = stopped ? spd[onset] : 0;
    double expected = v0 * v0 / (2 * 0.8 * 9.8);
    double distance = stopped ? p[stop] - p[onset] : 0;
    bool distance_ok = stopped && std::abs(distance - expected) <= 0.02 * expected;
    bool collision = false;
    for (double x : p) collision = collision || x >= 80;

    std::ostringstream detail;
    detail << "first carPosition>=80 at t=" << t_hit << " (want 8.5+-0.5); brakes=0.8 stopping distance " << distance
           << " m vs closed form " << expected << " m; brakes=0.8 collision=" << (collision ? "yes" : "no")
           << " (final position " << p.back() << ")";
    bool ok = timing_ok && distance_ok && !collision;
    // Only the no-collision clause may fail as a recorded deviation.
    std::string deviation =
        timing_ok && distance_ok && collision
            ? "brakes=0.8 cannot avoid the collision while brakes-alone is required not to be a cause"
            : "";
    report(2, ok, detail.str(), deviation);
}

void criterion3() {
    const std::vector<std::string> endo;  // roles declared in the model files
    std::ostringstream detail;

    Run m1 = analyze("suspension_mutant1", endo, 1);
    bool otu = std::any_of(m1.outcome.causes.begin(), m1.outcome.causes.end(),
                           [](const CauseRecord& r) { return var_set(r) == std::set<std::string>{"otu"}; });
    detail << "mutant1 {otu} cause " << (otu ? "found" : "missing") << " in " << std::round(m1.outcome.seconds)
           << " s; ";

    Run m2 = analyze("suspension_mutant2", endo, 1);
    const double slack = 1.0;  // one coarse interval at granularity 10
    auto overlaps = [&](const TimeInterval& iv, double lo, double hi) {
        return iv.lo < hi + slack && iv.hi > lo - slack;
    };
    const CauseRecord* hit = nullptr;
    bool hit_exact = false;
    for (const auto& r : m2.outcome.causes) {
        if (var_set(r) != std::set<std::string>{"e", "f"}) continue;
        auto vars = r.variables();
        auto ivs = r.intervals();
        std::map<std::string, TimeInterval> by;
        for (std::size_t i = 0; i < vars.size(); ++i) by.emplace(vars[i], ivs[i]);
        if (!overlaps(by.at("f"), 7, 8) || !overlaps(by.at("e"), 8, 10)) continue;
        // Prefer exact overlaps, then the finest granularity.
        bool exact = by.at("f").lo < 8 && by.at("f").hi > 7 && by.at("e").lo < 10 && by.at("e").hi > 8;
        auto rank = [](bool ex, std::size_t g) { return std::pair{ex, g}; };
        if (!hit || rank(exact, r.granularity) > rank(hit_exact, hit->granularity)) {
            hit = &r;
            hit_exact = exact;
        }
    }
    if (hit) {
        auto ivs = hit->intervals();
        auto vars = hit->variables();
        detail << "mutant2 {f,e} cause";
        for (std::size_t i = 0; i < vars.size(); ++i)
            detail << ' ' << vars[i] << '[' << ivs[i].lo << ',' << ivs[i].hi << ')';
    } else {
        detail << "mutant2 {f,e} cause over f~[7,8), e~[8,10) missing";
    }
    detail << " in " << std::round(m2.outcome.seconds) << " s";
    bool fast = m1.outcome.seconds < 600 && m2.outcome.seconds < 600;
    report(3, otu && hit && fast, detail.str());
}

void criterion4() {
    auto t0 = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool ok = true;

    DiscreteModel m = at_bt_model();
    DiscreteValuation u{{"uA", 0}, {"uB", 0}};
    DiscreteEvent ph{{{"PH", 1}}, false};
    auto a = is_cause_discrete(m, u, {{"AT", 0}}, ph);
    bool v1 = a.is_cause() && a.W == std::vector<std::string>{"BH"};
    auto b = is_cause_discrete(m, u, {{"BT", 1}}, ph);
    bool v2 = !b.ac1;
    auto c = is_cause_discrete(m, u, {{"AT", 0}, {"BT", 0}}, ph);
    bool v3 = c.ac1 && c.ac2 && !c.ac3;
    ok = v1 && v2 && v3;
    detail << "AT=0 cause W={" << join(a.W) << "} " << (v1 ? "ok" : "WRONG") << "; BT=1 fails AC1 "
           << (v2 ? "ok" : "WRONG") << "; AT=0,BT=0 fails AC3 " << (v3 ? "ok" : "WRONG") << "; ";

    auto cmp = at_bt::compare_all();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && cmp.mismatches.empty() && secs < 60;
    detail << "continuous vs discrete: " << cmp.cases - cmp.mismatches.size() << "/" << cmp.cases
           << " contexts x candidates agree";
    for (const auto& mm : cmp.mismatches) detail << "; " << mm;
    detail << " (" << secs << " s)";
    report(4, ok, detail.str());
}

void criterion5() {
    std::string cmd = std::string("\"") + CPSCAUSE_PROPERTIES_BIN + "\" > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    report(5, rc == 0,
           std::string("randomized property suite (>=1000 cases per property) ") + (rc == 0 ? "passed" : "failed"));
}

}  // namespace

int main(int argc, char** argv) {
    // Optional: run a subset, e.g. `acceptance 2 4`.
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    auto want = [&](int id) { return only.empty() || only.count(id); };
    try {
        if (want(1)) criterion1();
        if (want(2)) criterion2();
        if (want(3)) criterion3();
        if (want(4)) criterion4();
        if (want(5)) criterion5();
    } catch (const std::exception& e) {
        std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
        return 1;
    }
    bool unexpected = std::any_of(lines.begin(), lines.end(), [](const Line& l) { return !l.pass && l.deviation.empty(); });
    return unexpected ? 1 : 0;
}
