#include "cpscause/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

namespace cpscause {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json config_json(const SearchConfig& cfg) {
    return json{{"schedule", cfg.schedule},
                {"max_granularity", cfg.max_granularity},
                {"max_cause_size", cfg.max_cause_size},
                {"population", cfg.population},
                {"generations", cfg.generations},
                {"tournament", cfg.tournament},
                {"mutation_rate", cfg.mutation_rate},
                {"crossover_rate", cfg.crossover_rate},
                {"control_points", cfg.control_points},
                {"lambda", cfg.lambda},
                {"seed", cfg.seed},
                {"ac3_fraction", cfg.ac3_fraction},
                {"ac3_budget", cfg.ac3_budget()},
                {"threads", cfg.worker_count()}};
}

SearchConfig config_of(const json& j) {
    SearchConfig cfg;
    cfg.schedule = j.value("schedule", cfg.schedule);
    cfg.max_granularity = j.value("max_granularity", cfg.max_granularity);
    cfg.max_cause_size = j.value("max_cause_size", cfg.max_cause_size);
    cfg.population = j.value("population", cfg.population);
    cfg.generations = j.value("generations", cfg.generations);
    cfg.tournament = j.value("tournament", cfg.tournament);
    cfg.mutation_rate = j.value("mutation_rate", cfg.mutation_rate);
    cfg.crossover_rate = j.value("crossover_rate", cfg.crossover_rate);
    cfg.control_points = j.value("control_points", cfg.control_points);
    cfg.lambda = j.value("lambda", cfg.lambda);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.ac3_fraction = j.value("ac3_fraction", cfg.ac3_fraction);
    return cfg;
}

// Original and counterfactual side by side for each intervened variable and each variable in Phi.
void write_plot(const std::string& path, const AnalysisContext& ctx, const CauseRecord& rec) {
    std::vector<std::string> vars = rec.variables();
    for (const auto& v : ctx.phi.variables())
        if (std::find(vars.begin(), vars.end(), v) == vars.end() && ctx.c.has(v)) vars.push_back(v);
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "time";
    for (const auto& v : vars) os << ',' << v << "_original," << v << "_counterfactual";
    os << '\n';
    for (std::size_t k = 0; k < ctx.c.size(); ++k) {
        os << format_double(ctx.c.grid().time(k));
        for (const auto& v : vars)
            os << ',' << format_double(ctx.c.value(v, k)) << ',' << format_double(rec.counterfactual.value(v, k));
        os << '\n';
    }
}

}  // namespace

std::string config_to_json(const SearchConfig& cfg) { return config_json(cfg).dump(2); }
SearchConfig config_from_json(const std::string& text) { return config_of(json::parse(text)); }

std::string write_report(const std::string& out_dir, const AnalysisContext& ctx, const Scenario& scenario,
                         const SearchConfig& cfg, const SearchOutcome& outcome, const Timing& timing) {
    fs::create_directories(out_dir);
    auto at = [&](const std::string& f) { return (fs::path(out_dir) / f).string(); };

    json j;
    j["version"] = kReportVersion;
    j["model"] = json::parse(model_to_json(ctx.system));
    if (scenario.trajectory) {
        write_csv_file(at("scenario.csv"), *scenario.trajectory);
        j["scenario"] = {{"csv", "scenario.csv"}};
    } else {
        j["scenario"] = json::parse(scenario_to_json(scenario));
    }
    j["phi"] = ctx.phi.to_string();
    j["endogenous"] = ctx.system.endogenous();
    j["config"] = config_json(cfg);
    j["seed"] = cfg.seed;
    j["tolerance"] = ctx.tol;
    write_csv_file(at("c.csv"), ctx.c);
    j["trajectory"] = {{"id", ctx.trajectory_id}, {"csv", "c.csv"}};
    j["fault_time"] = outcome.fault_time;

    json causes = json::array();
    for (std::size_t i = 0; i < outcome.causes.size(); ++i) {
        const auto& rec = outcome.causes[i];
        std::string stem = "cause_" + std::to_string(i);
        {
            std::ofstream os(at(stem + "_xprime.csv"));
            write_slices_csv(os, ctx.c.grid(), rec.x_prime);
        }
        write_csv_file(at(stem + "_counterfactual.csv"), rec.counterfactual);
        write_plot(at("plot_" + stem + ".csv"), ctx, rec);
        json ivs = json::array();
        for (const auto& iv : rec.intervals()) ivs.push_back({iv.lo, iv.hi});
        causes.push_back({{"trajectory", rec.trajectory_id},
                          {"variables", rec.variables()},
                          {"intervals", ivs},
                          {"witness",
                           {{"x_prime", stem + "_xprime.csv"},
                            {"W", rec.W},
                            {"counterfactual", stem + "_counterfactual.csv"}}},
                          {"granularity", rec.granularity},
                          {"ac3_budget", rec.ac3_budget},
                          {"plot", "plot_" + stem + ".csv"}});
    }
    j["causes"] = causes;

    std::size_t violating = 0;
    for (const auto& e : outcome.explored) violating += e.violates;
    j["search"] = {{"cells", outcome.explored.size()},
                   {"cells_violating", violating},
                   {"evaluations", outcome.evaluations}};
    j["timing"] = {{"simulate_seconds", timing.simulate_seconds},
                   {"search_seconds", timing.search_seconds},
                   {"total_seconds", timing.total_seconds}};
    std::string path = at("report.json");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << j.dump(2) << '\n';
    return path;
}

VerifyResult verify_report(const std::string& report_path) {
    VerifyResult res;
    auto fail = [&](const std::string& msg) {
        res.ok = false;
        res.messages.push_back("FAIL " + msg);
    };
    fs::path dir = fs::path(report_path).parent_path();
    auto at = [&](const std::string& f) { return (dir / f).string(); };

    json j = json::parse(read_text_file(report_path));
    if (j.value("version", std::string()) != kReportVersion) throw ParseError("unsupported report version", 1, 1);

    SystemModel model = model_from_json(j.at("model").dump());
    model.set_endogenous(j.at("endogenous").get<std::vector<std::string>>());
    Scenario scenario;
    if (j.at("scenario").contains("csv"))
        scenario.trajectory = read_csv_file(at(j["scenario"]["csv"].get<std::string>()), model.dt);
    else
        scenario = scenario_from_json(j.at("scenario").dump());
    SearchConfig cfg = config_of(j.at("config"));
    EventExpression phi = EventExpression::parse(j.at("phi").get<std::string>());
    AnalysisContext ctx = AnalysisContext::make(model, scenario, phi);
    ctx.tol = j.value("tolerance", kDefaultTol);
    ctx.trajectory_id = j.at("trajectory").value("id", std::string("c"));

    Trajectory stored_c = read_csv_file(at(j["trajectory"]["csv"].get<std::string>()), model.dt);
    if (!same_trajectory(stored_c, ctx.c, ctx.tol)) {
        fail("c.csv does not match a fresh simulation of the embedded model");
        return res;
    }

    CausalModel m = ctx.initial_model();
    GaSubsetSearcher ac3(cfg);
    const auto& causes = j.at("causes");
    for (std::size_t i = 0; i < causes.size(); ++i) {
        const auto& cj = causes[i];
        std::string tag = "cause " + std::to_string(i);
        auto vars = cj.at("variables").get<std::vector<std::string>>();
        auto ivs = cj.at("intervals");
        const auto& wit = cj.at("witness");
        if (ivs.size() != vars.size()) {
            fail(tag + ": variables and intervals differ in length");
            continue;
        }
        std::vector<TrajectorySlice> xp;
        try {
            xp = slices_from_table(read_csv_table_file(at(wit.at("x_prime").get<std::string>())), model.dt);
        } catch (const std::exception& e) {
            fail(tag + ": unreadable witness: " + e.what());
            continue;
        }
        CauseCandidate cand;
        bool shape_ok = xp.size() == vars.size();
        for (std::size_t k = 0; shape_ok && k < vars.size(); ++k) {
            TimeInterval iv(ivs[k].at(0).get<double>(), ivs[k].at(1).get<double>());
            const TrajectorySlice* match = nullptr;
            for (const auto& s : xp)
                if (s.variables().front() == vars[k]) match = &s;
            IndexRange want = ctx.c.range_of(iv);
            if (!match || match->grid().offset_in(ctx.c.grid()) != static_cast<long>(want.begin) ||
                match->size() != want.size()) {
                shape_ok = false;
                break;
            }
            cand.x.push_back(slice(ctx.c, vars[k], iv));
            cand.x_prime.push_back(*match);
        }
        if (!shape_ok) {
            fail(tag + ": witness rows do not match the stated variables and intervals");
            continue;
        }
        cand.W = wit.at("W").get<std::vector<std::string>>();
        cand.w = ctx.frozen(cand.W);
        if (!is_alternative(cand.x, cand.x_prime, ctx.tol)) {
            fail(tag + ": x' is not an alternative to x");
            continue;
        }
        if (wit.contains("counterfactual")) {
            std::vector<TrajectorySlice> forced = cand.x_prime;
            forced.insert(forced.end(), cand.w.begin(), cand.w.end());
            auto cf = run_counterfactual(ctx, forced);
            Trajectory stored = read_csv_file(at(wit["counterfactual"].get<std::string>()), model.dt);
            if (!cf.trajectory || !same_trajectory(*cf.trajectory, stored, ctx.tol)) {
                fail(tag + ": stored counterfactual does not match re-simulation of the witness");
                continue;
            }
        }
        std::size_t budget = cj.value("ac3_budget", cfg.ac3_budget());
        CauseVerdict v = is_cause(ctx, m, cand, ac3, budget);
        if (!v.is_cause()) {
            fail(tag + ": is_cause rejected (AC1 " + std::to_string(v.ac1) + ", AC2 " + std::to_string(v.ac2) +
                 ", AC3 " + std::to_string(v.ac3) + ")");
            continue;
        }
        res.messages.push_back("PASS " + tag);
    }
    return res;
}

}  // namespace cpscause
