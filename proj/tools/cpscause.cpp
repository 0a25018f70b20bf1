#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cpscause/report.hpp"

using namespace cpscause;
namespace fs = std::filesystem;

namespace {

enum Exit { kCauses = 0, kNone = 1, kUsage = 2, kNoEffect = 3 };

struct Loaded {
    SystemModel model;
    Scenario scenario;
    std::string phi;
};

// A path to a model JSON, or the name of a built-in model.
Loaded load(const std::string& model_arg, const std::string& scenario_path, double dt, double duration) {
    Loaded l;
    if (fs::exists(model_arg)) {
        std::string text = read_text_file(model_arg);
        l.model = model_from_json(text);
        if (auto s = embedded_scenario(text)) l.scenario = *s;
        l.phi = l.model.phi;
    } else {
        auto names = builtin_names();
        if (std::find(names.begin(), names.end(), model_arg) == names.end())
            throw ContractError("no model file or built-in named '" + model_arg + "'");
        Builtin b = builtin(model_arg);
        l.model = b.model;
        l.scenario = b.scenario;
        l.phi = b.phi;
    }
    if (dt > 0) l.model.dt = dt;
    if (duration >= 0) l.model.duration = duration;
    if (!scenario_path.empty()) l.scenario = load_scenario(scenario_path, l.model.dt);
    l.model.validate();
    return l;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cpscause: actual causality over CPS trajectories"};
    app.require_subcommand(1);

    std::string model_arg, scenario_path, out_path;
    double dt = 0.0, duration = -1.0;

    auto* sim = app.add_subcommand("simulate", "simulate a model and write the trajectory CSV");
    sim->add_option("--model", model_arg, "model JSON or built-in name")->required();
    sim->add_option("--scenario", scenario_path, "scenario JSON or CSV");
    sim->add_option("--out", out_path, "output CSV (default stdout)");
    sim->add_option("--dt", dt);
    sim->add_option("--duration", duration);

    std::string phi_arg, endogenous_arg, out_dir = "cpscause_out";
    SearchConfig cfg;
    std::string schedule_arg;
    auto* ana = app.add_subcommand("analyze", "search for causes of a property violation");
    ana->add_option("--model", model_arg, "model JSON or built-in name")->required();
    ana->add_option("--scenario", scenario_path, "scenario JSON or CSV");
    ana->add_option("--phi", phi_arg, "effect (default: the model's phi)");
    ana->add_option("--endogenous", endogenous_arg, "comma separated endogenous variables");
    ana->add_option("--out-dir", out_dir)->capture_default_str();
    ana->add_option("--dt", dt);
    ana->add_option("--duration", duration);
    ana->add_option("--seed", cfg.seed)->capture_default_str();
    ana->add_option("--max-granularity", cfg.max_granularity)->capture_default_str();
    ana->add_option("--max-cause-size", cfg.max_cause_size)->capture_default_str();
    ana->add_option("--budget-generations", cfg.generations)->capture_default_str();
    ana->add_option("--population", cfg.population)->capture_default_str();
    ana->add_option("--schedule", schedule_arg, "granularities, e.g. 2,4,10");
    ana->add_option("--threads", cfg.threads, "worker threads (0: CPSCAUSE_THREADS or all cores)");

    std::string report_path;
    auto* ver = app.add_subcommand("verify", "re-check every cause in a report");
    ver->add_option("report", report_path, "report.json")->required();

    auto* lst = app.add_subcommand("list", "list built-in models");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    try {
        if (*lst) {
            for (const auto& n : builtin_names()) std::cout << n << '\n';
            return 0;
        }

        if (*sim) {
            Loaded l = load(model_arg, scenario_path, dt, duration);
            if (l.model.sample_count() == 0) {
                // No samples: header only.
                std::ofstream file;
                if (!out_path.empty()) file.open(out_path);
                if (!out_path.empty() && !file) throw std::runtime_error("cannot write " + out_path);
                write_csv_header(out_path.empty() ? std::cout : file, l.model.names());
                return 0;
            }
            Trajectory t = simulate(l.model, l.scenario);
            if (out_path.empty()) {
                write_csv(std::cout, t);
            } else {
                write_csv_file(out_path, t);
                std::cerr << "wrote " << out_path << " (" << t.size() << " rows)\n";
            }
            return 0;
        }

        if (*ana) {
            auto t0 = std::chrono::steady_clock::now();
            Loaded l = load(model_arg, scenario_path, dt, duration);
            if (!endogenous_arg.empty()) l.model.set_endogenous(split_list(endogenous_arg));
            if (!schedule_arg.empty()) {
                cfg.schedule.clear();
                for (const auto& s : split_list(schedule_arg)) cfg.schedule.push_back(std::stoul(s));
            }
            cfg.validate();
            std::string phi_text = phi_arg.empty() ? l.phi : phi_arg;
            if (phi_text.empty()) throw ContractError("no effect given: pass --phi or set \"phi\" in the model");
            EventExpression phi = EventExpression::parse(phi_text);
            for (const auto& v : phi.variables())
                if (!l.model.has(v)) throw ContractError("phi references unknown variable '" + v + "'");

            AnalysisContext ctx = AnalysisContext::make(l.model, l.scenario, phi);
            Timing timing;
            timing.simulate_seconds = seconds_since(t0);
            if (!holds(phi, ctx.c, ctx.tol)) {
                std::cerr << "AC1 unsatisfiable: scenario does not exhibit the effect\n";
                return kNoEffect;
            }
            auto t1 = std::chrono::steady_clock::now();
            SearchOutcome outcome = search(ctx, cfg);
            timing.search_seconds = seconds_since(t1);
            timing.total_seconds = seconds_since(t0);
            std::string path = write_report(out_dir, ctx, l.scenario, cfg, outcome, timing);

            std::cout << outcome.causes.size() << " cause(s) in " << timing.search_seconds << " s\n";
            for (const auto& rec : outcome.causes) {
                auto vars = rec.variables();
                auto ivs = rec.intervals();
                std::cout << " ";
                for (std::size_t i = 0; i < vars.size(); ++i)
                    std::cout << ' ' << vars[i] << '[' << format_double(ivs[i].lo) << ',' << format_double(ivs[i].hi)
                              << ')';
                std::cout << "  W={";
                for (std::size_t i = 0; i < rec.W.size(); ++i) std::cout << (i ? "," : "") << rec.W[i];
                std::cout << "}\n";
            }
            std::cout << "report: " << path << '\n';
            return outcome.causes.empty() ? kNone : kCauses;
        }

        if (*ver) {
            if (!fs::exists(report_path)) throw ContractError("missing report " + report_path);
            VerifyResult r = verify_report(report_path);
            for (const auto& m : r.messages) std::cout << m << '\n';
            std::cout << (r.ok ? "verify: PASS" : "verify: FAIL") << '\n';
            return r.ok ? 0 : kNone;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
