#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <doctest.h>
#include <json.hpp>

#include "cpscause/report.hpp"

using namespace cpscause;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Fixture {
    Builtin b = builtin("av_running_example");
    AnalysisContext ctx = AnalysisContext::make(b.model, b.scenario, EventExpression::parse(b.phi));
    SearchConfig cfg;
    fs::path dir;

    Fixture() {
        cfg.population = 10;
        cfg.generations = 4;
        dir = fs::temp_directory_path() / ("cpscause_report_" + std::to_string(::getpid()));
        fs::remove_all(dir);
    }
    ~Fixture() { fs::remove_all(dir); }

    // lidarRange held at 50 on [0,10) with battery and brakes frozen.
    std::string write() {
        SearchOutcome out;
        out.fault_time = 8.03;
        std::vector<TrajectorySlice> xp{TrajectorySlice(ctx.c.grid(), {"lidarRange"}, {std::vector<double>(ctx.c.size(), 50.0)})};
        std::vector<std::string> W{"battery", "brakes"};
        std::vector<TrajectorySlice> forced = xp;
        for (const auto& s : ctx.frozen(W)) forced.push_back(s);
        CounterfactualResult cf = run_counterfactual(ctx, forced);
        REQUIRE(cf.violates);
        out.causes.push_back(CauseRecord{"c", ctx.frozen({"lidarRange"}), xp, W, 1, cfg.ac3_budget(), *cf.trajectory});
        return write_report(dir.string(), ctx, b.scenario, cfg, out, Timing{});
    }
};

json load(const fs::path& p) {
    std::ifstream is(p);
    return json::parse(is);
}

void save(const fs::path& p, const json& j) {
    std::ofstream os(p);
    os << j.dump(2);
}

}  // namespace

TEST_CASE("write and verify round trip") {
    Fixture f;
    std::string path = f.write();
    json j = load(path);
    CHECK(j["version"] == kReportVersion);
    CHECK(j["phi"] == f.ctx.phi.to_string());
    REQUIRE(j["causes"].size() == 1);
    CHECK(j["causes"][0]["variables"] == json::array({"lidarRange"}));
    CHECK(j["causes"][0]["intervals"] == json::array({json::array({0.0, 10.0})}));
    for (const char* file : {"c.csv", "cause_0_xprime.csv", "cause_0_counterfactual.csv", "plot_cause_0.csv"})
        CHECK(fs::exists(f.dir / file));

    VerifyResult v = verify_report(path);
    CHECK(v.ok);
    for (const auto& m : v.messages) INFO(m);
}

TEST_CASE("tampered interval fails verification") {
    Fixture f;
    std::string path = f.write();
    json j = load(path);
    j["causes"][0]["intervals"][0] = json::array({0.0, 5.0});
    save(path, j);
    VerifyResult v = verify_report(path);
    CHECK_FALSE(v.ok);
}

TEST_CASE("tampered witness fails verification") {
    Fixture f;
    std::string path = f.write();
    fs::path csv = f.dir / "cause_0_xprime.csv";
    std::ifstream is(csv);
    std::stringstream ss;
    std::string line;
    int row = 0;
    while (std::getline(is, line)) {
        // Row 600 is t = 5.99: set lidarRange back to its actual value there.
        if (row == 600) line = line.substr(0, line.find(',')) + ",10";
        ss << line << '\n';
        ++row;
    }
    is.close();
    std::ofstream(csv) << ss.str();
    VerifyResult v = verify_report(path);
    CHECK_FALSE(v.ok);
}

TEST_CASE("unreadable reports throw") {
    Fixture f;
    std::string path = f.write();
    json j = load(path);
    j["version"] = "v0";
    save(path, j);
    CHECK_THROWS_AS(verify_report(path), ParseError);
    CHECK_THROWS(verify_report((f.dir / "nope.json").string()));
}

TEST_CASE("config json round trip") {
    SearchConfig cfg;
    cfg.schedule = {3, 6};
    cfg.max_granularity = 6;
    cfg.population = 17;
    cfg.seed = 99;
    cfg.lambda = 0.25;
    SearchConfig back = config_from_json(config_to_json(cfg));
    CHECK(back.schedule == cfg.schedule);
    CHECK(back.max_granularity == 6);
    CHECK(back.population == 17);
    CHECK(back.seed == 99);
    CHECK(back.lambda == 0.25);
    CHECK(back.ac3_budget() == cfg.ac3_budget());
}
