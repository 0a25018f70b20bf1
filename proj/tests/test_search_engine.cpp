#include <cmath>
#include <set>

#include <doctest.h>

#include "cpscause/search_engine.hpp"

using namespace cpscause;

namespace {

AnalysisContext av_context() {
    Builtin b = builtin("av_running_example");
    return AnalysisContext::make(b.model, b.scenario, EventExpression::parse(b.phi));
}

SearchConfig small() {
    SearchConfig cfg;
    cfg.population = 12;
    cfg.generations = 6;
    cfg.threads = 1;
    return cfg;
}

// Plain least squares through the normal equations, in raw time.
std::vector<double> lsq_oracle(const std::vector<std::pair<double, double>>& pts, int deg) {
    const int n = deg + 1;
    std::vector<std::vector<long double>> a(n, std::vector<long double>(n + 1, 0.0L));
    for (const auto& [t, y] : pts)
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a[i][j] += std::pow((long double)t, i + j);
            a[i][n] += std::pow((long double)t, i) * y;
        }
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            long double f = a[r][c] / a[c][c];
            for (int k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::vector<double> coef(n);
    for (int i = 0; i < n; ++i) coef[i] = static_cast<double>(a[i][n] / a[i][i]);
    return coef;
}

double poly(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (std::size_t d = c.size(); d-- > 0;) acc = acc * t + c[d];
    return acc;
}

}  // namespace

TEST_CASE("get_intervals") {
    AnalysisContext ctx = av_context();
    auto two = get_intervals(ctx.c, 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == TimeInterval(0, 5));
    CHECK(two[1] == TimeInterval(5, 10));
    auto four = get_intervals(ctx.c, 4);
    REQUIRE(four.size() == 4);
    CHECK(four[1] == TimeInterval(2.5, 5));
    CHECK(four[3] == TimeInterval(7.5, 10));
    auto ten = get_intervals(ctx.c, 10);
    REQUIRE(ten.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(ten[i] == TimeInterval(double(i), double(i + 1)));
    CHECK_THROWS_AS(get_intervals(ctx.c, 0), ContractError);
    CHECK_THROWS_AS(get_intervals(ctx.c, 1001), ContractError);
}

TEST_CASE("smooth_fit") {
    TimeGrid grid(2.0, 0.01, 100);
    SUBCASE("recovers a quartic") {
        CandidatePoints cp{"x", TimeInterval(2, 3), {}};
        for (double t : {2.0, 2.2, 2.4, 2.6, 2.8, 2.99}) cp.points.emplace_back(t, std::pow(t, 4));
        TrajectorySlice s = smooth_fit(cp, grid);
        for (std::size_t k = 0; k < grid.count; ++k) CHECK(s.value("x", k) == doctest::Approx(std::pow(grid.time(k), 4)).epsilon(1e-6));
    }
    SUBCASE("constant input") {
        CandidatePoints cp{"x", TimeInterval(2, 3), {{2.0, 7.5}, {2.5, 7.5}, {2.9, 7.5}}};
        TrajectorySlice flat = smooth_fit(cp, grid);
        for (double v : flat.column(0)) CHECK(v == doctest::Approx(7.5));
        CandidatePoints one{"x", TimeInterval(2, 3), {{2.4, -1.0}}};
        TrajectorySlice single = smooth_fit(one, grid);
        for (double v : single.column(0)) CHECK(v == -1.0);
    }
    SUBCASE("matches an independent least-squares fit") {
        // Seven noisy points: degree-4 least squares, not interpolation.
        std::vector<std::pair<double, double>> pts{{2.0, 1.0}, {2.15, 3.0}, {2.3, 2.0}, {2.45, 5.0},
                                                   {2.6, 4.0}, {2.8, 1.5}, {2.95, 2.5}};
        auto coef = lsq_oracle(pts, 4);
        TrajectorySlice s = smooth_fit(CandidatePoints{"x", TimeInterval(2, 3), pts}, grid);
        for (std::size_t k = 0; k < grid.count; ++k) CHECK(s.value("x", k) == doctest::Approx(poly(coef, grid.time(k))).epsilon(1e-6));

        std::vector<std::pair<double, double>> three{{2.0, 1.0}, {2.5, 3.0}, {2.9, 0.0}};
        auto q = lsq_oracle(three, 2);
        TrajectorySlice s3 = smooth_fit(CandidatePoints{"x", TimeInterval(2, 3), three}, grid);
        for (std::size_t k = 0; k < grid.count; ++k) CHECK(s3.value("x", k) == doctest::Approx(poly(q, grid.time(k))).epsilon(1e-6));
    }
    SUBCASE("clamped to bounds") {
        CandidatePoints cp{"x", TimeInterval(2, 3), {{2.0, -5.0}, {2.5, 50.0}, {2.9, 5.0}}, 0.0, 10.0};
        TrajectorySlice s = smooth_fit(cp, grid);
        for (double v : s.column(0)) {
            CHECK(v >= 0.0);
            CHECK(v <= 10.0);
        }
    }
    SUBCASE("repeated times fall back to interpolation") {
        CandidatePoints cp{"x", TimeInterval(2, 3), {{2.0, 0.0}, {2.0, 0.0}, {3.0, 1.0}, {3.0, 1.0}}};
        TrajectorySlice s = smooth_fit(cp, grid);
        CHECK(s.value("x", 50) == doctest::Approx(0.5));
    }
    CHECK_THROWS_AS(smooth_fit(CandidatePoints{"x", TimeInterval(2, 3), {}}, grid), ContractError);
}

TEST_CASE("attenuation") {
    CHECK(attenuation(8.03, TimeInterval(9, 10), 0.5) == 1.0);
    CHECK(attenuation(8.03, TimeInterval(7, 8.03), 0.5) == 1.0);
    CHECK(attenuation(8.03, TimeInterval(0, 5), 0.5) == doctest::Approx(1.0 / (1.0 + 0.5 * 3.03)));
    CHECK(attenuation(8.03, TimeInterval(0, 5), 0.0) == 1.0);
    // Earlier intervals weigh less.
    CHECK(attenuation(8.03, TimeInterval(0, 1), 0.5) < attenuation(8.03, TimeInterval(4, 5), 0.5));
}

TEST_CASE("config") {
    SearchConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.ac3_budget() == 400);
    cfg.max_granularity = 4;
    CHECK(cfg.effective_schedule() == std::vector<std::size_t>{2, 4});
    SearchConfig bad;
    bad.schedule = {4, 2};
    CHECK_THROWS_AS(bad.validate(), ContractError);
    bad = SearchConfig{};
    bad.max_cause_size = 4;
    CHECK_THROWS_AS(bad.validate(), ContractError);
    bad = SearchConfig{};
    bad.population = 1;
    CHECK_THROWS_AS(bad.validate(), ContractError);
    CHECK(cell_seed(1, {"a"}, {TimeInterval(0, 1)}) == cell_seed(1, {"a"}, {TimeInterval(0, 1)}));
    CHECK(cell_seed(1, {"a"}, {TimeInterval(0, 1)}) != cell_seed(1, {"b"}, {TimeInterval(0, 1)}));
    CHECK(cell_seed(1, {"a"}, {TimeInterval(0, 1)}) != cell_seed(2, {"a"}, {TimeInterval(0, 1)}));
}

TEST_CASE("search_heuristic") {
    AnalysisContext ctx = av_context();
    SearchConfig cfg = small();
    HeuristicResult r = search_heuristic(ctx, {"lidarRange"}, {ctx.c.span()}, cfg, 6, 7);
    REQUIRE(r.found);
    CHECK(r.evaluations > 0);
    REQUIRE(r.x_prime.size() == 1);
    CHECK(is_alternative(ctx.frozen({"lidarRange"}), r.x_prime, ctx.tol));
    for (double v : r.x_prime[0].column(0)) {
        CHECK(v >= 0.0);
        CHECK(v <= 50.0);
    }
    std::vector<TrajectorySlice> forced = r.x_prime;
    forced.insert(forced.end(), r.w.begin(), r.w.end());
    CHECK(run_counterfactual(ctx, forced).violates);
    for (const auto& s : r.w) CHECK(equals_on(ctx.c, s, s.span(), 0.0));

    // Same seed, same answer.
    HeuristicResult again = search_heuristic(ctx, {"lidarRange"}, {ctx.c.span()}, cfg, 6, 7);
    CHECK(again.fitness == r.fitness);
    CHECK(same_trajectory(again.x_prime[0], r.x_prime[0], 0.0));

    // No brake setting avoids the collision on its own.
    HeuristicResult brakes = search_heuristic(ctx, {"brakes"}, {ctx.c.span()}, cfg, 3, 7);
    CHECK_FALSE(brakes.found);
}

TEST_CASE("focus_search") {
    AnalysisContext ctx = av_context();
    SearchConfig cfg = small();
    CausalModel m = ctx.initial_model();
    HeuristicResult r = search_heuristic(ctx, {"lidarRange"}, {ctx.c.span()}, cfg, 6, 7);
    REQUIRE(r.found);
    CauseRecord rec{"c", ctx.frozen({"lidarRange"}), r.x_prime, r.W, cfg.max_granularity, cfg.ac3_budget(), ctx.c};
    std::vector<ExploredCell> explored;
    CHECK(focus_search(ctx, m, rec, cfg, &explored).empty());
    CHECK(explored.empty());

    cfg.max_granularity = 4;
    cfg.schedule = {2, 4};
    rec.granularity = 2;
    rec.x = {slice(ctx.c, "lidarRange", TimeInterval(0, 5))};
    rec.x_prime = {slice(r.x_prime[0], TimeInterval(0, 5))};
    auto refined = focus_search(ctx, m, rec, cfg, &explored);
    // Only the two quarter cells inside [0,5) are explored.
    REQUIRE(explored.size() == 2);
    for (const auto& e : explored) {
        CHECK(e.focus);
        CHECK(e.granularity == 4);
        CHECK(e.intervals[0].lo >= 0.0);
        CHECK(e.intervals[0].hi <= 5.0);
    }
    for (const auto& f : refined) CHECK(f.granularity == 4);
}

TEST_CASE("full search on the running example") {
    AnalysisContext ctx = av_context();
    SearchConfig cfg;
    cfg.threads = 1;
    SearchOutcome out = search(ctx, cfg);
    CHECK(out.fault_time == doctest::Approx(8.03));
    std::set<std::vector<std::string>> sets;
    for (const auto& c : out.causes) {
        auto v = c.variables();
        std::sort(v.begin(), v.end());
        sets.insert(v);
        CHECK(c.granularity <= cfg.max_granularity);
        CHECK(holds(ctx.not_phi, c.counterfactual));
    }
    CHECK(sets == std::set<std::vector<std::string>>{{"lidarRange"}, {"battery", "brakes"}});
    CHECK(out.evaluations > 0);
    CHECK_FALSE(out.explored.empty());
}
