#include "cpscause/cause_checker.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace cpscause {

AnalysisContext AnalysisContext::make(const SystemModel& system, const Scenario& scenario, const EventExpression& phi) {
    AnalysisContext ctx;
    ctx.system = system;
    ctx.simulator = std::make_shared<const Simulator>(system, scenario);
    ctx.c = ctx.simulator->run();
    auto inputs = system.inputs();
    ctx.u = inputs.empty() ? Trajectory(ctx.c.grid(), {}, {}) : project(ctx.c, inputs);
    ctx.phi = phi;
    ctx.not_phi = negate(phi);
    return ctx;
}

std::vector<TrajectorySlice> AnalysisContext::frozen(const std::vector<std::string>& vars) const {
    std::vector<TrajectorySlice> out;
    for (const auto& v : vars) out.push_back(slice(c, v, c.span()));
    return out;
}

std::vector<std::string> CauseCandidate::variables() const {
    std::vector<std::string> out;
    for (const auto& s : x)
        for (const auto& v : s.variables()) out.push_back(v);
    return out;
}

std::vector<std::string> CauseRecord::variables() const {
    std::vector<std::string> out;
    for (const auto& s : x)
        for (const auto& v : s.variables()) out.push_back(v);
    return out;
}

std::vector<TimeInterval> CauseRecord::intervals() const {
    std::vector<TimeInterval> out;
    for (const auto& s : x) out.push_back(s.span());
    return out;
}

std::string CauseRecord::key(const TimeGrid& grid) const {
    std::vector<std::tuple<std::string, long, long>> parts;
    for (const auto& s : x) {
        long off = s.grid().offset_in(grid);
        for (const auto& v : s.variables()) parts.emplace_back(v, off, off + static_cast<long>(s.size()));
    }
    std::sort(parts.begin(), parts.end());
    std::string k;
    for (const auto& [v, b, e] : parts) k += v + "[" + std::to_string(b) + "," + std::to_string(e) + ")";
    return k;
}

CauseCandidate CauseRecord::candidate(const AnalysisContext& ctx) const {
    CauseCandidate cand;
    cand.x = x;
    cand.x_prime = x_prime;
    cand.W = W;
    cand.w = ctx.frozen(W);
    return cand;
}

CounterfactualResult run_counterfactual(const AnalysisContext& ctx, const std::vector<TrajectorySlice>& forced) {
    CounterfactualResult r;
    try {
        Trajectory t = ctx.simulator->run_from(ctx.c, forced);
        check_bounds(ctx.system, t, ctx.tol);
        r.violates = holds(ctx.not_phi, t, ctx.tol);
        r.trajectory = std::move(t);
    } catch (const SimulationError& e) {
        r.failure = e.what();
    } catch (const BoundsError& e) {
        r.failure = e.what();
    }
    return r;
}

bool satisfies_ac1(const AnalysisContext& ctx, const CausalModel& m, const std::vector<TrajectorySlice>& x) {
    // (c |-> x) holds by construction when x is cut from c; checked anyway since records can be loaded from disk.
    return satisfies(m, ctx.u, ctx.phi) && satisfies(m, ctx.u, CauseEvent{x});
}

namespace {

void check_candidate(const AnalysisContext& ctx, const CauseCandidate& cand) {
    if (!is_alternative(cand.x, cand.x_prime, ctx.tol)) throw ContractError("x' is not an alternative to x");
    auto xs = cand.variables();
    for (const auto& w : cand.W)
        if (std::find(xs.begin(), xs.end(), w) != xs.end()) throw ContractError("W and X overlap on '" + w + "'");
    for (const auto& s : cand.w)
        if (!equals_on(ctx.c, s, s.span(), ctx.tol)) throw ContractError("w is not taken from c");
}

}  // namespace

bool satisfies_ac2(const AnalysisContext& ctx, CausalModel& m, const CauseCandidate& cand, Trajectory* counterfactual) {
    check_candidate(ctx, cand);
    std::vector<TrajectorySlice> forced = cand.x_prime;
    forced.insert(forced.end(), cand.w.begin(), cand.w.end());
    Trajectory t;
    try {
        t = ctx.simulator->run_from(ctx.c, forced);
    } catch (const SimulationError&) {
        return false;
    }
    Provenance prov;
    for (const auto& s : forced)
        for (const auto& v : s.variables()) prov.insert(m.key_of(s, v));
    try {
        m = add_trajectory(m, t, prov);
    } catch (const BoundsError&) {
        return false;
    }
    bool ok = satisfies(update(m, forced), ctx.u, ctx.not_phi);
    if (ok && counterfactual) *counterfactual = std::move(t);
    return ok;
}

bool satisfies_ac3(const AnalysisContext& ctx, const CausalModel& m, const std::vector<TrajectorySlice>& x,
                   const SubsetSearcher& searcher, std::size_t budget) {
    const std::size_t n = x.size();
    if (n <= 1) return true;
    std::vector<std::size_t> masks;
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) masks.push_back(mask);
    std::stable_sort(masks.begin(), masks.end(),
                     [](std::size_t a, std::size_t b) { return __builtin_popcountl(a) < __builtin_popcountl(b); });
    for (std::size_t mask : masks) {
        std::vector<TrajectorySlice> sub;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i)) sub.push_back(x[i]);
        auto found = searcher.find(ctx, m, sub, budget);
        if (!found) continue;
        CausalModel scratch = m;
        if (satisfies_ac2(ctx, scratch, *found)) return false;
    }
    return true;
}

CauseVerdict is_cause(const AnalysisContext& ctx, CausalModel& m, const CauseCandidate& cand,
                      const SubsetSearcher& searcher, std::size_t budget) {
    CauseVerdict v;
    v.ac1 = satisfies_ac1(ctx, m, cand.x);
    if (!v.ac1) return v;
    Trajectory cf;
    v.ac2 = satisfies_ac2(ctx, m, cand, &cf);
    if (!v.ac2) return v;
    v.counterfactual = std::move(cf);
    v.ac3 = satisfies_ac3(ctx, m, cand.x, searcher, budget);
    return v;
}

std::optional<CauseCandidate> EnumeratingSearcher::find(const AnalysisContext& ctx, const CausalModel& m,
                                                        const std::vector<TrajectorySlice>& x, std::size_t) const {
    std::vector<std::string> xs;
    for (const auto& s : x)
        for (const auto& v : s.variables()) xs.push_back(v);
    if (xs.size() != x.size()) throw ContractError("enumeration expects single-variable slices");

    // Alternatives: listed constants that differ from the actual slice.
    std::vector<std::vector<TrajectorySlice>> options(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto it = values_.find(xs[i]);
        if (it == values_.end()) return std::nullopt;
        for (double val : it->second) {
            TrajectorySlice alt(x[i].grid(), {xs[i]}, {std::vector<double>(x[i].size(), val)});
            if (!equals_on(alt, x[i], x[i].span(), ctx.tol)) options[i].push_back(std::move(alt));
        }
        if (options[i].empty()) return std::nullopt;
    }
    std::vector<std::string> rest;
    for (const auto& v : m.endogenous())
        if (std::find(xs.begin(), xs.end(), v) == xs.end()) rest.push_back(v);

    for (std::size_t size = 0; size <= rest.size(); ++size) {
        std::vector<bool> pick(rest.size(), false);
        std::fill(pick.begin(), pick.begin() + static_cast<long>(size), true);
        do {
            std::vector<std::string> W;
            for (std::size_t i = 0; i < rest.size(); ++i)
                if (pick[i]) W.push_back(rest[i]);
            std::vector<TrajectorySlice> w = ctx.frozen(W);
            std::vector<std::size_t> idx(x.size(), 0);
            while (true) {
                CauseCandidate cand{x, {}, W, w};
                for (std::size_t i = 0; i < x.size(); ++i) cand.x_prime.push_back(options[i][idx[i]]);
                std::vector<TrajectorySlice> forced = cand.x_prime;
                forced.insert(forced.end(), w.begin(), w.end());
                if (run_counterfactual(ctx, forced).violates) return cand;
                std::size_t d = 0;
                while (d < idx.size() && ++idx[d] == options[d].size()) idx[d++] = 0;
                if (d == idx.size()) break;
            }
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    return std::nullopt;
}

}  // namespace cpscause
