#include "cpscause/search_engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <thread>

#include <Eigen/Dense>

namespace cpscause {

void SearchConfig::validate() const {
    if (schedule.empty()) throw ContractError("granularity schedule is empty");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i] == 0) throw ContractError("granularity must be positive");
        if (i && schedule[i] <= schedule[i - 1]) throw ContractError("granularity schedule must be strictly increasing");
    }
    if (max_granularity == 0) throw ContractError("max granularity must be positive");
    if (max_cause_size == 0 || max_cause_size > 3) throw ContractError("max cause size must be in 1..3");
    if (population < 2) throw ContractError("population must be at least 2");
    if (generations == 0) throw ContractError("generations must be positive");
    if (tournament == 0) throw ContractError("tournament size must be positive");
    if (control_points == 0) throw ContractError("control points must be positive");
    if (mutation_rate < 0 || mutation_rate > 1 || crossover_rate < 0 || crossover_rate > 1)
        throw ContractError("rates must lie in [0,1]");
    if (lambda < 0) throw ContractError("attenuation lambda must be non-negative");
    if (ac3_fraction <= 0 || ac3_fraction > 1) throw ContractError("ac3 fraction must lie in (0,1]");
}

std::size_t SearchConfig::ac3_budget() const {
    return std::max<std::size_t>(population, static_cast<std::size_t>(
                                                 std::llround(ac3_fraction * static_cast<double>(population * generations))));
}

std::size_t SearchConfig::worker_count() const {
    if (threads) return threads;
    if (const char* env = std::getenv("CPSCAUSE_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<std::size_t>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::size_t> SearchConfig::effective_schedule() const {
    std::vector<std::size_t> out;
    for (auto g : schedule)
        if (g <= max_granularity) out.push_back(g);
    if (out.empty()) out.push_back(max_granularity);
    return out;
}

std::vector<TimeInterval> get_intervals(const Trajectory& c, std::size_t granularity) {
    if (granularity == 0) throw ContractError("granularity must be positive");
    const std::size_t n = c.size();
    if (granularity > n) throw ContractError("granularity exceeds the number of samples");
    std::vector<TimeInterval> out;
    std::size_t prev = 0;
    for (std::size_t k = 1; k <= granularity; ++k) {
        std::size_t b = static_cast<std::size_t>(std::llround(static_cast<double>(k * n) / static_cast<double>(granularity)));
        out.emplace_back(c.grid().time(prev), c.grid().time(b));
        prev = b;
    }
    return out;
}

namespace {

std::vector<double> piecewise_linear(std::vector<std::pair<double, double>> pts, const TimeGrid& grid) {
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> out(grid.count);
    for (std::size_t k = 0; k < grid.count; ++k) {
        double t = grid.time(k);
        if (t <= pts.front().first) {
            out[k] = pts.front().second;
        } else if (t >= pts.back().first) {
            out[k] = pts.back().second;
        } else {
            auto it = std::upper_bound(pts.begin(), pts.end(), t, [](double v, const auto& p) { return v < p.first; });
            const auto& b = *it;
            const auto& a = *(it - 1);
            double span = b.first - a.first;
            out[k] = span > 0 ? a.second + (b.second - a.second) * (t - a.first) / span : b.second;
        }
    }
    return out;
}

}  // namespace

TrajectorySlice smooth_fit(const CandidatePoints& cp, const TimeGrid& grid) {
    if (cp.points.empty()) throw ContractError("smooth_fit needs at least one point");
    const auto n = static_cast<Eigen::Index>(cp.points.size());
    const Eigen::Index deg = std::min<Eigen::Index>(4, n - 1);
    double tmin = cp.points.front().first, tmax = tmin;
    for (const auto& p : cp.points) {
        tmin = std::min(tmin, p.first);
        tmax = std::max(tmax, p.first);
    }
    // Scale time to [-1,1] so the Vandermonde matrix stays well conditioned.
    const double mid = 0.5 * (tmin + tmax);
    const double half = tmax > tmin ? 0.5 * (tmax - tmin) : 1.0;
    Eigen::MatrixXd A(n, deg + 1);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = (cp.points[static_cast<std::size_t>(i)].first - mid) / half;
        double p = 1.0;
        for (Eigen::Index d = 0; d <= deg; ++d, p *= s) A(i, d) = p;
        b(i) = cp.points[static_cast<std::size_t>(i)].second;
    }
    std::vector<double> values;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < deg + 1) {
        values = piecewise_linear(cp.points, grid);
    } else {
        Eigen::VectorXd coef = qr.solve(b);
        values.resize(grid.count);
        for (std::size_t k = 0; k < grid.count; ++k) {
            double s = (grid.time(k) - mid) / half;
            double acc = 0.0;
            for (Eigen::Index d = deg; d >= 0; --d) acc = acc * s + coef(d);
            values[k] = acc;
        }
    }
    for (auto& v : values) v = std::clamp(v, cp.min, cp.max);
    return Trajectory(grid, {cp.var}, {std::move(values)});
}

double attenuation(double t_fault, const TimeInterval& iv, double lambda) {
    return 1.0 / (1.0 + lambda * std::max(0.0, t_fault - iv.hi));
}

std::uint64_t cell_seed(std::uint64_t seed, const std::vector<std::string>& X, const std::vector<TimeInterval>& ivs) {
    // FNV-1a: stable across runs and platforms, unlike std::hash.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    };
    mix(std::to_string(seed));
    for (const auto& x : X) mix(x);
    for (const auto& iv : ivs) mix(format_double(iv.lo) + "," + format_double(iv.hi));
    return h;
}

namespace {

struct GeneBlock {
    std::string var;
    TrajectorySlice original;
    std::vector<double> times;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t offset = 0;
};

struct Evaluated {
    std::vector<double> genes;
    double fitness = 0.0;
    bool violates = false;
    bool frozen = false;
};

class Ga {
public:
    Ga(const AnalysisContext& ctx, const std::vector<std::string>& X, const std::vector<TimeInterval>& ivs,
       const SearchConfig& cfg, std::uint64_t seed)
        : ctx_(ctx), cfg_(cfg), rng_(seed) {
        if (X.size() != ivs.size()) throw ContractError("one interval per variable is required");
        auto constants = ctx.system.constants();
        for (std::size_t i = 0; i < X.size(); ++i) {
            const auto& spec = ctx.system.spec(X[i]);
            if (spec.role != Role::Endogenous) throw ContractError("'" + X[i] + "' is not endogenous");
            TimeInterval iv = constants.count(X[i]) ? ctx.c.span() : ivs[i];
            GeneBlock g{X[i], slice(ctx.c, X[i], iv), {}, spec.min, spec.max, genes_};
            std::size_t m = g.original.size();
            std::size_t P = constants.count(X[i]) ? 1 : std::min(cfg.control_points, m);
            for (std::size_t j = 0; j < P; ++j) {
                std::size_t k = P == 1 ? 0 : static_cast<std::size_t>(std::llround(static_cast<double>(j * (m - 1)) / static_cast<double>(P - 1)));
                g.times.push_back(g.original.grid().time(k));
            }
            genes_ += P;
            blocks_.push_back(std::move(g));
        }
        for (const auto& v : ctx.system.endogenous())
            if (std::find(X.begin(), X.end(), v) == X.end()) rest_.push_back(v);
        frozen_ = ctx.frozen(rest_);
    }

    HeuristicResult run(std::size_t generations) {
        std::vector<Evaluated> pop = initial();
        for (auto& ind : pop) evaluate(ind);
        for (std::size_t gen = 1; gen < generations; ++gen) {
            std::vector<Evaluated> next;
            next.push_back(*std::max_element(pop.begin(), pop.end(), by_fitness));
            while (next.size() < cfg_.population) {
                Evaluated a = tournament(pop), b = tournament(pop);
                if (unit_(rng_) < cfg_.crossover_rate)
                    for (std::size_t i = 0; i < genes_; ++i)
                        if (unit_(rng_) < 0.5) std::swap(a.genes[i], b.genes[i]);
                mutate(a);
                mutate(b);
                next.push_back(std::move(a));
                if (next.size() < cfg_.population) next.push_back(std::move(b));
            }
            for (std::size_t i = 1; i < next.size(); ++i) evaluate(next[i]);
            pop = std::move(next);
        }
        return result_;
    }

private:
    static bool by_fitness(const Evaluated& a, const Evaluated& b) { return a.fitness < b.fitness; }

    std::vector<Evaluated> initial() {
        std::vector<Evaluated> pop;
        // Constant profiles at the bounds (every min/max combination) and at interior levels,
        // then uniform random control points.
        std::size_t combos = std::size_t{1} << blocks_.size();
        for (std::size_t mask = 0; mask < combos && pop.size() < cfg_.population; ++mask) {
            Evaluated e;
            for (std::size_t b = 0; b < blocks_.size(); ++b)
                e.genes.insert(e.genes.end(), blocks_[b].times.size(), (mask >> b) & 1 ? blocks_[b].hi : blocks_[b].lo);
            pop.push_back(std::move(e));
        }
        for (double frac : {0.5, 0.25, 0.75}) {
            if (pop.size() >= cfg_.population) break;
            Evaluated e;
            for (const auto& b : blocks_) e.genes.insert(e.genes.end(), b.times.size(), b.lo + frac * (b.hi - b.lo));
            pop.push_back(std::move(e));
        }
        while (pop.size() < cfg_.population) {
            Evaluated e;
            for (const auto& b : blocks_)
                for (std::size_t j = 0; j < b.times.size(); ++j) e.genes.push_back(b.lo + unit_(rng_) * (b.hi - b.lo));
            pop.push_back(std::move(e));
        }
        return pop;
    }

    Evaluated tournament(const std::vector<Evaluated>& pop) {
        std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
        const Evaluated* best = &pop[pick(rng_)];
        for (std::size_t i = 1; i < cfg_.tournament; ++i) {
            const Evaluated* c = &pop[pick(rng_)];
            if (c->fitness > best->fitness) best = c;
        }
        return *best;
    }

    void mutate(Evaluated& e) {
        for (const auto& b : blocks_) {
            std::normal_distribution<double> noise(0.0, 0.2 * (b.hi - b.lo));
            for (std::size_t j = 0; j < b.times.size(); ++j)
                if (unit_(rng_) < cfg_.mutation_rate) {
                    double& g = e.genes[b.offset + j];
                    g = std::clamp(g + noise(rng_), b.lo, b.hi);
                }
        }
    }

    std::vector<TrajectorySlice> decode(const Evaluated& e) const {
        std::vector<TrajectorySlice> out;
        for (const auto& b : blocks_) {
            if (b.times.size() == 1) {
                out.emplace_back(b.original.grid(), std::vector<std::string>{b.var},
                                 std::vector<std::vector<double>>{std::vector<double>(b.original.size(), e.genes[b.offset])});
                continue;
            }
            CandidatePoints cp{b.var, b.original.span(), {}, b.lo, b.hi};
            for (std::size_t j = 0; j < b.times.size(); ++j) cp.points.emplace_back(b.times[j], e.genes[b.offset + j]);
            out.push_back(smooth_fit(cp, b.original.grid()));
        }
        return out;
    }

    double diversity(const std::vector<TrajectorySlice>& xs) const {
        double total = 0.0;
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            const auto& a = blocks_[i].original.column(0);
            const auto& b = xs[i].column(0);
            double range = blocks_[i].hi - blocks_[i].lo;
            double d2 = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) d2 += (b[k] - a[k]) * (b[k] - a[k]);
            double dist = std::sqrt(d2 / static_cast<double>(a.size())) / range;
            double shape = 0.0;
            if (a.size() > 1) {
                double num = 0.0, na = 0.0, nb = 0.0;
                for (std::size_t k = 1; k < a.size(); ++k) {
                    double da = a[k] - a[k - 1], db = b[k] - b[k - 1];
                    num += (db - da) * (db - da);
                    na += da * da;
                    nb += db * db;
                }
                shape = std::sqrt(num) / (std::sqrt(na) + std::sqrt(nb) + 1e-12);
            }
            total += 0.5 * dist + 0.5 * shape;
        }
        return total / static_cast<double>(blocks_.size());
    }

    bool rest_unchanged(const Trajectory& t) const {
        for (const auto& v : rest_)
            if (!equals_on(project(t, {v}), ctx_.c, ctx_.c.span(), ctx_.tol)) return false;
        return true;
    }

    void evaluate(Evaluated& e) {
        ++result_.evaluations;
        auto xs = decode(e);
        e.fitness = diversity(xs);
        std::vector<TrajectorySlice> originals;
        for (const auto& b : blocks_) originals.push_back(b.original);
        if (!is_alternative(originals, xs, ctx_.tol)) return;

        auto direct = run_counterfactual(ctx_, xs);
        bool need_frozen = !rest_.empty() && (!direct.trajectory || !rest_unchanged(*direct.trajectory));
        if (direct.violates) {
            e.violates = true;
            e.frozen = !need_frozen && !rest_.empty();
        } else if (need_frozen) {
            auto forced = xs;
            forced.insert(forced.end(), frozen_.begin(), frozen_.end());
            if (run_counterfactual(ctx_, forced).violates) {
                e.violates = true;
                e.frozen = true;
            }
        }
        if (e.violates && (!result_.found || e.fitness > result_.fitness)) {
            result_.found = true;
            result_.fitness = e.fitness;
            result_.x_prime = std::move(xs);
            result_.W = e.frozen ? rest_ : std::vector<std::string>{};
            result_.w = e.frozen ? frozen_ : std::vector<TrajectorySlice>{};
        }
    }

    const AnalysisContext& ctx_;
    const SearchConfig& cfg_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::vector<GeneBlock> blocks_;
    std::size_t genes_ = 0;
    std::vector<std::string> rest_;
    std::vector<TrajectorySlice> frozen_;
    HeuristicResult result_;
};

}  // namespace

HeuristicResult search_heuristic(const AnalysisContext& ctx, const std::vector<std::string>& X,
                                 const std::vector<TimeInterval>& intervals, const SearchConfig& cfg,
                                 std::size_t generations, std::uint64_t seed) {
    return Ga(ctx, X, intervals, cfg, seed).run(std::max<std::size_t>(1, generations));
}

std::optional<CauseCandidate> GaSubsetSearcher::find(const AnalysisContext& ctx, const CausalModel&,
                                                     const std::vector<TrajectorySlice>& x, std::size_t budget) const {
    std::vector<std::string> X;
    std::vector<TimeInterval> ivs;
    for (const auto& s : x) {
        if (s.variables().size() != 1) throw ContractError("expected single-variable slices");
        X.push_back(s.variables().front());
        ivs.push_back(s.span());
    }
    std::size_t gens = std::max<std::size_t>(1, budget / cfg_.population);
    auto res = search_heuristic(ctx, X, ivs, cfg_, gens, cell_seed(cfg_.seed ^ 0xac3ac3ull, X, ivs));
    if (!res.found) return std::nullopt;
    return CauseCandidate{x, res.x_prime, res.W, res.w};
}

namespace {

struct Cell {
    std::vector<std::string> X;
    std::vector<TimeInterval> intervals;
    double weight = 1.0;
    std::size_t granularity = 1;
    bool focus = false;
};

std::string cell_key(const Cell& c, const TimeGrid& grid) {
    std::string k;
    for (std::size_t i = 0; i < c.X.size(); ++i)
        k += c.X[i] + "[" + std::to_string(grid.snap(c.intervals[i].lo)) + "," + std::to_string(grid.snap(c.intervals[i].hi)) + ")";
    return k;
}

class Runner {
public:
    Runner(const AnalysisContext& ctx, const SearchConfig& cfg, SearchOutcome& out, CausalModel& m)
        : ctx_(ctx), cfg_(cfg), out_(out), m_(m), ac3_(cfg), constants_(ctx.system.constants()) {}

    double fault() const { return out_.fault_time; }

    // Runs a wave of cells, checks hits with is_cause in order; returns new records.
    std::vector<CauseRecord> wave(std::vector<Cell> cells) {
        std::vector<Cell> todo;
        for (auto& c : cells)
            if (seen_.insert(cell_key(c, ctx_.c.grid())).second) todo.push_back(std::move(c));
        std::stable_sort(todo.begin(), todo.end(), [](const Cell& a, const Cell& b) { return a.weight > b.weight; });

        std::vector<HeuristicResult> results(todo.size());
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (std::size_t i; (i = next.fetch_add(1)) < todo.size();) {
                const Cell& c = todo[i];
                auto gens = std::max<std::size_t>(
                    4, static_cast<std::size_t>(std::ceil(static_cast<double>(cfg_.generations) * c.weight)));
                results[i] = search_heuristic(ctx_, c.X, c.intervals, cfg_, gens, cell_seed(cfg_.seed, c.X, c.intervals));
            }
        };
        std::size_t nworkers = std::min(cfg_.worker_count(), todo.size());
        if (nworkers <= 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (std::size_t i = 0; i < nworkers; ++i) pool.emplace_back(work);
            for (auto& t : pool) t.join();
        }

        std::vector<CauseRecord> found;
        for (std::size_t i = 0; i < todo.size(); ++i) {
            const Cell& c = todo[i];
            const auto& r = results[i];
            out_.evaluations += r.evaluations;
            ExploredCell ex{c.X, c.intervals, c.granularity, c.weight, r.found, false, c.focus};
            if (r.found) {
                CauseCandidate cand;
                for (std::size_t j = 0; j < c.X.size(); ++j) cand.x.push_back(slice(ctx_.c, c.X[j], r.x_prime[j].span()));
                cand.x_prime = r.x_prime;
                cand.W = r.W;
                cand.w = r.w;
                CauseVerdict v = is_cause(ctx_, m_, cand, ac3_, cfg_.ac3_budget());
                if (v.is_cause()) {
                    ex.cause = true;
                    CauseRecord rec{ctx_.trajectory_id, cand.x, cand.x_prime, cand.W, c.granularity,
                                    cfg_.ac3_budget(), std::move(*v.counterfactual)};
                    if (keys_.insert(rec.key(ctx_.c.grid())).second) found.push_back(std::move(rec));
                }
            }
            out_.explored.push_back(std::move(ex));
        }
        return found;
    }

    Cell make_cell(const std::vector<std::string>& X, const std::vector<TimeInterval>& ivs, std::size_t g, bool focus) const {
        Cell c{X, ivs, 0.0, g, focus};
        bool any_interval = false;
        for (std::size_t i = 0; i < X.size(); ++i) {
            if (constants_.count(X[i])) continue;
            any_interval = true;
            c.weight = std::max(c.weight, attenuation(fault(), ivs[i], cfg_.lambda));
        }
        if (!any_interval) c.weight = 1.0;
        return c;
    }

    bool is_constant(const std::string& v) const { return constants_.count(v) != 0; }

private:
    const AnalysisContext& ctx_;
    const SearchConfig& cfg_;
    SearchOutcome& out_;
    CausalModel& m_;
    GaSubsetSearcher ac3_;
    std::set<std::string> constants_;
    std::set<std::string> seen_;
    std::set<std::string> keys_;
};

// Every choice of one interval per variable; constants always take the full span.
void product(const Runner& run, const std::vector<std::string>& X, const std::vector<std::vector<TimeInterval>>& options,
             std::size_t g, bool focus, std::vector<Cell>& out) {
    std::vector<std::size_t> idx(X.size(), 0);
    while (true) {
        std::vector<TimeInterval> ivs;
        for (std::size_t i = 0; i < X.size(); ++i) ivs.push_back(options[i][idx[i]]);
        out.push_back(run.make_cell(X, ivs, g, focus));
        std::size_t d = 0;
        while (d < idx.size() && ++idx[d] == options[d].size()) idx[d++] = 0;
        if (d == idx.size()) break;
    }
}

void combinations(const std::vector<std::string>& pool, std::size_t k, std::size_t start, std::vector<std::string>& cur,
                  std::vector<std::vector<std::string>>& out) {
    if (cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = start; i < pool.size(); ++i) {
        cur.push_back(pool[i]);
        combinations(pool, k, i + 1, cur, out);
        cur.pop_back();
    }
}

std::vector<CauseRecord> focus_with(Runner& run, const AnalysisContext& ctx, const CauseRecord& cause,
                                    const SearchConfig& cfg) {
    if (cause.granularity >= cfg.max_granularity) return {};
    auto fine = get_intervals(ctx.c, cfg.max_granularity);
    const auto& grid = ctx.c.grid();
    std::vector<std::string> X = cause.variables();
    std::vector<std::vector<TimeInterval>> options;
    for (const auto& s : cause.x) {
        const std::string& v = s.variables().front();
        if (run.is_constant(v)) {
            options.push_back({ctx.c.span()});
            continue;
        }
        std::size_t lo = grid.snap(s.span().lo), hi = grid.snap(s.span().hi);
        std::vector<TimeInterval> inside;
        for (const auto& iv : fine)
            if (grid.snap(iv.lo) >= lo && grid.snap(iv.hi) <= hi) inside.push_back(iv);
        if (inside.empty()) inside.push_back(s.span());
        options.push_back(std::move(inside));
    }
    std::vector<Cell> cells;
    product(run, X, options, cfg.max_granularity, true, cells);
    return run.wave(std::move(cells));
}

}  // namespace

std::vector<CauseRecord> focus_search(const AnalysisContext& ctx, CausalModel& m, const CauseRecord& cause,
                                      const SearchConfig& cfg, std::vector<ExploredCell>* explored) {
    cfg.validate();
    SearchOutcome out;
    out.fault_time = fault_time(ctx.phi, ctx.c, ctx.tol);
    Runner run(ctx, cfg, out, m);
    auto recs = focus_with(run, ctx, cause, cfg);
    if (explored) explored->insert(explored->end(), out.explored.begin(), out.explored.end());
    return recs;
}

SearchOutcome search(const AnalysisContext& ctx, const SearchConfig& cfg) {
    cfg.validate();
    auto started = std::chrono::steady_clock::now();
    SearchOutcome out;
    CausalModel m = ctx.initial_model();
    if (!satisfies_ac1(ctx, m, {})) return out;
    out.fault_time = fault_time(ctx.phi, ctx.c, ctx.tol);
    Runner run(ctx, cfg, out, m);

    const auto V = m.endogenous();
    std::set<std::string> confirmed;
    for (std::size_t size = 1; size <= cfg.max_cause_size; ++size) {
        std::vector<std::string> pool;
        for (const auto& v : V)
            if (!confirmed.count(v)) pool.push_back(v);
        if (pool.size() < size) break;
        std::vector<std::vector<std::string>> sets;
        std::vector<std::string> cur;
        combinations(pool, size, 0, cur, sets);

        std::vector<CauseRecord> found;
        for (std::size_t g : cfg.effective_schedule()) {
            auto ivs = get_intervals(ctx.c, g);
            std::vector<Cell> cells;
            for (const auto& X : sets) {
                std::vector<std::vector<TimeInterval>> options;
                for (const auto& v : X) options.push_back(run.is_constant(v) ? std::vector<TimeInterval>{ctx.c.span()} : ivs);
                product(run, X, options, g, false, cells);
            }
            found = run.wave(std::move(cells));
            if (!found.empty()) break;
        }
        std::vector<CauseRecord> refined;
        for (const auto& rec : found) {
            auto more = focus_with(run, ctx, rec, cfg);
            refined.insert(refined.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
        }
        for (auto* list : {&found, &refined})
            for (auto& rec : *list) {
                for (const auto& v : rec.variables()) confirmed.insert(v);
                out.causes.push_back(std::move(rec));
            }
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

}  // namespace cpscause
