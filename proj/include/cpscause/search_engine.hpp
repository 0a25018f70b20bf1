#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cpscause/cause_checker.hpp"

namespace cpscause {

struct SearchConfig {
    std::vector<std::size_t> schedule{2, 4, 10};
    std::size_t max_granularity = 10;
    std::size_t max_cause_size = 3;
    std::size_t population = 50;
    std::size_t generations = 40;
    std::size_t tournament = 3;
    double mutation_rate = 0.1;
    double crossover_rate = 0.8;
    std::size_t control_points = 8;
    double lambda = 0.5;  // attenuation
    std::uint64_t seed = 1;
    double ac3_fraction = 0.2;
    std::size_t threads = 0;  // 0: CPSCAUSE_THREADS or hardware concurrency

    void validate() const;
    std::size_t ac3_budget() const;
    std::size_t worker_count() const;
    // Schedule entries up to max_granularity.
    std::vector<std::size_t> effective_schedule() const;
};

struct CandidatePoints {
    std::string var;
    TimeInterval interval;
    std::vector<std::pair<double, double>> points;  // (time, value)
    double min = -1e300;
    double max = 1e300;
};

// `granularity` equal pieces of dom(c); boundaries are snapped to the grid.
std::vector<TimeInterval> get_intervals(const Trajectory& c, std::size_t granularity);

// Least-squares polynomial (degree min(4, points-1)) sampled on `grid`, clamped to [min,max].
// Falls back to piecewise-linear interpolation when the system is rank deficient.
TrajectorySlice smooth_fit(const CandidatePoints& points, const TimeGrid& grid);

double attenuation(double t_fault, const TimeInterval& iv, double lambda);

struct HeuristicResult {
    bool found = false;
    std::vector<TrajectorySlice> x_prime;
    std::vector<std::string> W;
    std::vector<TrajectorySlice> w;
    double fitness = 0.0;
    std::size_t evaluations = 0;
};

// GA over control points for the variables X, each on its own interval.
HeuristicResult search_heuristic(const AnalysisContext& ctx, const std::vector<std::string>& X,
                                 const std::vector<TimeInterval>& intervals, const SearchConfig& cfg,
                                 std::size_t generations, std::uint64_t seed);

std::uint64_t cell_seed(std::uint64_t seed, const std::vector<std::string>& X, const std::vector<TimeInterval>& ivs);

// GA-backed subset searcher for AC3; `budget` counts evaluations.
class GaSubsetSearcher : public SubsetSearcher {
public:
    explicit GaSubsetSearcher(SearchConfig cfg) : cfg_(std::move(cfg)) {}
    std::optional<CauseCandidate> find(const AnalysisContext& ctx, const CausalModel& m,
                                       const std::vector<TrajectorySlice>& x, std::size_t budget) const override;

private:
    SearchConfig cfg_;
};

struct ExploredCell {
    std::vector<std::string> X;
    std::vector<TimeInterval> intervals;
    std::size_t granularity = 0;
    double weight = 0.0;
    bool violates = false;  // GA found a not-Phi alternative
    bool cause = false;     // confirmed by is_cause
    bool focus = false;
};

struct SearchOutcome {
    std::vector<CauseRecord> causes;
    std::vector<ExploredCell> explored;
    std::size_t evaluations = 0;
    double seconds = 0.0;
    double fault_time = 0.0;
};

SearchOutcome search(const AnalysisContext& ctx, const SearchConfig& cfg);

// Refines a record found below max granularity into max-granularity subintervals.
std::vector<CauseRecord> focus_search(const AnalysisContext& ctx, CausalModel& m, const CauseRecord& cause,
                                      const SearchConfig& cfg, std::vector<ExploredCell>* explored = nullptr);

}  // namespace cpscause
