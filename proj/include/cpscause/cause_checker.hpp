#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cpscause/causal_model.hpp"
#include "cpscause/event.hpp"
#include "cpscause/simulator.hpp"

namespace cpscause {

// Everything fixed for one analysis: the plant, the actual run c, its context u and the effect.
struct AnalysisContext {
    SystemModel system;
    std::shared_ptr<const Simulator> simulator;
    Trajectory c;
    Trajectory u;  // c restricted to scenario inputs
    EventExpression phi;
    EventExpression not_phi;
    std::string trajectory_id = "c";
    double tol = kDefaultTol;

    static AnalysisContext make(const SystemModel& system, const Scenario& scenario, const EventExpression& phi);
    CausalModel initial_model() const { return CausalModel(system, c, tol); }
    // Full-span slices of c over `vars`.
    std::vector<TrajectorySlice> frozen(const std::vector<std::string>& vars) const;
};

struct CauseCandidate {
    std::vector<TrajectorySlice> x;        // slices of c
    std::vector<TrajectorySlice> x_prime;  // alternatives, same vars and domains
    std::vector<std::string> W;
    std::vector<TrajectorySlice> w;        // slices of c over W

    std::vector<std::string> variables() const;
};

struct CauseRecord {
    std::string trajectory_id;
    std::vector<TrajectorySlice> x;
    std::vector<TrajectorySlice> x_prime;
    std::vector<std::string> W;
    std::size_t granularity = 1;
    std::size_t ac3_budget = 0;
    Trajectory counterfactual;

    std::vector<std::string> variables() const;
    std::vector<TimeInterval> intervals() const;
    // (variable, klo, khi) tuples on the parent grid, sorted; identity for deduplication.
    std::string key(const TimeGrid& grid) const;
    CauseCandidate candidate(const AnalysisContext& ctx) const;
};

// Looks for alternatives to a slice set that violate Phi. Used by AC3.
class SubsetSearcher {
public:
    virtual ~SubsetSearcher() = default;
    virtual std::optional<CauseCandidate> find(const AnalysisContext& ctx, const CausalModel& m,
                                               const std::vector<TrajectorySlice>& x, std::size_t budget) const = 0;
};

// Tries every combination of listed constant values for each variable and every W subset.
// Exhaustive for finite domains; used for the discrete cross-check.
class EnumeratingSearcher : public SubsetSearcher {
public:
    explicit EnumeratingSearcher(std::map<std::string, std::vector<double>> values) : values_(std::move(values)) {}
    std::optional<CauseCandidate> find(const AnalysisContext& ctx, const CausalModel& m,
                                       const std::vector<TrajectorySlice>& x, std::size_t budget) const override;

private:
    std::map<std::string, std::vector<double>> values_;
};

struct CounterfactualResult {
    bool violates = false;  // not-Phi holds
    std::optional<Trajectory> trajectory;
    std::string failure;  // set when simulation or bounds rejected the intervention
};

// Re-simulates with x' and w forced; no model bookkeeping.
CounterfactualResult run_counterfactual(const AnalysisContext& ctx, const std::vector<TrajectorySlice>& forced);

bool satisfies_ac1(const AnalysisContext& ctx, const CausalModel& m, const std::vector<TrajectorySlice>& x);
// On success `m` grows by the counterfactual trajectory.
bool satisfies_ac2(const AnalysisContext& ctx, CausalModel& m, const CauseCandidate& cand,
                   Trajectory* counterfactual = nullptr);
bool satisfies_ac3(const AnalysisContext& ctx, const CausalModel& m, const std::vector<TrajectorySlice>& x,
                   const SubsetSearcher& searcher, std::size_t budget);

struct CauseVerdict {
    bool ac1 = false;
    bool ac2 = false;
    bool ac3 = false;
    bool is_cause() const { return ac1 && ac2 && ac3; }
    std::optional<Trajectory> counterfactual;
};

CauseVerdict is_cause(const AnalysisContext& ctx, CausalModel& m, const CauseCandidate& cand,
                      const SubsetSearcher& searcher, std::size_t budget);

}  // namespace cpscause
