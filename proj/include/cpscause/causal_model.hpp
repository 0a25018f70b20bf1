#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "cpscause/event.hpp"
#include "cpscause/model.hpp"
#include "cpscause/trajectory.hpp"

namespace cpscause {

// One intervened (variable, sample range) on the model grid.
struct AssignmentKey {
    std::string var;
    std::size_t begin = 0;
    std::size_t end = 0;
    auto operator<=>(const AssignmentKey&) const = default;
};
using Provenance = std::set<AssignmentKey>;

// A trajectory in R together with the interventions that produced it.
struct StoredTrajectory {
    std::shared_ptr<const Trajectory> trajectory;
    std::set<Provenance> provenance;
};

// Signature (U, V, R) plus equations. Values are immutable; update/add return copies
// that share trajectory storage.
class CausalModel {
public:
    CausalModel() = default;
    // R starts as {c}. `system` must already carry the chosen roles.
    CausalModel(SystemModel system, const Trajectory& c, double tol = kDefaultTol);

    const SystemModel& system() const { return system_; }
    const std::vector<std::string>& exogenous() const { return U_; }
    const std::vector<std::string>& endogenous() const { return V_; }
    const std::vector<StoredTrajectory>& store() const { return R_; }
    const Provenance& severed() const { return severed_; }
    const TimeGrid& grid() const { return grid_; }
    double tol() const { return tol_; }
    std::size_t slice_count() const { return slice_count_; }
    CausalModel with_slice_count(std::size_t k) const;

    AssignmentKey key_of(const TrajectorySlice& s, const std::string& var) const;

private:
    friend CausalModel update(const CausalModel&, const std::vector<TrajectorySlice>&);
    friend CausalModel add_trajectory(const CausalModel&, const Trajectory&, const Provenance&);

    SystemModel system_;
    std::vector<std::string> U_;
    std::vector<std::string> V_;
    std::vector<StoredTrajectory> R_;
    Provenance severed_;
    TimeGrid grid_;
    double tol_ = kDefaultTol;
    std::size_t slice_count_ = 1;
};

// M_{X<-x}: keep R entries agreeing with every assigned slice; mark the slices severed.
CausalModel update(const CausalModel& m, const std::vector<TrajectorySlice>& assignments);

// Grows R; out-of-bounds trajectories are rejected with BoundsError.
CausalModel add_trajectory(const CausalModel& m, const Trajectory& t, const Provenance& provenance = {});

// Unique R trajectory for context u under m's interventions.
const Trajectory& resolve_context(const CausalModel& m, const Trajectory& u);
bool satisfies(const CausalModel& m, const Trajectory& u, const EventExpression& phi);
bool satisfies(const CausalModel& m, const Trajectory& u, const CauseEvent& ce);

// First bounds violation, if any.
void check_bounds(const SystemModel& system, const Trajectory& t, double tol = kDefaultTol);

}  // namespace cpscause
