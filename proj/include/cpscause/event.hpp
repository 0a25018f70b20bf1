#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cpscause/expression.hpp"
#include "cpscause/trajectory.hpp"

namespace cpscause {

enum class CmpOp { Eq, Lt, Gt, Le, Ge };

std::string_view to_string(CmpOp op);
bool compare(CmpOp op, double lhs, double rhs, double tol);

struct PrimitiveEvent {
    std::string lhs;
    CmpOp op = CmpOp::Eq;
    std::optional<TimeInterval> interval;  // nullopt: dom of the trajectory being checked
    Expression rhs;
    bool negated = false;
};

class EventExpression {
public:
    enum class Kind { Primitive, And, Or };

    EventExpression() = default;
    explicit EventExpression(PrimitiveEvent p) : kind_(Kind::Primitive), prim_(std::move(p)) {}
    static EventExpression conjunction(std::vector<EventExpression> parts);
    static EventExpression disjunction(std::vector<EventExpression> parts);

    // Interval-subscripted surface syntax, e.g. `f >_[8,12) sp + 5 && !(x =_dom 0)`.
    static EventExpression parse(std::string_view text);
    // Pointwise guard syntax without subscripts, e.g. `battery >= critical`.
    static EventExpression parse_condition(std::string_view text);

    Kind kind() const { return kind_; }
    const PrimitiveEvent& primitive() const { return prim_; }
    const std::vector<EventExpression>& children() const { return children_; }

    std::set<std::string> variables() const;
    std::string to_string() const;

private:
    Kind kind_ = Kind::And;  // empty conjunction is "true"
    PrimitiveEvent prim_;
    std::vector<EventExpression> children_;
};

// Negation normal form: De Morgan down to primitives.
EventExpression negate(const EventExpression& e);

bool holds(const EventExpression& phi, const Trajectory& t, double tol = kDefaultTol);

// Earliest time the formula is witnessed on t (used to weight intervals). Requires holds(phi, t).
double fault_time(const EventExpression& phi, const Trajectory& t, double tol = kDefaultTol);

// Guard evaluated at a single row, used by the simulator.
class CompiledCondition {
public:
    CompiledCondition() = default;
    CompiledCondition(const EventExpression& e, const std::function<int(const std::string&)>& resolve);
    bool eval(const double* row, double time, double tol) const;

private:
    struct Node {
        EventExpression::Kind kind;
        CompiledExpression lhs;
        CmpOp op = CmpOp::Eq;
        CompiledExpression rhs;
        bool negated = false;
        std::vector<int> children;
    };
    int build(const EventExpression& e, const std::function<int(const std::string&)>& resolve);
    bool eval_node(int n, const double* row, double time, double tol) const;
    std::vector<Node> nodes_;
};

// (c |-> x): every slice agrees with the trajectory on the slice's own domain.
struct CauseEvent {
    std::vector<TrajectorySlice> slices;
};

bool holds(const CauseEvent& ce, const Trajectory& t, double tol = kDefaultTol);

// The conjunction of `var =_dom(x_i) __slice_i` events...
EventExpression desugar(const CauseEvent& ce);
// ...evaluated against t extended with the `__slice_i` columns.
Trajectory bind_slices(const Trajectory& t, const CauseEvent& ce);

}  // namespace cpscause
