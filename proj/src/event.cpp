#include "cpscause/event.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lexer.hpp"

namespace cpscause {

std::string_view to_string(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Lt: return "<";
        case CmpOp::Gt: return ">";
        case CmpOp::Le: return "<=";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

bool compare(CmpOp op, double a, double b, double tol) {
    switch (op) {
        case CmpOp::Eq: return std::abs(a - b) <= tol;
        case CmpOp::Lt: return a < b;
        case CmpOp::Gt: return a > b;
        case CmpOp::Le: return a <= b;
        case CmpOp::Ge: return a >= b;
    }
    return false;
}

EventExpression EventExpression::conjunction(std::vector<EventExpression> parts) {
    if (parts.size() == 1) return std::move(parts.front());
    EventExpression e;
    e.kind_ = Kind::And;
    e.children_ = std::move(parts);
    return e;
}

EventExpression EventExpression::disjunction(std::vector<EventExpression> parts) {
    if (parts.empty()) throw ContractError("empty disjunction");
    if (parts.size() == 1) return std::move(parts.front());
    EventExpression e;
    e.kind_ = Kind::Or;
    e.children_ = std::move(parts);
    return e;
}

namespace {

using detail::Lexer;
using detail::Tok;

class EventParser {
public:
    EventParser(std::string_view text, bool pointwise) : lx_(text), pointwise_(pointwise) {}

    EventExpression run() {
        if (lx_.peek().kind == Tok::End) lx_.fail("empty event expression");
        EventExpression e = parse_or();
        if (lx_.peek().kind != Tok::End) lx_.fail("unexpected '" + lx_.peek().text + "'");
        return e;
    }

private:
    EventExpression parse_or() {
        std::vector<EventExpression> parts{parse_and()};
        while (lx_.peek().kind == Tok::Or) {
            lx_.take();
            parts.push_back(parse_and());
        }
        return EventExpression::disjunction(std::move(parts));
    }

    EventExpression parse_and() {
        std::vector<EventExpression> parts{parse_unary()};
        while (lx_.peek().kind == Tok::And) {
            lx_.take();
            parts.push_back(parse_unary());
        }
        return EventExpression::conjunction(std::move(parts));
    }

    EventExpression parse_unary() {
        if (lx_.peek().kind == Tok::Not) {
            lx_.take();
            return negate(parse_unary());
        }
        if (lx_.peek().kind == Tok::LParen) {
            lx_.take();
            EventExpression e = parse_or();
            if (lx_.peek().kind != Tok::RParen) lx_.fail("expected ')'");
            lx_.take();
            return e;
        }
        return parse_primitive();
    }

    EventExpression parse_primitive() {
        if (lx_.peek().kind != Tok::Ident) {
            if (lx_.peek().kind == Tok::End) lx_.fail("expected a variable, found end of input");
            lx_.fail("expected a variable on the left of a comparison, found '" + lx_.peek().text + "'");
        }
        PrimitiveEvent p;
        p.lhs = lx_.take().text;
        if (lx_.peek().kind != Tok::Cmp) {
            if (lx_.peek().kind == Tok::End) lx_.fail("expected comparison operator after '" + p.lhs + "'");
            lx_.fail("expected comparison operator, found '" + lx_.peek().text + "'");
        }
        detail::Token cmp = lx_.take();
        p.op = cmp.op;
        if (cmp.sub) {
            if (!cmp.sub->is_dom) {
                if (pointwise_) lx_.fail("conditions are pointwise; interval subscripts are not allowed", cmp);
                p.interval = TimeInterval(cmp.sub->lo, cmp.sub->hi);
            }
        } else if (!pointwise_) {
            lx_.fail("comparison needs an interval subscript such as " + cmp.text + "_[0,10) or " + cmp.text +
                         "_dom",
                     cmp);
        }
        p.rhs = detail::parse_expression(lx_);
        if (lx_.peek().kind == Tok::Cmp) lx_.fail("comparisons do not chain");
        return EventExpression(std::move(p));
    }

    Lexer lx_;
    bool pointwise_;
};

}  // namespace

EventExpression EventExpression::parse(std::string_view text) { return EventParser(text, false).run(); }
EventExpression EventExpression::parse_condition(std::string_view text) { return EventParser(text, true).run(); }

std::set<std::string> EventExpression::variables() const {
    std::set<std::string> out;
    if (kind_ == Kind::Primitive) {
        out = prim_.rhs.variables();
        if (prim_.lhs != "t") out.insert(prim_.lhs);
        return out;
    }
    for (const auto& c : children_) {
        auto v = c.variables();
        out.insert(v.begin(), v.end());
    }
    return out;
}

std::string EventExpression::to_string() const {
    if (kind_ == Kind::Primitive) {
        std::string s = prim_.lhs + " " + std::string(cpscause::to_string(prim_.op)) + "_";
        s += prim_.interval ? "[" + format_double(prim_.interval->lo) + "," + format_double(prim_.interval->hi) + ")"
                            : std::string("dom");
        s += " " + prim_.rhs.to_string();
        return prim_.negated ? "!(" + s + ")" : s;
    }
    if (children_.empty()) return "true";
    std::string sep = kind_ == Kind::And ? " && " : " || ";
    std::string s;
    for (std::size_t i = 0; i < children_.size(); ++i) {
        if (i) s += sep;
        const auto& c = children_[i];
        bool wrap = c.kind() != Kind::Primitive && c.kind() != kind_;
        s += wrap ? "(" + c.to_string() + ")" : c.to_string();
    }
    return s;
}

EventExpression negate(const EventExpression& e) {
    if (e.kind() == EventExpression::Kind::Primitive) {
        PrimitiveEvent p = e.primitive();
        p.negated = !p.negated;
        return EventExpression(std::move(p));
    }
    if (e.children().empty()) throw ContractError("cannot negate the empty conjunction");
    std::vector<EventExpression> parts;
    for (const auto& c : e.children()) parts.push_back(negate(c));
    return e.kind() == EventExpression::Kind::And ? EventExpression::disjunction(std::move(parts))
                                                  : EventExpression::conjunction(std::move(parts));
}

namespace {

struct PrimEval {
    IndexRange range;
    std::size_t first_fail = 0;  // index of the first failing sample, or range.end
};

PrimEval eval_primitive(const PrimitiveEvent& p, const Trajectory& t, double tol) {
    IndexRange r = p.interval ? t.range_of(*p.interval) : IndexRange{0, t.size()};
    auto resolve = [&](const std::string& name) { return static_cast<int>(t.index_of(name)); };
    CompiledExpression rhs(p.rhs, resolve);
    bool lhs_time = p.lhs == "t" && !t.has("t");
    const std::vector<double>* lhs = lhs_time ? nullptr : &t.column(p.lhs);
    std::vector<double> row(t.variables().size());
    for (std::size_t k = r.begin; k < r.end; ++k) {
        double time = t.grid().time(k);
        double rv;
        if (rhs.constant()) {
            rv = rhs.eval(nullptr, time);
        } else {
            for (std::size_t i = 0; i < row.size(); ++i) row[i] = t.column(i)[k];
            rv = rhs.eval(row.data(), time);
        }
        double lv = lhs ? (*lhs)[k] : time;
        if (!compare(p.op, lv, rv, tol)) return {r, k};
    }
    return {r, r.end};
}

bool holds_prim(const PrimitiveEvent& p, const Trajectory& t, double tol) {
    PrimEval ev = eval_primitive(p, t, tol);
    bool all = ev.first_fail == ev.range.end;
    return p.negated ? !all : all;
}

}  // namespace

bool holds(const EventExpression& phi, const Trajectory& t, double tol) {
    switch (phi.kind()) {
        case EventExpression::Kind::Primitive: return holds_prim(phi.primitive(), t, tol);
        case EventExpression::Kind::And:
            for (const auto& c : phi.children())
                if (!holds(c, t, tol)) return false;
            return true;
        case EventExpression::Kind::Or:
            for (const auto& c : phi.children())
                if (holds(c, t, tol)) return true;
            return false;
    }
    return false;
}

double fault_time(const EventExpression& phi, const Trajectory& t, double tol) {
    switch (phi.kind()) {
        case EventExpression::Kind::Primitive: {
            const auto& p = phi.primitive();
            PrimEval ev = eval_primitive(p, t, tol);
            bool all = ev.first_fail == ev.range.end;
            if (p.negated ? all : !all) throw ContractError("fault_time on a formula that does not hold");
            return t.grid().time(p.negated ? ev.first_fail : ev.range.begin);
        }
        case EventExpression::Kind::And: {
            double best = t.grid().start;
            for (const auto& c : phi.children()) best = std::max(best, fault_time(c, t, tol));
            return best;
        }
        case EventExpression::Kind::Or: {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : phi.children())
                if (holds(c, t, tol)) best = std::min(best, fault_time(c, t, tol));
            if (!std::isfinite(best)) throw ContractError("fault_time on a formula that does not hold");
            return best;
        }
    }
    return t.grid().start;
}

CompiledCondition::CompiledCondition(const EventExpression& e, const std::function<int(const std::string&)>& resolve) {
    build(e, resolve);
}

int CompiledCondition::build(const EventExpression& e, const std::function<int(const std::string&)>& resolve) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_[static_cast<std::size_t>(id)].kind = e.kind();
    if (e.kind() == EventExpression::Kind::Primitive) {
        const auto& p = e.primitive();
        Expression lhs = p.lhs == "t" ? Expression::unary(Expression::Kind::Time, {}) : Expression::variable(p.lhs);
        auto& n = nodes_[static_cast<std::size_t>(id)];
        n.lhs = CompiledExpression(lhs, resolve);
        n.rhs = CompiledExpression(p.rhs, resolve);
        n.op = p.op;
        n.negated = p.negated;
        return id;
    }
    std::vector<int> kids;
    for (const auto& c : e.children()) kids.push_back(build(c, resolve));
    nodes_[static_cast<std::size_t>(id)].children = std::move(kids);
    return id;
}

bool CompiledCondition::eval_node(int id, const double* row, double time, double tol) const {
    const auto& n = nodes_[static_cast<std::size_t>(id)];
    switch (n.kind) {
        case EventExpression::Kind::Primitive: {
            bool r = compare(n.op, n.lhs.eval(row, time), n.rhs.eval(row, time), tol);
            return n.negated ? !r : r;
        }
        case EventExpression::Kind::And:
            for (int c : n.children)
                if (!eval_node(c, row, time, tol)) return false;
            return true;
        case EventExpression::Kind::Or:
            for (int c : n.children)
                if (eval_node(c, row, time, tol)) return true;
            return false;
    }
    return false;
}

bool CompiledCondition::eval(const double* row, double time, double tol) const {
    if (nodes_.empty()) throw ContractError("evaluating an empty condition");
    return eval_node(0, row, time, tol);
}

bool holds(const CauseEvent& ce, const Trajectory& t, double tol) {
    for (const auto& s : ce.slices)
        if (!equals_on(t, s, s.span(), tol)) return false;
    return true;
}

namespace {

std::string slice_column(std::size_t n) { return "__slice_" + std::to_string(n); }

}  // namespace

EventExpression desugar(const CauseEvent& ce) {
    std::vector<EventExpression> parts;
    std::size_t n = 0;
    for (const auto& s : ce.slices)
        for (const auto& v : s.variables()) {
            PrimitiveEvent p;
            p.lhs = v;
            p.op = CmpOp::Eq;
            p.interval = s.span();
            p.rhs = Expression::variable(slice_column(n++));
            parts.emplace_back(std::move(p));
        }
    return EventExpression::conjunction(std::move(parts));
}

Trajectory bind_slices(const Trajectory& t, const CauseEvent& ce) {
    std::vector<std::string> vars = t.variables();
    std::vector<std::vector<double>> cols;
    for (std::size_t i = 0; i < vars.size(); ++i) cols.push_back(t.column(i));
    std::size_t n = 0;
    for (const auto& s : ce.slices) {
        long off = s.grid().offset_in(t.grid());
        if (off < 0 || off + static_cast<long>(s.size()) > static_cast<long>(t.size()))
            throw DomainError("cause slice lies outside the trajectory");
        for (std::size_t vi = 0; vi < s.variables().size(); ++vi) {
            std::vector<double> col = t.column(s.variables()[vi]);
            std::copy(s.column(vi).begin(), s.column(vi).end(), col.begin() + off);
            vars.push_back(slice_column(n++));
            cols.push_back(std::move(col));
        }
    }
    return Trajectory(t.grid(), std::move(vars), std::move(cols));
}

}  // namespace cpscause
