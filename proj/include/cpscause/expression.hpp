#pragma once

#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cpscause/trajectory.hpp"

namespace cpscause {

// Arithmetic over variables, numeric literals and the time symbol `t`.
class Expression {
public:
    enum class Kind { Number, Variable, Time, Negate, Add, Sub, Mul, Div };

    struct Node {
        Kind kind = Kind::Number;
        double value = 0.0;
        std::string name;
        int lhs = -1;
        int rhs = -1;
    };

    Expression() = default;
    static Expression number(double v);
    static Expression variable(std::string name);
    static Expression parse(std::string_view text);

    // Used by the parser to build trees bottom-up.
    static Expression unary(Kind k, Expression operand);
    static Expression binary(Kind k, Expression a, Expression b);

    bool empty() const { return nodes_.empty(); }
    std::set<std::string> variables() const;
    bool uses_time() const;
    std::string to_string() const;

    const std::vector<Node>& nodes() const { return nodes_; }
    int root() const { return root_; }

private:
    int append(const Expression& other);
    std::vector<Node> nodes_;
    int root_ = -1;
};

// Flat stack program; variables are resolved to row indices once.
class CompiledExpression {
public:
    CompiledExpression() = default;
    CompiledExpression(const Expression& e, const std::function<int(const std::string&)>& resolve);

    // `row[i]` is the value of the variable resolved to index i.
    double eval(const double* row, double time) const;
    bool constant() const { return constant_; }

private:
    enum class Op : unsigned char { Push, Load, Time, Neg, Add, Sub, Mul, Div };
    struct Instr {
        Op op;
        int index;
        double value;
    };
    void emit(const Expression& e, int node, const std::function<int(const std::string&)>& resolve);
    std::vector<Instr> code_;
    std::size_t depth_ = 0;
    bool constant_ = true;
};

// Pointwise evaluation; the result has a single column named "value".
Trajectory eval_expression(const Expression& e, const Trajectory& t);
std::vector<double> eval_column(const Expression& e, const Trajectory& t);

}  // namespace cpscause
