#include "cpscause/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "lexer.hpp"

namespace cpscause {

namespace detail {

void Lexer::bump() {
    if (ch() == '\n') {
        ++line_;
        col_ = 1;
    } else {
        ++col_;
    }
    ++pos_;
}

void Lexer::skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(ch()))) bump();
}

double Lexer::lex_number() {
    std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(ch())) || ch() == '.') bump();
    if (ch() == 'e' || ch() == 'E') {
        std::size_t save = pos_;
        int save_col = col_;
        bump();
        if (ch() == '+' || ch() == '-') bump();
        if (!std::isdigit(static_cast<unsigned char>(ch()))) {
            pos_ = save;
            col_ = save_col;
        } else {
            while (std::isdigit(static_cast<unsigned char>(ch()))) bump();
        }
    }
    double v = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_)
        throw ParseError("malformed number '" + std::string(src_.substr(start, pos_ - start)) + "'", line_, col_);
    return v;
}

Subscript Lexer::lex_subscript() {
    // Already consumed '_'.
    Subscript s;
    if (src_.substr(pos_, 3) == "dom") {
        for (int i = 0; i < 3; ++i) bump();
        s.is_dom = true;
        return s;
    }
    if (ch() != '[') throw ParseError("expected '[' or 'dom' after '_'", line_, col_);
    bump();
    auto bound = [&]() {
        skip_space();
        bool neg = false;
        if (ch() == '-') {
            neg = true;
            bump();
        }
        if (!std::isdigit(static_cast<unsigned char>(ch())) && ch() != '.')
            throw ParseError("expected number in interval", line_, col_);
        double v = lex_number();
        skip_space();
        return neg ? -v : v;
    };
    s.lo = bound();
    if (ch() != ',') throw ParseError("expected ',' in interval", line_, col_);
    bump();
    s.hi = bound();
    if (ch() == ']') throw ParseError("intervals are right-open; use ')'", line_, col_);
    if (ch() != ')') throw ParseError("expected ')' closing interval", line_, col_);
    bump();
    if (!(s.lo < s.hi)) throw ParseError("empty interval", line_, col_);
    return s;
}

void Lexer::advance() {
    skip_space();
    cur_ = Token{};
    cur_.line = line_;
    cur_.col = col_;
    if (pos_ >= src_.size()) {
        cur_.kind = Tok::End;
        return;
    }
    char c = ch();
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && std::isdigit(static_cast<unsigned char>(ch(1))))) {
        cur_.kind = Tok::Number;
        cur_.number = lex_number();
        return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (std::isalnum(static_cast<unsigned char>(ch())) || ch() == '_') bump();
        cur_.kind = Tok::Ident;
        cur_.text = std::string(src_.substr(start, pos_ - start));
        return;
    }
    auto single = [&](Tok k) {
        cur_.kind = k;
        cur_.text = std::string(1, c);
        bump();
    };
    switch (c) {
        case '+': return single(Tok::Plus);
        case '-': return single(Tok::Minus);
        case '*': return single(Tok::Star);
        case '/': return single(Tok::Slash);
        case '(': return single(Tok::LParen);
        case ')': return single(Tok::RParen);
        default: break;
    }
    if (c == '&' && ch(1) == '&') {
        cur_.kind = Tok::And;
        bump();
        bump();
        return;
    }
    if (c == '|' && ch(1) == '|') {
        cur_.kind = Tok::Or;
        bump();
        bump();
        return;
    }
    if (c == '!' && ch(1) != '=') return single(Tok::Not);
    if (c == '<' || c == '>' || c == '=') {
        bump();
        bool eq = false;
        if (ch() == '=') {
            eq = true;
            bump();
        }
        if (c == '<' && ch() == '>') throw ParseError("unknown operator '<>'", cur_.line, cur_.col);
        cur_.kind = Tok::Cmp;
        cur_.op = c == '=' ? CmpOp::Eq : c == '<' ? (eq ? CmpOp::Le : CmpOp::Lt) : (eq ? CmpOp::Ge : CmpOp::Gt);
        cur_.text = std::string(to_string(cur_.op));
        if (ch() == '_') {
            bump();
            cur_.sub = lex_subscript();
        }
        return;
    }
    std::string bad(1, c);
    if (c == '!' || c == '&' || c == '|') bad += ch(1);
    throw ParseError("unknown operator '" + bad + "'", line_, col_);
}

namespace {

Expression parse_sum(Lexer& lx);

Expression parse_atom(Lexer& lx) {
    const Token& t = lx.peek();
    switch (t.kind) {
        case Tok::Number: return Expression::number(lx.take().number);
        case Tok::Ident: {
            Token id = lx.take();
            if (id.text == "t") return Expression::unary(Expression::Kind::Time, Expression());
            return Expression::variable(id.text);
        }
        case Tok::Minus: lx.take(); return Expression::unary(Expression::Kind::Negate, parse_atom(lx));
        case Tok::LParen: {
            lx.take();
            Expression e = parse_sum(lx);
            if (lx.peek().kind != Tok::RParen) lx.fail("expected ')'");
            lx.take();
            return e;
        }
        case Tok::End: lx.fail("expected expression, found end of input");
        default: lx.fail("expected expression, found '" + t.text + "'");
    }
}

Expression parse_product(Lexer& lx) {
    Expression e = parse_atom(lx);
    while (lx.peek().kind == Tok::Star || lx.peek().kind == Tok::Slash) {
        auto k = lx.take().kind == Tok::Star ? Expression::Kind::Mul : Expression::Kind::Div;
        e = Expression::binary(k, std::move(e), parse_atom(lx));
    }
    return e;
}

Expression parse_sum(Lexer& lx) {
    Expression e = parse_product(lx);
    while (lx.peek().kind == Tok::Plus || lx.peek().kind == Tok::Minus) {
        auto k = lx.take().kind == Tok::Plus ? Expression::Kind::Add : Expression::Kind::Sub;
        e = Expression::binary(k, std::move(e), parse_product(lx));
    }
    return e;
}

}  // namespace

Expression parse_expression(Lexer& lx) { return parse_sum(lx); }

}  // namespace detail

Expression Expression::number(double v) {
    Expression e;
    e.nodes_.push_back({Kind::Number, v, {}, -1, -1});
    e.root_ = 0;
    return e;
}

Expression Expression::variable(std::string name) {
    Expression e;
    e.nodes_.push_back({Kind::Variable, 0.0, std::move(name), -1, -1});
    e.root_ = 0;
    return e;
}

int Expression::append(const Expression& other) {
    int base = static_cast<int>(nodes_.size());
    for (Node n : other.nodes_) {
        if (n.lhs >= 0) n.lhs += base;
        if (n.rhs >= 0) n.rhs += base;
        nodes_.push_back(std::move(n));
    }
    return other.root_ + base;
}

Expression Expression::unary(Kind k, Expression operand) {
    Expression e;
    if (k == Kind::Time) {
        e.nodes_.push_back({Kind::Time, 0.0, {}, -1, -1});
        e.root_ = 0;
        return e;
    }
    if (k != Kind::Negate) throw ContractError("not a unary operator");
    int a = e.append(operand);
    e.nodes_.push_back({k, 0.0, {}, a, -1});
    e.root_ = static_cast<int>(e.nodes_.size()) - 1;
    return e;
}

Expression Expression::binary(Kind k, Expression a, Expression b) {
    Expression e;
    int l = e.append(a);
    int r = e.append(b);
    e.nodes_.push_back({k, 0.0, {}, l, r});
    e.root_ = static_cast<int>(e.nodes_.size()) - 1;
    return e;
}

Expression Expression::parse(std::string_view text) {
    detail::Lexer lx(text);
    Expression e = detail::parse_expression(lx);
    if (lx.peek().kind != detail::Tok::End) lx.fail("unexpected '" + lx.peek().text + "' after expression");
    return e;
}

std::set<std::string> Expression::variables() const {
    std::set<std::string> out;
    for (const auto& n : nodes_)
        if (n.kind == Kind::Variable) out.insert(n.name);
    return out;
}

bool Expression::uses_time() const {
    for (const auto& n : nodes_)
        if (n.kind == Kind::Time) return true;
    return false;
}

namespace {

int precedence(Expression::Kind k) {
    switch (k) {
        case Expression::Kind::Add:
        case Expression::Kind::Sub: return 1;
        case Expression::Kind::Mul:
        case Expression::Kind::Div: return 2;
        case Expression::Kind::Negate: return 3;
        default: return 4;
    }
}

std::string render(const Expression& e, int n) {
    const auto& node = e.nodes()[static_cast<std::size_t>(n)];
    auto child = [&](int c, int min_prec) {
        std::string s = render(e, c);
        return precedence(e.nodes()[static_cast<std::size_t>(c)].kind) < min_prec ? "(" + s + ")" : s;
    };
    switch (node.kind) {
        case Expression::Kind::Number: {
            std::string s = format_double(node.value);
            return node.value < 0 ? "(" + s + ")" : s;
        }
        case Expression::Kind::Variable: return node.name;
        case Expression::Kind::Time: return "t";
        case Expression::Kind::Negate: return "-" + child(node.lhs, 3);
        case Expression::Kind::Add: return child(node.lhs, 1) + " + " + child(node.rhs, 1);
        case Expression::Kind::Sub: return child(node.lhs, 1) + " - " + child(node.rhs, 2);
        case Expression::Kind::Mul: return child(node.lhs, 2) + " * " + child(node.rhs, 2);
        case Expression::Kind::Div: return child(node.lhs, 2) + " / " + child(node.rhs, 3);
    }
    return {};
}

}  // namespace

std::string Expression::to_string() const { return empty() ? std::string() : render(*this, root_); }

CompiledExpression::CompiledExpression(const Expression& e, const std::function<int(const std::string&)>& resolve) {
    if (e.empty()) throw ContractError("cannot compile an empty expression");
    emit(e, e.root(), resolve);
    // Track the stack high-water mark so eval can use a fixed buffer.
    std::size_t d = 0;
    for (const auto& ins : code_) {
        switch (ins.op) {
            case Op::Push:
            case Op::Load:
            case Op::Time: ++d; break;
            case Op::Neg: break;
            default: --d; break;
        }
        depth_ = std::max(depth_, d);
    }
}

void CompiledExpression::emit(const Expression& e, int n, const std::function<int(const std::string&)>& resolve) {
    const auto& node = e.nodes()[static_cast<std::size_t>(n)];
    using K = Expression::Kind;
    switch (node.kind) {
        case K::Number: code_.push_back({Op::Push, 0, node.value}); return;
        case K::Variable: {
            int idx = resolve(node.name);
            if (idx < 0) throw DomainError("unknown variable '" + node.name + "'");
            code_.push_back({Op::Load, idx, 0.0});
            constant_ = false;
            return;
        }
        case K::Time:
            code_.push_back({Op::Time, 0, 0.0});
            constant_ = false;
            return;
        case K::Negate:
            emit(e, node.lhs, resolve);
            code_.push_back({Op::Neg, 0, 0.0});
            return;
        default: break;
    }
    emit(e, node.lhs, resolve);
    emit(e, node.rhs, resolve);
    Op op = node.kind == K::Add ? Op::Add : node.kind == K::Sub ? Op::Sub : node.kind == K::Mul ? Op::Mul : Op::Div;
    code_.push_back({op, 0, 0.0});
}

// The stack is written before it is read; zero-filling it costs ~2x in the simulator hot loop.
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
double CompiledExpression::eval(const double* row, double time) const {
    double small[32];
    std::vector<double> big;
    double* st = small;
    if (depth_ > 32) {
        big.resize(depth_);
        st = big.data();
    }
    std::size_t sp = 0;
    for (const auto& ins : code_) {
        switch (ins.op) {
            case Op::Push: st[sp++] = ins.value; break;
            case Op::Load: st[sp++] = row[ins.index]; break;
            case Op::Time: st[sp++] = time; break;
            case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
            case Op::Add: --sp; st[sp - 1] += st[sp]; break;
            case Op::Sub: --sp; st[sp - 1] -= st[sp]; break;
            case Op::Mul: --sp; st[sp - 1] *= st[sp]; break;
            case Op::Div:
                --sp;
                if (st[sp] == 0.0) throw EvalError("division by zero", time);
                st[sp - 1] /= st[sp];
                break;
        }
    }
    return st[0];
}
#pragma GCC diagnostic pop

std::vector<double> eval_column(const Expression& e, const Trajectory& t) {
    CompiledExpression ce(e, [&](const std::string& name) { return static_cast<int>(t.index_of(name)); });
    std::vector<double> row(t.variables().size());
    std::vector<double> out(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        for (std::size_t i = 0; i < row.size(); ++i) row[i] = t.column(i)[k];
        out[k] = ce.eval(row.data(), t.grid().time(k));
    }
    return out;
}

Trajectory eval_expression(const Expression& e, const Trajectory& t) {
    std::vector<double> col = eval_column(e, t);
    for (std::size_t k = 0; k < col.size(); ++k)
        if (!std::isfinite(col[k])) throw EvalError("non-finite value", t.grid().time(k));
    return Trajectory(t.grid(), {"value"}, {std::move(col)});
}

}  // namespace cpscause
