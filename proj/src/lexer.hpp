#pragma once

// Shared tokenizer for arithmetic expressions, guards and interval events.

#include <optional>
#include <string>
#include <string_view>

#include "cpscause/errors.hpp"
#include "cpscause/event.hpp"

namespace cpscause::detail {

enum class Tok { End, Number, Ident, Plus, Minus, Star, Slash, LParen, RParen, Cmp, And, Or, Not };

struct Subscript {
    bool is_dom = false;
    double lo = 0.0;
    double hi = 0.0;
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    CmpOp op = CmpOp::Eq;
    std::optional<Subscript> sub;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return cur_; }
    Token take() {
        Token t = cur_;
        advance();
        return t;
    }
    [[noreturn]] void fail(const std::string& msg, const Token& at) const { throw ParseError(msg, at.line, at.col); }
    [[noreturn]] void fail(const std::string& msg) const { fail(msg, cur_); }

private:
    void advance();
    char ch(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }
    void bump();
    void skip_space();
    double lex_number();
    Subscript lex_subscript();

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token cur_;
};

Expression parse_expression(Lexer& lx);

}  // namespace cpscause::detail
