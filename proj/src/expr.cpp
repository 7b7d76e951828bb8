#include "piergen/expr.hpp"

#include <algorithm>
#include <cctype>

#include "piergen/errors.hpp"

namespace piergen {

Expr Expr::constant(std::int64_t value) {
    Expr e;
    e.op_ = Op::Constant;
    e.value_ = value;
    return e;
}

Expr Expr::variable(std::string name) {
    Expr e;
    e.op_ = Op::Variable;
    e.name_ = std::move(name);
    return e;
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
    Expr e;
    e.op_ = op;
    e.operands_.push_back(std::move(lhs));
    e.operands_.push_back(std::move(rhs));
    return e;
}

Expr Expr::negate(Expr operand) {
    Expr e;
    e.op_ = Op::Neg;
    e.operands_.push_back(std::move(operand));
    return e;
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr parse_all() {
        Expr e = parse_sum();
        skip_space();
        if (pos_ != text_.size()) {
            fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        }
        return e;
    }

private:
    Expr parse_sum() {
        Expr lhs = parse_product();
        for (;;) {
            skip_space();
            if (accept('+')) {
                lhs = Expr::binary(Expr::Op::Add, std::move(lhs), parse_product());
            } else if (accept('-')) {
                lhs = Expr::binary(Expr::Op::Sub, std::move(lhs), parse_product());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_product() {
        Expr lhs = parse_unary();
        for (;;) {
            skip_space();
            if (accept('*')) {
                lhs = Expr::binary(Expr::Op::Mul, std::move(lhs), parse_unary());
            } else if (accept('/')) {
                lhs = Expr::binary(Expr::Op::Div, std::move(lhs), parse_unary());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_unary() {
        skip_space();
        if (accept('-')) return Expr::negate(parse_unary());
        return parse_atom();
    }

    Expr parse_atom() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (accept('(')) {
            Expr inner = parse_sum();
            skip_space();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::int64_t v = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                v = v * 10 + (text_[pos_] - '0');
                ++pos_;
            }
            return Expr::constant(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            return Expr::variable(std::string(text_.substr(start, pos_ - start)));
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ExpressionSyntaxError("in '" + std::string(text_) + "' at offset " +
                                    std::to_string(pos_) + ": " + what);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

int precedence(Expr::Op op) {
    switch (op) {
        case Expr::Op::Add:
        case Expr::Op::Sub: return 1;
        case Expr::Op::Mul:
        case Expr::Op::Div: return 2;
        case Expr::Op::Neg: return 3;
        default: return 4;
    }
}

void render(const Expr& e, std::string& out) {
    switch (e.op()) {
        case Expr::Op::Constant:
            if (e.value() < 0) {
                out += "(" + std::to_string(e.value()) + ")";
            } else {
                out += std::to_string(e.value());
            }
            return;
        case Expr::Op::Variable: out += e.name(); return;
        case Expr::Op::Neg: {
            out += "-";
            const Expr& x = e.operands()[0];
            bool paren = precedence(x.op()) < 3;
            if (paren) out += "(";
            render(x, out);
            if (paren) out += ")";
            return;
        }
        default: break;
    }
    const char* sym = e.op() == Expr::Op::Add   ? " + "
                      : e.op() == Expr::Op::Sub ? " - "
                      : e.op() == Expr::Op::Mul ? " * "
                                                : " / ";
    const int p = precedence(e.op());
    const Expr& lhs = e.operands()[0];
    const Expr& rhs = e.operands()[1];
    // Left-associative: the right operand needs parentheses at equal precedence.
    bool lparen = precedence(lhs.op()) < p;
    bool rparen = precedence(rhs.op()) <= p;
    if (lparen) out += "(";
    render(lhs, out);
    if (lparen) out += ")";
    out += sym;
    if (rparen) out += "(";
    render(rhs, out);
    if (rparen) out += ")";
}

void collect(const Expr& e, std::vector<std::string>& names) {
    if (e.op() == Expr::Op::Variable) {
        if (std::find(names.begin(), names.end(), e.name()) == names.end()) names.push_back(e.name());
        return;
    }
    for (const auto& child : e.operands()) collect(child, names);
}

}  // namespace

Expr Expr::parse(std::string_view text) { return Parser(text).parse_all(); }

std::vector<std::string> Expr::variables() const {
    std::vector<std::string> names;
    collect(*this, names);
    return names;
}

std::string Expr::to_string() const {
    std::string out;
    render(*this, out);
    return out;
}

Expr::Outcome Expr::evaluate(const Lookup& lookup) const {
    Outcome r;
    switch (op_) {
        case Op::Constant: r.value = value_; return r;
        case Op::Variable: {
            auto v = lookup(name_);
            if (!v) {
                r.status = Outcome::Status::Missing;
                r.missing = name_;
            } else {
                r.value = *v;
            }
            return r;
        }
        case Op::Neg: {
            r = operands_[0].evaluate(lookup);
            r.value = -r.value;
            return r;
        }
        default: break;
    }
    Outcome a = operands_[0].evaluate(lookup);
    if (a.status != Outcome::Status::Ok) return a;
    Outcome b = operands_[1].evaluate(lookup);
    if (b.status != Outcome::Status::Ok) return b;
    switch (op_) {
        case Op::Add: r.value = a.value + b.value; break;
        case Op::Sub: r.value = a.value - b.value; break;
        case Op::Mul: r.value = a.value * b.value; break;
        case Op::Div:
            if (b.value == 0 || a.value % b.value != 0) {
                r.status = Outcome::Status::NonIntegral;
            } else {
                r.value = a.value / b.value;
            }
            break;
        default: break;
    }
    return r;
}

}  // namespace piergen
