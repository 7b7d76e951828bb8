#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace piergen {

/// Integer arithmetic expression over named parameters.
///
/// Supports `+`, `-`, `*`, exact `/` (non-divisible operands are an error),
/// unary minus, integer literals and identifiers. Evaluation is exact over
/// 64-bit integers.
class Expr {
public:
    enum class Op { Constant, Variable, Add, Sub, Mul, Div, Neg };

    static Expr constant(std::int64_t value);
    static Expr variable(std::string name);
    static Expr binary(Op op, Expr lhs, Expr rhs);
    static Expr negate(Expr operand);

    /// Parses infix text such as `(num_piles - 1) * pile_spacing`.
    static Expr parse(std::string_view text);

    Op op() const noexcept { return op_; }
    std::int64_t value() const noexcept { return value_; }
    const std::string& name() const noexcept { return name_; }
    const std::vector<Expr>& operands() const noexcept { return operands_; }

    /// Identifiers in first-appearance order, without duplicates.
    std::vector<std::string> variables() const;

    /// Canonical infix rendering; `parse(to_string())` reproduces the tree.
    std::string to_string() const;

    /// Result of evaluating with a lookup function.
    struct Outcome {
        enum class Status { Ok, Missing, NonIntegral };
        Status status = Status::Ok;
        std::int64_t value = 0;
        std::string missing;  // name of the first unresolved identifier
    };
    using Lookup = std::function<std::optional<std::int64_t>(const std::string&)>;
    Outcome evaluate(const Lookup& lookup) const;

    friend bool operator==(const Expr&, const Expr&) = default;

private:
    Op op_ = Op::Constant;
    std::int64_t value_ = 0;
    std::string name_;
    std::vector<Expr> operands_;
};

}  // namespace piergen
