#pragma once

// Deformation-function expression language.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 'p' | func '(' expr ')' | '(' expr ')'
//   func    := exp | log | sqrt | abs
//
// Literals are decimal or scientific (1, 0.5, .5, 2e-3). ASCII only.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "gupeq/errors.hpp"

namespace gupeq {

enum class ExprKind {
    constant,
    variable,
    negate,
    add,
    sub,
    mul,
    div,
    pow,
    exp,
    log,
    sqrt,
    abs,
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprKind kind;
    double value = 0.0;  // constant only
    ExprPtr lhs;         // unary operand / function argument / left operand
    ExprPtr rhs;         // right operand of binary nodes
};

/// Immutable expression tree in the single variable `p`.
class ExprAst {
public:
    explicit ExprAst(ExprPtr root);

    [[nodiscard]] const ExprNode& root() const noexcept { return *root_; }

    /// IEEE-double evaluation. Throws DomainError instead of producing NaN/inf.
    [[nodiscard]] double eval(double p) const;

    /// Fully parenthesised source text; parse(to_string()) is structurally equal.
    [[nodiscard]] std::string to_string() const;

    [[nodiscard]] std::size_t node_count() const;

    friend bool operator==(const ExprAst& a, const ExprAst& b);

private:
    ExprPtr root_;
};

/// Throws ParseError with a 1-based byte position.
[[nodiscard]] ExprAst parse(std::string_view source);

[[nodiscard]] inline double eval(const ExprAst& ast, double p) { return ast.eval(p); }

struct SampleRange {
    double p_min;
    double p_max;
};

inline constexpr double kPositivityFloor = 1e-12;
inline constexpr int kMinValidationSamples = 64;

/// A deformation function that passed the positivity screen on its sample range.
struct DeformationSpec {
    std::string source;
    ExprAst ast;
    double lower_bound_estimate;
    SampleRange sample_range;
    int sample_count;

    [[nodiscard]] double operator()(double p) const { return ast.eval(p); }
};

/// Screens f for positivity on a uniform sample plus local refinement around
/// the minimum. Throws PositivityError reporting where f fails, DomainError
/// when f cannot be evaluated, PreconditionError on bad arguments.
[[nodiscard]] DeformationSpec validate_deformation(const ExprAst& ast, SampleRange range, int samples,
                                                   double floor = kPositivityFloor,
                                                   std::string source = {});

/// Convenience: parse + validate.
[[nodiscard]] DeformationSpec make_deformation(std::string_view source, SampleRange range,
                                               int samples = 1024);

}  // namespace gupeq
