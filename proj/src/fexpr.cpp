#include "gupeq/fexpr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

namespace gupeq {

namespace {

constexpr int kMaxNesting = 200;

ExprPtr make_constant(double v) {
    return std::make_shared<const ExprNode>(ExprNode{ExprKind::constant, v, nullptr, nullptr});
}

ExprPtr make_node(ExprKind kind, ExprPtr lhs, ExprPtr rhs = nullptr) {
    return std::make_shared<const ExprNode>(ExprNode{kind, 0.0, std::move(lhs), std::move(rhs)});
}

bool is_function(ExprKind k) {
    return k == ExprKind::exp || k == ExprKind::log || k == ExprKind::sqrt || k == ExprKind::abs;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    ExprPtr parse_all() {
        for (std::size_t i = 0; i < src_.size(); ++i) {
            const auto c = static_cast<unsigned char>(src_[i]);
            if (c >= 0x80 || (c < 0x20 && c != '\t' && c != '\n' && c != '\r')) {
                fail("non-ASCII or control byte", i, "printable ASCII");
            }
        }
        skip_ws();
        if (at_end()) {
            fail("empty expression", pos_, "operand");
        }
        auto root = parse_expr();
        skip_ws();
        if (!at_end()) {
            if (src_[pos_] == ')') {
                fail("unbalanced parenthesis: unexpected ')'", pos_, "operator or end of input");
            }
            fail(std::string("unexpected '") + src_[pos_] + "'", pos_, "operator or end of input");
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg, std::size_t at, const std::string& expected) const {
        const std::size_t position = at + 1;
        std::string what = msg;
        if (at >= src_.size()) {
            what += " at end of input";
        }
        what += " (position " + std::to_string(position) + ", expected " + expected + ")";
        throw ParseError(what, position, expected);
    }

    bool at_end() const { return pos_ >= src_.size(); }

    void skip_ws() {
        while (!at_end() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                             src_[pos_] == '\r')) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_ws();
        if (!at_end() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& parser) : p(parser) {
            if (++p.depth_ > kMaxNesting) {
                p.fail("expression nested too deeply", p.pos_, "shallower expression");
            }
        }
        ~DepthGuard() { --p.depth_; }
    };

    ExprPtr parse_expr() {
        DepthGuard guard(*this);
        auto lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = make_node(ExprKind::add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = make_node(ExprKind::sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_term() {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_node(ExprKind::mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = make_node(ExprKind::div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_unary() {
        DepthGuard guard(*this);
        if (accept('-')) {
            return make_node(ExprKind::negate, parse_unary());
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        auto base = parse_primary();
        if (accept('^')) {
            return make_node(ExprKind::pow, base, parse_unary());
        }
        return base;
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (at_end()) {
            fail("expected operand", pos_, "operand");
        }
        const char c = src_[pos_];
        if (c == '(') {
            const std::size_t open = pos_++;
            auto inner = parse_expr();
            if (!accept(')')) {
                skip_ws();
                if (at_end()) {
                    fail("unbalanced parenthesis", pos_, "')' closing position " + std::to_string(open + 1));
                }
                fail("expected ')'", pos_, "')'");
            }
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            return parse_identifier();
        }
        fail(std::string("unexpected '") + c + "'", pos_, "operand");
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        std::size_t i = pos_;
        std::size_t mantissa_digits = 0;
        while (i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]))) {
            ++i;
            ++mantissa_digits;
        }
        if (i < src_.size() && src_[i] == '.') {
            ++i;
            while (i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]))) {
                ++i;
                ++mantissa_digits;
            }
        }
        if (mantissa_digits == 0) {
            fail("malformed number", start, "digit");
        }
        if (i < src_.size() && (src_[i] == 'e' || src_[i] == 'E')) {
            std::size_t j = i + 1;
            if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) {
                ++j;
            }
            const std::size_t exp_start = j;
            while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) {
                ++j;
            }
            if (j == exp_start) {
                fail("malformed exponent in number", j, "exponent digits");
            }
            i = j;
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + i, value);
        if (ec == std::errc::result_out_of_range || !std::isfinite(value)) {
            fail("numeric literal out of range", start, "finite number");
        }
        if (ec != std::errc() || ptr != src_.data() + i) {
            fail("malformed number", start, "number");
        }
        pos_ = i;
        return make_constant(value);
    }

    ExprPtr parse_identifier() {
        const std::size_t start = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "p") {
            return make_node(ExprKind::variable, nullptr);
        }
        ExprKind kind{};
        if (name == "exp") {
            kind = ExprKind::exp;
        } else if (name == "log") {
            kind = ExprKind::log;
        } else if (name == "sqrt") {
            kind = ExprKind::sqrt;
        } else if (name == "abs") {
            kind = ExprKind::abs;
        } else {
            fail("unknown identifier '" + std::string(name) + "'", start, "'p' or one of exp, log, sqrt, abs");
        }
        skip_ws();
        if (at_end() || src_[pos_] != '(') {
            fail("expected '(' after function '" + std::string(name) + "'", pos_, "'('");
        }
        const std::size_t open = pos_++;
        auto arg = parse_expr();
        if (!accept(')')) {
            skip_ws();
            if (at_end()) {
                fail("unbalanced parenthesis", pos_, "')' closing position " + std::to_string(open + 1));
            }
            fail("expected ')'", pos_, "')'");
        }
        return make_node(kind, arg);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

double checked(double v, const char* what, double p) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string(what) + " is not finite at p = " + format_number(p), p);
    }
    return v;
}

double eval_node(const ExprNode& n, double p) {
    switch (n.kind) {
        case ExprKind::constant:
            return n.value;
        case ExprKind::variable:
            return p;
        case ExprKind::negate:
            return -eval_node(*n.lhs, p);
        case ExprKind::add:
            return checked(eval_node(*n.lhs, p) + eval_node(*n.rhs, p), "sum", p);
        case ExprKind::sub:
            return checked(eval_node(*n.lhs, p) - eval_node(*n.rhs, p), "difference", p);
        case ExprKind::mul:
            return checked(eval_node(*n.lhs, p) * eval_node(*n.rhs, p), "product", p);
        case ExprKind::div: {
            const double num = eval_node(*n.lhs, p);
            const double den = eval_node(*n.rhs, p);
            if (den == 0.0) {
                throw DomainError("division by zero at p = " + format_number(p), p);
            }
            return checked(num / den, "quotient", p);
        }
        case ExprKind::pow: {
            const double base = eval_node(*n.lhs, p);
            const double expo = eval_node(*n.rhs, p);
            if (base == 0.0 && expo < 0.0) {
                throw DomainError("0 raised to a negative power at p = " + format_number(p), p);
            }
            if (base < 0.0 && std::trunc(expo) != expo) {
                throw DomainError("negative base with non-integer exponent at p = " + format_number(p), p);
            }
            return checked(std::pow(base, expo), "power", p);
        }
        case ExprKind::exp:
            return checked(std::exp(eval_node(*n.lhs, p)), "exp", p);
        case ExprKind::log: {
            const double a = eval_node(*n.lhs, p);
            if (a <= 0.0) {
                throw DomainError("log of non-positive argument at p = " + format_number(p), p);
            }
            return std::log(a);
        }
        case ExprKind::sqrt: {
            const double a = eval_node(*n.lhs, p);
            if (a < 0.0) {
                throw DomainError("sqrt of negative argument at p = " + format_number(p), p);
            }
            return std::sqrt(a);
        }
        case ExprKind::abs:
            return std::fabs(eval_node(*n.lhs, p));
    }
    throw NumericalError("corrupt expression node");
}

void print_node(const ExprNode& n, std::string& out) {
    auto binary = [&](char op) {
        out += '(';
        print_node(*n.lhs, out);
        out += op;
        print_node(*n.rhs, out);
        out += ')';
    };
    auto function = [&](const char* name) {
        out += name;
        out += '(';
        print_node(*n.lhs, out);
        out += ')';
    };
    switch (n.kind) {
        case ExprKind::constant: {
            char buf[64];
            const auto res = std::to_chars(buf, buf + sizeof buf, n.value);
            out.append(buf, res.ptr);
            return;
        }
        case ExprKind::variable:
            out += 'p';
            return;
        case ExprKind::negate:
            out += "(-";
            print_node(*n.lhs, out);
            out += ')';
            return;
        case ExprKind::add: binary('+'); return;
        case ExprKind::sub: binary('-'); return;
        case ExprKind::mul: binary('*'); return;
        case ExprKind::div: binary('/'); return;
        case ExprKind::pow: binary('^'); return;
        case ExprKind::exp: function("exp"); return;
        case ExprKind::log: function("log"); return;
        case ExprKind::sqrt: function("sqrt"); return;
        case ExprKind::abs: function("abs"); return;
    }
}

bool same_tree(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind) {
        return false;
    }
    switch (a.kind) {
        case ExprKind::constant:
            return a.value == b.value;
        case ExprKind::variable:
            return true;
        default:
            break;
    }
    if (!same_tree(*a.lhs, *b.lhs)) {
        return false;
    }
    if (a.kind == ExprKind::negate || is_function(a.kind)) {
        return true;
    }
    return same_tree(*a.rhs, *b.rhs);
}

std::size_t count_nodes(const ExprNode& n) {
    std::size_t c = 1;
    if (n.lhs) c += count_nodes(*n.lhs);
    if (n.rhs) c += count_nodes(*n.rhs);
    return c;
}

}  // namespace

ExprAst::ExprAst(ExprPtr root) : root_(std::move(root)) {
    if (!root_) {
        throw PreconditionError("expression tree must have a root");
    }
}

double ExprAst::eval(double p) const { return eval_node(*root_, p); }

std::string ExprAst::to_string() const {
    std::string out;
    print_node(*root_, out);
    return out;
}

std::size_t ExprAst::node_count() const { return count_nodes(*root_); }

bool operator==(const ExprAst& a, const ExprAst& b) { return same_tree(*a.root_, *b.root_); }

ExprAst parse(std::string_view source) { return ExprAst(Parser(source).parse_all()); }

DeformationSpec validate_deformation(const ExprAst& ast, SampleRange range, int samples, double floor,
                                     std::string source) {
    if (samples < kMinValidationSamples) {
        throw PreconditionError("validate_deformation needs at least " +
                                std::to_string(kMinValidationSamples) + " samples");
    }
    if (!std::isfinite(range.p_min) || !std::isfinite(range.p_max) || !(range.p_min < range.p_max)) {
        throw PreconditionError("sample range must be finite with p_min < p_max");
    }
    if (!(floor > 0.0)) {
        throw PreconditionError("positivity floor must be > 0");
    }

    const double step = (range.p_max - range.p_min) / (samples - 1);
    auto node = [&](int i) { return i == samples - 1 ? range.p_max : range.p_min + i * step; };

    std::vector<double> values(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        values[static_cast<std::size_t>(i)] = ast.eval(node(i));
    }

    auto reject = [&](double p, double v) -> PositivityError {
        return PositivityError("f(p) = " + format_number(v) + " is not bounded below by " + format_number(floor) +
                                   " at p = " + format_number(p),
                               p);
    };

    // Report the right edge of the rightmost failing region.
    for (int i = samples - 1; i >= 0; --i) {
        const double v = values[static_cast<std::size_t>(i)];
        if (v > floor) {
            continue;
        }
        if (i == samples - 1) {
            throw reject(node(i), v);
        }
        double bad = node(i);
        double good = node(i + 1);
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (bad + good);
            if (mid == bad || mid == good) {
                break;
            }
            (ast.eval(mid) > floor ? good : bad) = mid;
        }
        throw reject(bad, ast.eval(bad));
    }

    const auto min_it = std::min_element(values.begin(), values.end());
    const int m = static_cast<int>(min_it - values.begin());
    double center = node(m);
    double best = *min_it;
    double half = step;
    for (int it = 0; it < 60; ++it) {
        half *= 0.5;
        for (const double cand : {center - half, center + half}) {
            if (cand < range.p_min || cand > range.p_max) {
                continue;
            }
            const double v = ast.eval(cand);
            if (v < best) {
                best = v;
                center = cand;
            }
        }
    }
    if (best <= floor) {
        throw reject(center, best);
    }

    return DeformationSpec{std::move(source), ast, best, range, samples};
}

DeformationSpec make_deformation(std::string_view source, SampleRange range, int samples) {
    auto ast = parse(source);
    return validate_deformation(ast, range, samples, kPositivityFloor, std::string(source));
}

}  // namespace gupeq
