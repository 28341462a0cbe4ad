/**
 * @file expr.hpp
 * @brief Coordinate charts, the expression grammar, and jet evaluation of
 *        scalar fields given as text.
 *
 * Grammar (whitespace insignificant):
 *
 *     expr   := term (('+'|'-') term)*
 *     term   := unary (('*'|'/') unary)*
 *     unary  := '-' unary | power
 *     power  := atom ('^' unary)?
 *     atom   := number | ident | ident '(' expr ')' | '(' expr ')'
 *
 * Identifiers resolve to chart coordinates, to named constants supplied at
 * parse time (substituted as numbers), or to the builtin constant `pi`.
 */
#pragma once

#include <gaugeforge/jet.hpp>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace gaugeforge {

/// Raised by the parser; `offset()` is the byte offset of the problem.
class ParseError : public std::runtime_error {
public:
    enum class Kind { Syntax, UnknownIdentifier, Arity };

    ParseError(Kind kind, std::size_t offset, const std::string& what)
        : std::runtime_error(what + " at byte " + std::to_string(offset)), kind_(kind), offset_(offset) {}

    Kind kind() const { return kind_; }
    std::size_t offset() const { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

using Point = std::array<double, kDim>;

enum class Func { Sin, Cos, Tan, Cot, Sqrt, Exp, Log };

inline std::optional<Func> func_from_name(std::string_view n) {
    if (n == "sin") return Func::Sin;
    if (n == "cos") return Func::Cos;
    if (n == "tan") return Func::Tan;
    if (n == "cot") return Func::Cot;
    if (n == "sqrt") return Func::Sqrt;
    if (n == "exp") return Func::Exp;
    if (n == "log") return Func::Log;
    return std::nullopt;
}

inline const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Tan: return "tan";
        case Func::Cot: return "cot";
        case Func::Sqrt: return "sqrt";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
    }
    return "?";
}

struct Node;
using ExprPtr = std::shared_ptr<const Node>;

struct Number {
    double value;
};
struct Variable {
    int axis;
};
struct Negate {
    ExprPtr arg;
};
struct Binary {
    char op;  // + - * /
    ExprPtr lhs, rhs;
};
struct Power {
    ExprPtr base, exponent;
    std::optional<int> integer_exponent;  // set when the exponent is a constant integer
};
struct Call {
    Func func;
    ExprPtr arg;
};

struct Node {
    std::variant<Number, Variable, Negate, Binary, Power, Call> v;
};

inline ExprPtr make_node(auto&& alt) { return std::make_shared<const Node>(Node{std::forward<decltype(alt)>(alt)}); }

inline bool is_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

/// Four named coordinates, a sampling box, and singular loci to avoid.
class CoordinateChart {
public:
    using Interval = std::pair<double, double>;

    CoordinateChart(std::array<std::string, kDim> names, std::array<Interval, kDim> domain)
        : names_(std::move(names)), domain_(domain) {
        for (int a = 0; a < kDim; ++a) {
            if (!is_identifier(names_[a])) throw std::invalid_argument("invalid coordinate name '" + names_[a] + "'");
            if (func_from_name(names_[a]) || names_[a] == "pi")
                throw std::invalid_argument("coordinate name '" + names_[a] + "' is reserved");
            for (int b = 0; b < a; ++b)
                if (names_[a] == names_[b]) throw std::invalid_argument("duplicate coordinate name '" + names_[a] + "'");
            if (!(domain_[a].second > domain_[a].first))
                throw std::invalid_argument("sampling interval for '" + names_[a] + "' has non-positive length");
        }
    }

    const std::array<std::string, kDim>& names() const { return names_; }
    const std::array<Interval, kDim>& domain() const { return domain_; }

    int axis_of(std::string_view name) const {
        for (int a = 0; a < kDim; ++a)
            if (names_[a] == name) return a;
        return -1;
    }

    void add_excluded_locus(ExprPtr predicate) { excluded_.push_back(std::move(predicate)); }
    const std::vector<ExprPtr>& excluded_loci() const { return excluded_; }

    double margin() const { return margin_; }
    void set_margin(double m) { margin_ = m; }

    bool in_domain(const Point& p) const {
        for (int a = 0; a < kDim; ++a)
            if (p[a] < domain_[a].first || p[a] > domain_[a].second) return false;
        return true;
    }

    /// True when the point is inside the box and every excluded-locus
    /// predicate exceeds the margin in absolute value.
    bool admissible(const Point& p) const;

private:
    std::array<std::string, kDim> names_;
    std::array<Interval, kDim> domain_;
    std::vector<ExprPtr> excluded_;
    double margin_ = 1e-3;
};

using ConstantMap = std::map<std::string, double, std::less<>>;

namespace detail {

class Parser {
public:
    Parser(std::string_view src, const CoordinateChart& chart, const ConstantMap& constants)
        : s_(src), chart_(chart), constants_(constants) {}

    ExprPtr parse() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError(ParseError::Kind::Syntax, pos_, "empty expression");
        ExprPtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError(ParseError::Kind::Syntax, pos_, std::string("unexpected '") + s_[pos_] + "'");
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr expr() {
        ExprPtr lhs = term();
        for (;;) {
            skip_ws();
            if (accept('+')) lhs = make_node(Binary{'+', lhs, term()});
            else if (accept('-')) lhs = make_node(Binary{'-', lhs, term()});
            else return lhs;
        }
    }

    ExprPtr term() {
        ExprPtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make_node(Binary{'*', lhs, unary()});
            else if (accept('/')) lhs = make_node(Binary{'/', lhs, unary()});
            else return lhs;
        }
    }

    // '^' binds tighter than unary minus, so -r^2 is -(r^2); the exponent
    // may carry its own sign, as in x^-1, and 2^3^2 is 2^(3^2).
    ExprPtr power() {
        ExprPtr base = atom();
        if (!accept('^')) return base;
        ExprPtr ex = unary();
        return make_node(Power{base, ex, constant_integer(*ex)});
    }

    static std::optional<int> constant_integer(const Node& n) {
        double v;
        if (const auto* num = std::get_if<Number>(&n.v)) v = num->value;
        else if (const auto* neg = std::get_if<Negate>(&n.v)) {
            const auto* inner = std::get_if<Number>(&neg->arg->v);
            if (!inner) return std::nullopt;
            v = -inner->value;
        } else
            return std::nullopt;
        if (v == std::floor(v) && std::abs(v) <= 64.0) return static_cast<int>(v);
        return std::nullopt;
    }

    ExprPtr unary() {
        if (accept('-')) return make_node(Negate{unary()});
        return power();
    }

    ExprPtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError(ParseError::Kind::Syntax, pos_, "unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = expr();
            if (!accept(')')) throw ParseError(ParseError::Kind::Syntax, pos_, "expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw ParseError(ParseError::Kind::Syntax, pos_, std::string("unexpected '") + c + "'");
    }

    ExprPtr number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
            if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
                pos_ = p;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        const auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != s_.data() + pos_)
            throw ParseError(ParseError::Kind::Syntax, start, "malformed number");
        return make_node(Number{v});
    }

    ExprPtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        const std::string_view name = s_.substr(start, pos_ - start);
        skip_ws();
        const bool call = pos_ < s_.size() && s_[pos_] == '(';
        const auto fn = func_from_name(name);
        if (call) {
            if (!fn) throw ParseError(ParseError::Kind::Arity, start, "'" + std::string(name) + "' is not a function");
            ++pos_;
            ExprPtr arg = expr();
            int nargs = 1;
            while (accept(',')) {
                expr();
                ++nargs;
            }
            if (!accept(')')) throw ParseError(ParseError::Kind::Syntax, pos_, "expected ')'");
            if (nargs != 1)
                throw ParseError(ParseError::Kind::Arity, start,
                                 "function '" + std::string(name) + "' takes 1 argument, got " + std::to_string(nargs));
            return make_node(Call{*fn, arg});
        }
        if (fn) throw ParseError(ParseError::Kind::Arity, start, "function '" + std::string(name) + "' needs an argument");
        if (const int axis = chart_.axis_of(name); axis >= 0) return make_node(Variable{axis});
        if (auto it = constants_.find(name); it != constants_.end()) return make_node(Number{it->second});
        if (name == "pi") return make_node(Number{3.14159265358979323846});
        throw ParseError(ParseError::Kind::UnknownIdentifier, start, "unknown identifier '" + std::string(name) + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    const CoordinateChart& chart_;
    const ConstantMap& constants_;
};

template <class T>
T apply(Func f, const T& x) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    using std::tan;
    switch (f) {
        case Func::Sin: return sin(x);
        case Func::Cos: return cos(x);
        case Func::Tan:
            if constexpr (is_jet_v<T>) return tan(x);
            else {
                if (!(std::abs(std::cos(x)) > kDivisionFloor)) throw DomainError("tan at a pole");
                return std::tan(x);
            }
        case Func::Cot:
            if constexpr (is_jet_v<T>) return cot(x);
            else {
                if (!(std::abs(std::sin(x)) > kDivisionFloor)) throw DomainError("cot at a pole");
                return std::cos(x) / std::sin(x);
            }
        case Func::Sqrt:
            if (value_of(x) < 0.0) throw DomainError("sqrt of a negative value");
            return sqrt(x);
        case Func::Exp: return exp(x);
        case Func::Log:
            if (!(value_of(x) > 0.0)) throw DomainError("log of a non-positive value");
            return log(x);
    }
    throw std::logic_error("unhandled function");
}

inline double int_pow(double b, int n) {
    if (n < 0) return reciprocal(int_pow(b, -n));
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= b;
    return r;
}

template <class T>
T evaluate(const Node& n, std::span<const T, kDim> vars) {
    return std::visit(
        [&](const auto& alt) -> T {
            using A = std::decay_t<decltype(alt)>;
            if constexpr (std::is_same_v<A, Number>) {
                return T(alt.value);
            } else if constexpr (std::is_same_v<A, Variable>) {
                return vars[alt.axis];
            } else if constexpr (std::is_same_v<A, Negate>) {
                return -evaluate<T>(*alt.arg, vars);
            } else if constexpr (std::is_same_v<A, Binary>) {
                const T l = evaluate<T>(*alt.lhs, vars);
                const T r = evaluate<T>(*alt.rhs, vars);
                switch (alt.op) {
                    case '+': return l + r;
                    case '-': return l - r;
                    case '*': return l * r;
                    default: {
                        if constexpr (is_jet_v<T>) return l / r;
                        else return l * reciprocal(r);
                    }
                }
            } else if constexpr (std::is_same_v<A, Power>) {
                const T b = evaluate<T>(*alt.base, vars);
                if (alt.integer_exponent) {
                    if constexpr (is_jet_v<T>) return pow(b, *alt.integer_exponent);
                    else return int_pow(b, *alt.integer_exponent);
                }
                const T e = evaluate<T>(*alt.exponent, vars);
                if (!(value_of(b) > 0.0)) throw DomainError("non-integer power of a non-positive base");
                using std::exp;
                using std::log;
                return exp(e * log(b));
            } else {
                return apply<T>(alt.func, evaluate<T>(*alt.arg, vars));
            }
        },
        n.v);
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void print(const Node& n, const std::array<std::string, kDim>& names, std::string& out) {
    std::visit(
        [&](const auto& alt) {
            using A = std::decay_t<decltype(alt)>;
            if constexpr (std::is_same_v<A, Number>) {
                if (std::signbit(alt.value)) {
                    out += "(-" + format_number(-alt.value) + ")";
                } else {
                    out += format_number(alt.value);
                }
            } else if constexpr (std::is_same_v<A, Variable>) {
                out += names[alt.axis];
            } else if constexpr (std::is_same_v<A, Negate>) {
                out += "(-";
                print(*alt.arg, names, out);
                out += ")";
            } else if constexpr (std::is_same_v<A, Binary>) {
                out += "(";
                print(*alt.lhs, names, out);
                out += alt.op;
                print(*alt.rhs, names, out);
                out += ")";
            } else if constexpr (std::is_same_v<A, Power>) {
                out += "(";
                print(*alt.base, names, out);
                out += "^";
                print(*alt.exponent, names, out);
                out += ")";
            } else {
                out += func_name(alt.func);
                out += "(";
                print(*alt.arg, names, out);
                out += ")";
            }
        },
        n.v);
}

}  // namespace detail

inline bool CoordinateChart::admissible(const Point& p) const {
    if (!in_domain(p)) return false;
    for (const auto& pred : excluded_) {
        double v;
        try {
            v = detail::evaluate<double>(*pred, std::span<const double, kDim>(p));
        } catch (const DomainError&) {
            return false;
        }
        if (!(std::abs(v) > margin_)) return false;
    }
    return true;
}

/// A scalar field over a chart, immutable after parsing.
class JetScalar {
public:
    JetScalar(ExprPtr ast, std::shared_ptr<const CoordinateChart> chart) : ast_(std::move(ast)), chart_(std::move(chart)) {}

    const Node& ast() const { return *ast_; }
    const ExprPtr& ast_ptr() const { return ast_; }
    const CoordinateChart& chart() const { return *chart_; }
    const std::shared_ptr<const CoordinateChart>& chart_ptr() const { return chart_; }

    double value(const Point& p) const { return detail::evaluate<double>(*ast_, std::span<const double, kDim>(p)); }

    template <int N>
    Jet<N> jet(const Point& p) const {
        std::array<Jet<N>, kDim> vars;
        for (int a = 0; a < kDim; ++a) vars[a] = Jet<N>::variable(a, p[a]);
        return detail::evaluate<Jet<N>>(*ast_, std::span<const Jet<N>, kDim>(vars));
    }

    /// Fully parenthesised source that parses back to an equivalent tree.
    std::string to_string() const {
        std::string out;
        detail::print(*ast_, chart_->names(), out);
        return out;
    }

private:
    ExprPtr ast_;
    std::shared_ptr<const CoordinateChart> chart_;
};

inline JetScalar parse_expr(std::string_view source, std::shared_ptr<const CoordinateChart> chart,
                            const ConstantMap& constants = {}) {
    detail::Parser p(source, *chart, constants);
    return JetScalar(p.parse(), std::move(chart));
}

/// Parse a predicate expression and register it as an excluded locus.
inline void add_excluded_locus(CoordinateChart& chart, std::string_view source, const ConstantMap& constants = {}) {
    detail::Parser p(source, chart, constants);
    chart.add_excluded_locus(p.parse());
}

/// Value and partials through `order` (0..3) at a point.
inline Jet3 eval_jet(const JetScalar& f, const Point& p, int order) {
    switch (order) {
        case 0: return f.jet<0>(p).derivatives();
        case 1: return f.jet<1>(p).derivatives();
        case 2: return f.jet<2>(p).derivatives();
        case 3: return f.jet<3>(p).derivatives();
        default: throw std::invalid_argument("jet order must be in 0..3");
    }
}

}  // namespace gaugeforge
