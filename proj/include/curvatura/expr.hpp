// Scalar field expressions: a tiny language of closed-form formulas in one
// or two variables, parsed into immutable shared trees.
//
// Grammar (see docs/expressions.md):
//   variables    u, v        (curve components use the single variable t)
//   constants    pi, e, decimal literals
//   functions    sin cos tan exp log sqrt abs      (radians, one argument)
//   operators    + - * / ^   with precedence ^ > unary minus > * / > + -,
//                binary operators left-associative, parentheses override
//
// Fields are immutable once built and safe to evaluate from many threads.
// Evaluation runs over a flat instruction tape compiled once per field;
// values, gradients and second derivatives come from forward-mode jets, so
// there is no truncation error anywhere.  Any NaN/Inf produced during
// evaluation, and any domain violation (log of a non-positive value,
// division by zero, sqrt of a negative, 0^negative, negative^non-integer),
// raises EvalError pointing at the offending sub-expression.

#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "curvatura/jets.hpp"

namespace curvatura::expr {

struct SourceSpan {
    uint32_t begin = 0, end = 0;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, size_t offset) : std::runtime_error(what), offset_(offset) {}
    size_t offset() const { return offset_; }

private:
    size_t offset_;
};

class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& what, SourceSpan span) : std::runtime_error(what), span_(span) {}
    SourceSpan span() const { return span_; }

private:
    SourceSpan span_;
};

enum class UnaryFn : uint8_t { Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Abs };
enum class BinaryOp : uint8_t { Add, Sub, Mul, Div, Pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind : uint8_t { Constant, Variable, Unary, Binary };
    Kind kind = Kind::Constant;
    double value = 0;  // Constant
    int var = 0;       // Variable slot (0 = u or t, 1 = v)
    UnaryFn ufn = UnaryFn::Neg;
    BinaryOp bop = BinaryOp::Add;
    NodePtr a, b;
    SourceSpan span;
};

// Smart constructors used when deriving new trees from old ones.  They fold
// constants and drop trivial identities (x+0, 1*x, x^1, ...) so derivative
// trees stay small; parsed user input is kept verbatim.
NodePtr make_constant(double c);
NodePtr make_variable(int var);
NodePtr make_unary(UnaryFn fn, NodePtr a);
NodePtr make_binary(BinaryOp op, NodePtr a, NodePtr b);

bool structurally_equal(const NodePtr& a, const NodePtr& b);

class Field {
public:
    Field() = default;

    // vars lists the variable names in slot order, e.g. {"u","v"} or {"t"}.
    static Field parse(std::string_view source, std::vector<std::string> vars);
    static Field from_node(NodePtr root, std::vector<std::string> vars);

    bool empty() const { return impl_ == nullptr; }

    double value(double u, double v = 0) const;
    Jet1 jet1(double u, double v = 0) const;
    Jet2 jet2(double u, double v = 0) const;
    TJet tjet(double t) const;  // single-variable fields only

    // Exact symbolic derivative with respect to variable slot `var`.
    Field derivative(int var) const;

    // Canonical pretty-print with minimal parentheses.
    std::string str() const;

    const NodePtr& node() const;
    const std::vector<std::string>& variables() const;
    const std::string& source() const;

private:
    struct Impl;  // shared between copies: tree + lazily compiled tape
    const Impl& checked() const;

    std::shared_ptr<Impl> impl_;
};

// Field algebra, for composing derived fields (metric coefficients,
// connection forms, ...).  Operands must share the same variable list.
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(const Field& a, const Field& b);
Field operator/(const Field& a, const Field& b);
Field operator-(const Field& a);
Field operator+(const Field& a, double c);
Field operator+(double c, const Field& a);
Field operator-(const Field& a, double c);
Field operator-(double c, const Field& a);
Field operator*(const Field& a, double c);
Field operator*(double c, const Field& a);
Field operator/(const Field& a, double c);
Field operator/(double c, const Field& a);
Field sqrt(const Field& a);
Field pow(const Field& a, int n);
Field constant_field(double c, std::vector<std::string> vars);

}  // namespace curvatura::expr
