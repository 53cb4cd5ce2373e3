// Expression parsing, printing, symbolic differentiation and tape evaluation.

#include "curvatura/expr.hpp"

#include <cassert>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <unordered_map>

namespace curvatura::expr {

namespace {

bool all_finite(double x) { return std::isfinite(x); }
bool all_finite(const Jet1& j) { return std::isfinite(j.f) && std::isfinite(j.fu) && std::isfinite(j.fv); }
bool all_finite(const Jet2& j) {
    return std::isfinite(j.f) && std::isfinite(j.fu) && std::isfinite(j.fv) && std::isfinite(j.fuu) &&
           std::isfinite(j.fuv) && std::isfinite(j.fvv);
}
bool all_finite(const TJet& j) { return std::isfinite(j.f) && std::isfinite(j.d) && std::isfinite(j.d2); }

double value_of(double x) { return x; }
double value_of(const Jet1& j) { return j.f; }
double value_of(const Jet2& j) { return j.f; }
double value_of(const TJet& j) { return j.f; }

// g(a) fast paths shared by all jet orders via their chain() helpers.
template <class T>
T apply_pow_int(const T& a, long n) {
    if (n == 0) return T(1.0);
    if (n == 1) return a;
    const double x = value_of(a);
    return chain(a, powi(x, n), double(n) * powi(x, n - 1), double(n) * double(n - 1) * powi(x, n - 2));
}
double apply_pow_int(double a, long n) { return powi(a, n); }

bool is_integer_constant(const NodePtr& n, long* out) {
    if (!n || n->kind != Node::Kind::Constant) return false;
    const double v = n->value;
    if (v != std::floor(v) || std::fabs(v) > 1e9) return false;
    *out = static_cast<long>(v);
    return true;
}

}  // namespace

// --------------------------------------------------------------------------
// Smart constructors
// --------------------------------------------------------------------------

namespace {

NodePtr raw_constant(double c, SourceSpan span = {}) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Constant;
    n->value = c;
    n->span = span;
    return n;
}

NodePtr raw_variable(int var, SourceSpan span = {}) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Variable;
    n->var = var;
    n->span = span;
    return n;
}

NodePtr raw_unary(UnaryFn fn, NodePtr a, SourceSpan span = {}) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Unary;
    n->ufn = fn;
    n->a = std::move(a);
    n->span = span;
    return n;
}

NodePtr raw_binary(BinaryOp op, NodePtr a, NodePtr b, SourceSpan span = {}) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->bop = op;
    n->a = std::move(a);
    n->b = std::move(b);
    n->span = span;
    return n;
}

bool is_const(const NodePtr& n, double c) { return n->kind == Node::Kind::Constant && n->value == c; }
bool is_const(const NodePtr& n) { return n->kind == Node::Kind::Constant; }

}  // namespace

NodePtr make_constant(double c) { return raw_constant(c); }
NodePtr make_variable(int var) { return raw_variable(var); }

NodePtr make_unary(UnaryFn fn, NodePtr a) {
    if (fn == UnaryFn::Neg) {
        if (is_const(a)) return raw_constant(-a->value, a->span);
        if (a->kind == Node::Kind::Unary && a->ufn == UnaryFn::Neg) return a->a;
    }
    return raw_unary(fn, std::move(a));
}

NodePtr make_binary(BinaryOp op, NodePtr a, NodePtr b) {
    // Constant folding, but only when the folded value is finite (a constant
    // division by zero must stay in the tree and fail at evaluation time).
    if (is_const(a) && is_const(b)) {
        double r = 0;
        bool ok = true;
        switch (op) {
            case BinaryOp::Add: r = a->value + b->value; break;
            case BinaryOp::Sub: r = a->value - b->value; break;
            case BinaryOp::Mul: r = a->value * b->value; break;
            case BinaryOp::Div: r = b->value != 0 ? a->value / b->value : (ok = false, 0.0); break;
            case BinaryOp::Pow: {
                long n = 0;
                if (is_integer_constant(b, &n))
                    r = powi(a->value, n);
                else if (a->value > 0)
                    r = std::pow(a->value, b->value);
                else
                    ok = false;
                break;
            }
        }
        if (ok && std::isfinite(r)) return raw_constant(r);
    }
    switch (op) {
        case BinaryOp::Add:
            if (is_const(a, 0)) return b;
            if (is_const(b, 0)) return a;
            break;
        case BinaryOp::Sub:
            if (is_const(b, 0)) return a;
            if (is_const(a, 0)) return make_unary(UnaryFn::Neg, std::move(b));
            break;
        case BinaryOp::Mul:
            if (is_const(a, 0) || is_const(b, 0)) return raw_constant(0);
            if (is_const(a, 1)) return b;
            if (is_const(b, 1)) return a;
            if (is_const(a, -1)) return make_unary(UnaryFn::Neg, std::move(b));
            if (is_const(b, -1)) return make_unary(UnaryFn::Neg, std::move(a));
            break;
        case BinaryOp::Div:
            if (is_const(a, 0) && !is_const(b, 0)) return raw_constant(0);
            if (is_const(b, 1)) return a;
            break;
        case BinaryOp::Pow:
            if (is_const(b, 1)) return a;
            if (is_const(b, 0)) return raw_constant(1);
            break;
    }
    return raw_binary(op, std::move(a), std::move(b));
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case Node::Kind::Constant: return a->value == b->value;
        case Node::Kind::Variable: return a->var == b->var;
        case Node::Kind::Unary: return a->ufn == b->ufn && structurally_equal(a->a, b->a);
        case Node::Kind::Binary:
            return a->bop == b->bop && structurally_equal(a->a, b->a) && structurally_equal(a->b, b->b);
    }
    return false;
}

// --------------------------------------------------------------------------
// Lexer and parser
// --------------------------------------------------------------------------

namespace {

struct Token {
    enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };
    Kind kind;
    double number = 0;
    std::string_view text;
    size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        tok_.offset = pos_;
        if (pos_ >= src_.size()) {
            tok_.kind = Token::Kind::End;
            return;
        }
        const char c = src_[pos_];
        auto single = [&](Token::Kind k) {
            tok_.kind = k;
            tok_.text = src_.substr(pos_, 1);
            ++pos_;
        };
        switch (c) {
            case '+': single(Token::Kind::Plus); return;
            case '-': single(Token::Kind::Minus); return;
            case '*': single(Token::Kind::Star); return;
            case '/': single(Token::Kind::Slash); return;
            case '^': single(Token::Kind::Caret); return;
            case '(': single(Token::Kind::LParen); return;
            case ')': single(Token::Kind::RParen); return;
            case ',': single(Token::Kind::Comma); return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t end = pos_;
            while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
            if (end < src_.size() && src_[end] == '.') {
                ++end;
                while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
            }
            if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
                size_t exp = end + 1;
                if (exp < src_.size() && (src_[exp] == '+' || src_[exp] == '-')) ++exp;
                if (exp < src_.size() && std::isdigit(static_cast<unsigned char>(src_[exp]))) {
                    ++exp;
                    while (exp < src_.size() && std::isdigit(static_cast<unsigned char>(src_[exp]))) ++exp;
                    end = exp;
                }
            }
            tok_.kind = Token::Kind::Number;
            tok_.text = src_.substr(pos_, end - pos_);
            tok_.number = std::strtod(std::string(tok_.text).c_str(), nullptr);
            pos_ = end;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t end = pos_;
            while (end < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
                ++end;
            tok_.kind = Token::Kind::Ident;
            tok_.text = src_.substr(pos_, end - pos_);
            pos_ = end;
            return;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    std::string_view src_;
    size_t pos_ = 0;
    Token tok_;
};

struct FnEntry {
    std::string_view name;
    UnaryFn fn;
};
constexpr FnEntry kFunctions[] = {
    {"sin", UnaryFn::Sin}, {"cos", UnaryFn::Cos},   {"tan", UnaryFn::Tan}, {"exp", UnaryFn::Exp},
    {"log", UnaryFn::Log}, {"sqrt", UnaryFn::Sqrt}, {"abs", UnaryFn::Abs},
};

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : lex_(src), vars_(vars) {}

    NodePtr parse() {
        NodePtr n = parse_sum();
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::End)
            throw ParseError("unexpected trailing input", t.offset);
        return n;
    }

private:
    static SourceSpan join(SourceSpan a, SourceSpan b) { return {a.begin, b.end}; }

    NodePtr parse_sum() {
        NodePtr n = parse_product();
        for (;;) {
            // Copy the operator kind now: peek() references the lexer's live
            // token, which take() replaces with the following one.
            const Token::Kind k = lex_.peek().kind;
            if (k == Token::Kind::Plus || k == Token::Kind::Minus) {
                lex_.take();
                NodePtr rhs = parse_product();
                const BinaryOp op = k == Token::Kind::Plus ? BinaryOp::Add : BinaryOp::Sub;
                n = raw_binary(op, n, rhs, join(n->span, rhs->span));
            } else {
                return n;
            }
        }
    }

    NodePtr parse_product() {
        NodePtr n = parse_signed();
        for (;;) {
            const Token::Kind k = lex_.peek().kind;
            if (k == Token::Kind::Star || k == Token::Kind::Slash) {
                lex_.take();
                NodePtr rhs = parse_signed();
                const BinaryOp op = k == Token::Kind::Star ? BinaryOp::Mul : BinaryOp::Div;
                n = raw_binary(op, n, rhs, join(n->span, rhs->span));
            } else {
                return n;
            }
        }
    }

    // Unary minus binds weaker than '^': -u^2 is -(u^2).
    NodePtr parse_signed() {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::Minus) {
            Token minus = lex_.take();
            NodePtr operand = parse_signed();
            return raw_unary(UnaryFn::Neg, operand,
                             {static_cast<uint32_t>(minus.offset), operand->span.end});
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr n = parse_primary();
        for (;;) {
            if (lex_.peek().kind != Token::Kind::Caret) return n;
            lex_.take();
            NodePtr rhs = parse_exponent();
            n = raw_binary(BinaryOp::Pow, n, rhs, join(n->span, rhs->span));
        }
    }

    // The right-hand side of '^' admits a sign of its own: 2^-3 is 2^(-3).
    NodePtr parse_exponent() {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::Minus) {
            Token minus = lex_.take();
            NodePtr operand = parse_exponent();
            return raw_unary(UnaryFn::Neg, operand,
                             {static_cast<uint32_t>(minus.offset), operand->span.end});
        }
        return parse_primary();
    }

    NodePtr parse_primary() {
        Token t = lex_.take();
        const auto begin = static_cast<uint32_t>(t.offset);
        switch (t.kind) {
            case Token::Kind::Number:
                return raw_constant(t.number, {begin, static_cast<uint32_t>(t.offset + t.text.size())});
            case Token::Kind::LParen: {
                NodePtr inner = parse_sum();
                expect(Token::Kind::RParen, "expected ')'");
                return inner;
            }
            case Token::Kind::Ident: {
                const auto end = static_cast<uint32_t>(t.offset + t.text.size());
                for (const FnEntry& f : kFunctions) {
                    if (t.text == f.name) {
                        expect(Token::Kind::LParen, "expected '(' after function name");
                        NodePtr arg = parse_sum();
                        if (lex_.peek().kind == Token::Kind::Comma)
                            throw ParseError("function '" + std::string(t.text) + "' takes one argument",
                                             lex_.peek().offset);
                        Token close = expect(Token::Kind::RParen, "expected ')'");
                        return raw_unary(f.fn, arg,
                                         {begin, static_cast<uint32_t>(close.offset + 1)});
                    }
                }
                if (t.text == "pi") return raw_constant(M_PI, {begin, end});
                if (t.text == "e") return raw_constant(M_E, {begin, end});
                for (size_t i = 0; i < vars_.size(); ++i)
                    if (t.text == vars_[i]) return raw_variable(static_cast<int>(i), {begin, end});
                throw ParseError("unknown identifier '" + std::string(t.text) + "'", t.offset);
            }
            case Token::Kind::End: throw ParseError("unexpected end of input", t.offset);
            default: throw ParseError("unexpected token", t.offset);
        }
    }

    Token expect(Token::Kind k, const char* message) {
        const Token& t = lex_.peek();
        if (t.kind != k) throw ParseError(message, t.offset);
        return lex_.take();
    }

    Lexer lex_;
    const std::vector<std::string>& vars_;
};

}  // namespace

// --------------------------------------------------------------------------
// Pretty printer
// --------------------------------------------------------------------------

namespace {

int precedence_of(const Node& n) {
    switch (n.kind) {
        case Node::Kind::Binary:
            switch (n.bop) {
                case BinaryOp::Add:
                case BinaryOp::Sub: return 1;
                case BinaryOp::Mul:
                case BinaryOp::Div: return 2;
                case BinaryOp::Pow: return 4;
            }
            return 1;
        case Node::Kind::Unary: return n.ufn == UnaryFn::Neg ? 3 : 5;
        case Node::Kind::Constant: return n.value < 0 ? 3 : 5;
        default: return 5;
    }
}

const char* function_name(UnaryFn fn) {
    switch (fn) {
        case UnaryFn::Sin: return "sin";
        case UnaryFn::Cos: return "cos";
        case UnaryFn::Tan: return "tan";
        case UnaryFn::Exp: return "exp";
        case UnaryFn::Log: return "log";
        case UnaryFn::Sqrt: return "sqrt";
        case UnaryFn::Abs: return "abs";
        case UnaryFn::Neg: return "-";
    }
    return "?";
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print_node(const Node& n, const std::vector<std::string>& vars, std::string& out);

void print_child(const NodePtr& child, const std::vector<std::string>& vars, int parent_prec,
                 bool is_right, std::string& out) {
    // Binary operators are left-associative, so a right child at the same
    // precedence level must keep its parentheses to survive a round trip.
    const int prec = precedence_of(*child);
    const bool parens = prec < parent_prec || (is_right && prec == parent_prec);
    if (parens) out += '(';
    print_node(*child, vars, out);
    if (parens) out += ')';
}

void print_node(const Node& n, const std::vector<std::string>& vars, std::string& out) {
    switch (n.kind) {
        case Node::Kind::Constant:
            out += format_number(n.value);
            return;
        case Node::Kind::Variable:
            out += static_cast<size_t>(n.var) < vars.size() ? vars[n.var] : "?";
            return;
        case Node::Kind::Unary:
            if (n.ufn == UnaryFn::Neg) {
                out += '-';
                print_child(n.a, vars, 3, /*is_right=*/false, out);
            } else {
                out += function_name(n.ufn);
                out += '(';
                print_node(*n.a, vars, out);
                out += ')';
            }
            return;
        case Node::Kind::Binary: {
            const int prec = precedence_of(n);
            const char* op = n.bop == BinaryOp::Add   ? " + "
                             : n.bop == BinaryOp::Sub ? " - "
                             : n.bop == BinaryOp::Mul ? "*"
                             : n.bop == BinaryOp::Div ? "/"
                                                      : "^";
            print_child(n.a, vars, prec, /*is_right=*/false, out);
            out += op;
            print_child(n.b, vars, prec, /*is_right=*/true, out);
            return;
        }
    }
}

}  // namespace

// --------------------------------------------------------------------------
// Symbolic differentiation
// --------------------------------------------------------------------------

namespace {

class Differentiator {
public:
    explicit Differentiator(int var) : var_(var) {}

    NodePtr d(const NodePtr& n) {
        auto it = memo_.find(n.get());
        if (it != memo_.end()) return it->second;
        NodePtr r = derive(n);
        // Derived nodes point back at the source text they came from, so
        // domain errors in derivative fields still name the original spot.
        if (r->span.end == 0 && n->span.end != 0) {
            auto copy = std::make_shared<Node>(*r);
            copy->span = n->span;
            r = copy;
        }
        memo_.emplace(n.get(), r);
        return r;
    }

private:
    NodePtr derive(const NodePtr& n) {
        switch (n->kind) {
            case Node::Kind::Constant: return make_constant(0);
            case Node::Kind::Variable: return make_constant(n->var == var_ ? 1 : 0);
            case Node::Kind::Unary: {
                NodePtr da = d(n->a);
                const NodePtr& a = n->a;
                switch (n->ufn) {
                    case UnaryFn::Neg: return make_unary(UnaryFn::Neg, da);
                    case UnaryFn::Sin: return make_binary(BinaryOp::Mul, make_unary(UnaryFn::Cos, a), da);
                    case UnaryFn::Cos:
                        return make_unary(UnaryFn::Neg,
                                          make_binary(BinaryOp::Mul, make_unary(UnaryFn::Sin, a), da));
                    case UnaryFn::Tan: {
                        // d tan = (1 + tan^2) da
                        NodePtr t = make_unary(UnaryFn::Tan, a);
                        NodePtr sec2 = make_binary(BinaryOp::Add, make_constant(1),
                                                   make_binary(BinaryOp::Mul, t, t));
                        return make_binary(BinaryOp::Mul, sec2, da);
                    }
                    case UnaryFn::Exp: return make_binary(BinaryOp::Mul, make_unary(UnaryFn::Exp, a), da);
                    case UnaryFn::Log: return make_binary(BinaryOp::Div, da, a);
                    case UnaryFn::Sqrt:
                        return make_binary(
                            BinaryOp::Div, da,
                            make_binary(BinaryOp::Mul, make_constant(2), make_unary(UnaryFn::Sqrt, a)));
                    case UnaryFn::Abs:
                        // d|a| = (|a|/a) da; evaluating at a = 0 raises the
                        // division-by-zero error, which is honest: |a| has no
                        // derivative there.
                        return make_binary(BinaryOp::Mul,
                                           make_binary(BinaryOp::Div, make_unary(UnaryFn::Abs, a), a), da);
                }
                break;
            }
            case Node::Kind::Binary: {
                const NodePtr& a = n->a;
                const NodePtr& b = n->b;
                switch (n->bop) {
                    case BinaryOp::Add: return make_binary(BinaryOp::Add, d(a), d(b));
                    case BinaryOp::Sub: return make_binary(BinaryOp::Sub, d(a), d(b));
                    case BinaryOp::Mul:
                        return make_binary(BinaryOp::Add, make_binary(BinaryOp::Mul, d(a), b),
                                           make_binary(BinaryOp::Mul, a, d(b)));
                    case BinaryOp::Div:
                        // (a/b)' = a'/b - a b'/b^2
                        return make_binary(
                            BinaryOp::Sub, make_binary(BinaryOp::Div, d(a), b),
                            make_binary(BinaryOp::Div, make_binary(BinaryOp::Mul, a, d(b)),
                                        make_binary(BinaryOp::Mul, b, b)));
                    case BinaryOp::Pow: {
                        long k = 0;
                        if (is_integer_constant(b, &k)) {
                            // (a^k)' = k a^(k-1) a'
                            NodePtr p = make_binary(BinaryOp::Pow, a, make_constant(double(k - 1)));
                            return make_binary(BinaryOp::Mul, make_constant(double(k)),
                                               make_binary(BinaryOp::Mul, p, d(a)));
                        }
                        // (a^b)' = a^b (b' log a + b a'/a)
                        NodePtr self = make_binary(BinaryOp::Pow, a, b);
                        NodePtr term1 = make_binary(BinaryOp::Mul, d(b), make_unary(UnaryFn::Log, a));
                        NodePtr term2 = make_binary(BinaryOp::Div, make_binary(BinaryOp::Mul, b, d(a)), a);
                        return make_binary(BinaryOp::Mul, self, make_binary(BinaryOp::Add, term1, term2));
                    }
                }
                break;
            }
        }
        return make_constant(0);
    }

    int var_;
    std::unordered_map<const Node*, NodePtr> memo_;
};

}  // namespace

// --------------------------------------------------------------------------
// Tape compilation and evaluation
// --------------------------------------------------------------------------

namespace {

enum class Op : uint8_t {
    Const, Var0, Var1, Neg, Add, Sub, Mul, Div, Pow, PowInt, Sin, Cos, Tan, Exp, Log, Sqrt, Abs
};

struct Instr {
    Op op;
    int32_t a = -1, b = -1;
    double c = 0;  // Const value
    long iexp = 0; // PowInt exponent
    SourceSpan span;
};

}  // namespace

struct Field::Impl {
    NodePtr root;
    std::vector<std::string> vars;
    std::string source;

    std::once_flag compile_flag;
    std::vector<Instr> tape;

    void ensure_compiled() {
        std::call_once(compile_flag, [this] { compile(); });
    }

    [[noreturn]] void fail(const char* message, SourceSpan span) const {
        std::string what = message;
        if (!source.empty() && span.end > span.begin && span.end <= source.size()) {
            what += " in '";
            what += source.substr(span.begin, span.end - span.begin);
            what += "' at offset ";
            what += std::to_string(span.begin);
        }
        throw EvalError(what, span);
    }

    template <class T>
    T run(double x0, double x1, T seed0, T seed1) const {
        (void)x0;
        (void)x1;
        thread_local std::vector<T> slots;
        std::vector<T>& w = slots;
        w.resize(tape.size());
        for (size_t i = 0; i < tape.size(); ++i) {
            const Instr& ins = tape[i];
            T r;
            switch (ins.op) {
                case Op::Const: r = T(ins.c); break;
                case Op::Var0: r = seed0; break;
                case Op::Var1: r = seed1; break;
                case Op::Neg: r = -w[ins.a]; break;
                case Op::Add: r = w[ins.a] + w[ins.b]; break;
                case Op::Sub: r = w[ins.a] - w[ins.b]; break;
                case Op::Mul: r = w[ins.a] * w[ins.b]; break;
                case Op::Div:
                    if (value_of(w[ins.b]) == 0) fail("division by zero", ins.span);
                    r = w[ins.a] / w[ins.b];
                    break;
                case Op::PowInt:
                    if (value_of(w[ins.a]) == 0 && ins.iexp < 0)
                        fail("zero raised to a negative power", ins.span);
                    r = apply_pow_int(w[ins.a], ins.iexp);
                    break;
                case Op::Pow: {
                    if (value_of(w[ins.a]) <= 0)
                        fail("non-integer power of a non-positive base", ins.span);
                    using std::exp;
                    using std::log;
                    r = exp(w[ins.b] * log(w[ins.a]));
                    break;
                }
                case Op::Sin: { using std::sin; r = sin(w[ins.a]); break; }
                case Op::Cos: { using std::cos; r = cos(w[ins.a]); break; }
                case Op::Tan: { using std::tan; r = tan(w[ins.a]); break; }
                case Op::Exp: { using std::exp; r = exp(w[ins.a]); break; }
                case Op::Log:
                    if (value_of(w[ins.a]) <= 0) fail("log of a non-positive value", ins.span);
                    { using std::log; r = log(w[ins.a]); }
                    break;
                case Op::Sqrt:
                    if (value_of(w[ins.a]) < 0) fail("sqrt of a negative value", ins.span);
                    { using std::sqrt; r = sqrt(w[ins.a]); }
                    break;
                case Op::Abs: { using std::abs; r = abs(w[ins.a]); break; }
            }
            if (!all_finite(r)) fail("evaluation produced a non-finite value", ins.span);
            w[i] = r;
        }
        return w.back();
    }

private:
    void compile() {
        std::unordered_map<const Node*, int32_t> memo;
        emit(root, memo);
    }

    int32_t emit(const NodePtr& n, std::unordered_map<const Node*, int32_t>& memo) {
        auto it = memo.find(n.get());
        if (it != memo.end()) return it->second;
        Instr ins;
        ins.span = n->span;
        switch (n->kind) {
            case Node::Kind::Constant:
                ins.op = Op::Const;
                ins.c = n->value;
                break;
            case Node::Kind::Variable:
                ins.op = n->var == 0 ? Op::Var0 : Op::Var1;
                break;
            case Node::Kind::Unary:
                ins.a = emit(n->a, memo);
                switch (n->ufn) {
                    case UnaryFn::Neg: ins.op = Op::Neg; break;
                    case UnaryFn::Sin: ins.op = Op::Sin; break;
                    case UnaryFn::Cos: ins.op = Op::Cos; break;
                    case UnaryFn::Tan: ins.op = Op::Tan; break;
                    case UnaryFn::Exp: ins.op = Op::Exp; break;
                    case UnaryFn::Log: ins.op = Op::Log; break;
                    case UnaryFn::Sqrt: ins.op = Op::Sqrt; break;
                    case UnaryFn::Abs: ins.op = Op::Abs; break;
                }
                break;
            case Node::Kind::Binary: {
                long k = 0;
                if (n->bop == BinaryOp::Pow && is_integer_constant(n->b, &k)) {
                    ins.a = emit(n->a, memo);
                    ins.op = Op::PowInt;
                    ins.iexp = k;
                    break;
                }
                ins.a = emit(n->a, memo);
                ins.b = emit(n->b, memo);
                switch (n->bop) {
                    case BinaryOp::Add: ins.op = Op::Add; break;
                    case BinaryOp::Sub: ins.op = Op::Sub; break;
                    case BinaryOp::Mul: ins.op = Op::Mul; break;
                    case BinaryOp::Div: ins.op = Op::Div; break;
                    case BinaryOp::Pow: ins.op = Op::Pow; break;
                }
                break;
            }
        }
        tape.push_back(ins);
        const auto slot = static_cast<int32_t>(tape.size() - 1);
        memo.emplace(n.get(), slot);
        return slot;
    }
};

// --------------------------------------------------------------------------
// Field
// --------------------------------------------------------------------------

Field Field::parse(std::string_view source, std::vector<std::string> vars) {
    Parser parser(source, vars);
    auto impl = std::make_shared<Impl>();
    impl->root = parser.parse();
    impl->vars = std::move(vars);
    impl->source = std::string(source);
    Field f;
    f.impl_ = std::move(impl);
    return f;
}

Field Field::from_node(NodePtr root, std::vector<std::string> vars) {
    if (!root) throw std::invalid_argument("Field::from_node: null node");
    auto impl = std::make_shared<Impl>();
    impl->root = std::move(root);
    impl->vars = std::move(vars);
    Field f;
    f.impl_ = std::move(impl);
    return f;
}

const Field::Impl& Field::checked() const {
    if (!impl_) throw std::logic_error("evaluating an empty Field");
    return *impl_;
}

double Field::value(double u, double v) const {
    auto& impl = const_cast<Impl&>(checked());
    impl.ensure_compiled();
    return impl.run<double>(u, v, u, v);
}

Jet1 Field::jet1(double u, double v) const {
    auto& impl = const_cast<Impl&>(checked());
    impl.ensure_compiled();
    return impl.run<Jet1>(u, v, Jet1::var_u(u), Jet1::var_v(v));
}

Jet2 Field::jet2(double u, double v) const {
    auto& impl = const_cast<Impl&>(checked());
    impl.ensure_compiled();
    return impl.run<Jet2>(u, v, Jet2::var_u(u), Jet2::var_v(v));
}

TJet Field::tjet(double t) const {
    auto& impl = const_cast<Impl&>(checked());
    if (impl.vars.size() != 1)
        throw std::logic_error("tjet() requires a single-variable field");
    impl.ensure_compiled();
    return impl.run<TJet>(t, 0, TJet::var(t), TJet(0.0));
}

Field Field::derivative(int var) const {
    const Impl& impl = checked();
    if (var < 0 || static_cast<size_t>(var) >= impl.vars.size())
        throw std::logic_error("derivative: variable index out of range");
    Differentiator diff(var);
    Field f = from_node(diff.d(impl.root), impl.vars);
    f.impl_->source = impl.source;  // derived errors cite the original text
    return f;
}

std::string Field::str() const {
    const Impl& impl = checked();
    std::string out;
    print_node(*impl.root, impl.vars, out);
    return out;
}

const NodePtr& Field::node() const { return checked().root; }
const std::vector<std::string>& Field::variables() const { return checked().vars; }
const std::string& Field::source() const { return checked().source; }

// --------------------------------------------------------------------------
// Field algebra
// --------------------------------------------------------------------------

namespace {

const std::vector<std::string>& common_vars(const Field& a, const Field& b) {
    if (a.variables() != b.variables())
        throw std::logic_error("field algebra: mismatched variable lists");
    return a.variables();
}

}  // namespace

Field operator+(const Field& a, const Field& b) {
    return Field::from_node(make_binary(BinaryOp::Add, a.node(), b.node()), common_vars(a, b));
}
Field operator-(const Field& a, const Field& b) {
    return Field::from_node(make_binary(BinaryOp::Sub, a.node(), b.node()), common_vars(a, b));
}
Field operator*(const Field& a, const Field& b) {
    return Field::from_node(make_binary(BinaryOp::Mul, a.node(), b.node()), common_vars(a, b));
}
Field operator/(const Field& a, const Field& b) {
    return Field::from_node(make_binary(BinaryOp::Div, a.node(), b.node()), common_vars(a, b));
}
Field operator-(const Field& a) {
    return Field::from_node(make_unary(UnaryFn::Neg, a.node()), a.variables());
}
Field operator+(const Field& a, double c) {
    return Field::from_node(make_binary(BinaryOp::Add, a.node(), make_constant(c)), a.variables());
}
Field operator+(double c, const Field& a) { return a + c; }
Field operator-(const Field& a, double c) {
    return Field::from_node(make_binary(BinaryOp::Sub, a.node(), make_constant(c)), a.variables());
}
Field operator-(double c, const Field& a) {
    return Field::from_node(make_binary(BinaryOp::Sub, make_constant(c), a.node()), a.variables());
}
Field operator*(const Field& a, double c) {
    return Field::from_node(make_binary(BinaryOp::Mul, a.node(), make_constant(c)), a.variables());
}
Field operator*(double c, const Field& a) { return a * c; }
Field operator/(const Field& a, double c) {
    return Field::from_node(make_binary(BinaryOp::Div, a.node(), make_constant(c)), a.variables());
}
Field operator/(double c, const Field& a) {
    return Field::from_node(make_binary(BinaryOp::Div, make_constant(c), a.node()), a.variables());
}
Field sqrt(const Field& a) {
    return Field::from_node(make_unary(UnaryFn::Sqrt, a.node()), a.variables());
}
Field pow(const Field& a, int n) {
    return Field::from_node(make_binary(BinaryOp::Pow, a.node(), make_constant(n)), a.variables());
}
Field constant_field(double c, std::vector<std::string> vars) {
    return Field::from_node(make_constant(c), std::move(vars));
}

}  // namespace curvatura::expr
