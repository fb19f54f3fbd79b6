#include "gfem/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace gfem::expr {

namespace {

struct Parser {
    std::string_view src;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    int peek() {
        skip_ws();
        return pos < src.size() ? static_cast<unsigned char>(src[pos]) : -1;
    }
    bool consume(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

    Node expr() {
        Node lhs = term();
        for (;;) {
            const int c = peek();
            if (c != '+' && c != '-') return lhs;
            const std::size_t at = pos;
            ++pos;
            Node n;
            n.kind = (c == '+') ? NodeKind::add : NodeKind::sub;
            n.offset = at;
            n.args.push_back(std::move(lhs));
            n.args.push_back(term());
            lhs = std::move(n);
        }
    }

    Node term() {
        Node lhs = unary();
        for (;;) {
            const int c = peek();
            if (c != '*' && c != '/') return lhs;
            const std::size_t at = pos;
            ++pos;
            Node n;
            n.kind = (c == '*') ? NodeKind::mul : NodeKind::div;
            n.offset = at;
            n.args.push_back(std::move(lhs));
            n.args.push_back(unary());
            lhs = std::move(n);
        }
    }

    Node unary() {
        if (peek() == '-') {
            Node n;
            n.kind = NodeKind::neg;
            n.offset = pos;
            ++pos;
            n.args.push_back(unary());
            return n;
        }
        return power();
    }

    Node power() {
        Node base = primary();
        if (peek() == '^') {
            Node n;
            n.kind = NodeKind::pow;
            n.offset = pos;
            ++pos;
            n.args.push_back(std::move(base));
            n.args.push_back(unary()); // right-assoc; exponent may be signed
            return n;
        }
        return base;
    }

    Node primary() {
        const int c = peek();
        if (c < 0) fail("unexpected end of expression");
        if (c == '(') {
            ++pos;
            Node inner = expr();
            if (!consume(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(c) || c == '.') return number();
        if (std::isalpha(c) || c == '_') return identifier();
        fail(std::string("unexpected character '") + static_cast<char>(c) + "'");
    }

    Node number() {
        const std::size_t start = pos;
        while (pos < src.size() && (std::isdigit(static_cast<unsigned char>(src[pos])) ||
                                    src[pos] == '.'))
            ++pos;
        if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
            std::size_t p = pos + 1;
            if (p < src.size() && (src[p] == '+' || src[p] == '-')) ++p;
            if (p < src.size() && std::isdigit(static_cast<unsigned char>(src[p]))) {
                pos = p;
                while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
                    ++pos;
            }
        }
        const std::string text(src.substr(start, pos - start));
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size()) {
            pos = start;
            fail("malformed number '" + text + "'");
        }
        Node n;
        n.kind = NodeKind::number;
        n.value = v;
        n.offset = start;
        return n;
    }

    Node identifier() {
        const std::size_t start = pos;
        while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                                    src[pos] == '_'))
            ++pos;
        const std::string name(src.substr(start, pos - start));
        Node n;
        n.offset = start;
        if (name == "x") {
            n.kind = NodeKind::var_x;
            return n;
        }
        if (name == "y") {
            n.kind = NodeKind::var_y;
            return n;
        }
        if (name == "pi") {
            n.kind = NodeKind::number;
            n.value = std::numbers::pi;
            return n;
        }
        static const struct {
            const char* name;
            Func f;
            int arity;
        } funcs[] = {{"sin", Func::sin, 1}, {"cos", Func::cos, 1},   {"exp", Func::exp, 1},
                     {"log", Func::log, 1}, {"sqrt", Func::sqrt, 1}, {"abs", Func::abs, 1},
                     {"atan2", Func::atan2, 2}};
        for (const auto& f : funcs) {
            if (name != f.name) continue;
            n.kind = NodeKind::call;
            n.func = f.f;
            if (!consume('(')) fail(std::string("expected '(' after '") + f.name + "'");
            n.args.push_back(expr());
            for (int k = 1; k < f.arity; ++k) {
                if (!consume(',')) fail(std::string(f.name) + " expects " +
                                        std::to_string(f.arity) + " arguments");
                n.args.push_back(expr());
            }
            if (consume(','))
                fail(std::string(f.name) + " expects " + std::to_string(f.arity) + " arguments");
            if (!consume(')')) fail("expected ')'");
            return n;
        }
        pos = start;
        fail("unknown identifier '" + name + "'");
    }
};

const char* func_name(Func f) {
    switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
    case Func::abs: return "abs";
    case Func::atan2: return "atan2";
    }
    return "?";
}

[[noreturn]] void domain_error(const Node& n, const std::string& what) {
    throw EvalError("domain error: " + what + " (node at byte " + std::to_string(n.offset) + ")");
}

double eval_node(const Node& n, double x, double y) {
    switch (n.kind) {
    case NodeKind::number: return n.value;
    case NodeKind::var_x: return x;
    case NodeKind::var_y: return y;
    case NodeKind::add: return eval_node(n.args[0], x, y) + eval_node(n.args[1], x, y);
    case NodeKind::sub: return eval_node(n.args[0], x, y) - eval_node(n.args[1], x, y);
    case NodeKind::mul: return eval_node(n.args[0], x, y) * eval_node(n.args[1], x, y);
    case NodeKind::div: {
        const double a = eval_node(n.args[0], x, y);
        const double b = eval_node(n.args[1], x, y);
        if (b == 0.0) domain_error(n, "division by zero");
        return a / b;
    }
    case NodeKind::pow: {
        const double a = eval_node(n.args[0], x, y);
        const double b = eval_node(n.args[1], x, y);
        if (a == 0.0 && b < 0.0) domain_error(n, "zero raised to a negative power");
        if (a < 0.0 && b != std::floor(b))
            domain_error(n, "negative base with non-integer exponent");
        const double r = std::pow(a, b);
        if (!std::isfinite(r)) domain_error(n, "pow overflow");
        return r;
    }
    case NodeKind::neg: return -eval_node(n.args[0], x, y);
    case NodeKind::call: {
        const double a = eval_node(n.args[0], x, y);
        switch (n.func) {
        case Func::sin: return std::sin(a);
        case Func::cos: return std::cos(a);
        case Func::exp: {
            const double r = std::exp(a);
            if (!std::isfinite(r)) domain_error(n, "exp overflow");
            return r;
        }
        case Func::log:
            if (a <= 0.0) domain_error(n, "log of a non-positive value");
            return std::log(a);
        case Func::sqrt:
            if (a < 0.0) domain_error(n, "sqrt of a negative value");
            return std::sqrt(a);
        case Func::abs: return std::abs(a);
        case Func::atan2: return std::atan2(a, eval_node(n.args[1], x, y));
        }
        domain_error(n, "bad function");
    }
    }
    throw EvalError("corrupt expression tree");
}

// add/sub = 1, mul/div = 2, neg = 3, pow = 4, atom = 5
int node_prec(const Node& n) {
    switch (n.kind) {
    case NodeKind::add:
    case NodeKind::sub: return 1;
    case NodeKind::mul:
    case NodeKind::div: return 2;
    case NodeKind::neg: return 3;
    case NodeKind::pow: return 4;
    default: return 5;
    }
}

void print_node(const Node& n, int min_prec, std::string& out) {
    const int prec = node_prec(n);
    const bool parens = prec < min_prec;
    if (parens) out += '(';
    switch (n.kind) {
    case NodeKind::number: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        out += buf;
        break;
    }
    case NodeKind::var_x: out += 'x'; break;
    case NodeKind::var_y: out += 'y'; break;
    case NodeKind::add:
    case NodeKind::sub:
        print_node(n.args[0], 1, out);
        out += (n.kind == NodeKind::add) ? '+' : '-';
        print_node(n.args[1], 2, out);
        break;
    case NodeKind::mul:
    case NodeKind::div:
        print_node(n.args[0], 2, out);
        out += (n.kind == NodeKind::mul) ? '*' : '/';
        print_node(n.args[1], 3, out);
        break;
    case NodeKind::neg:
        out += '-';
        print_node(n.args[0], 3, out);
        break;
    case NodeKind::pow:
        print_node(n.args[0], 5, out);
        out += '^';
        print_node(n.args[1], 3, out);
        break;
    case NodeKind::call:
        out += func_name(n.func);
        out += '(';
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ',';
            print_node(n.args[i], 1, out);
        }
        out += ')';
        break;
    }
    if (parens) out += ')';
}

} // namespace

Expr parse(std::string_view source) {
    Parser p{source};
    Node root = p.expr();
    p.skip_ws();
    if (p.pos != source.size()) p.fail("trailing input");
    Expr e;
    e.root_ = std::make_shared<Node>(std::move(root));
    e.src_ = std::string(source);
    return e;
}

double eval(const Expr& e, double x, double y) {
    if (e.empty()) throw EvalError("empty expression");
    const double r = eval_node(e.root(), x, y);
    if (!std::isfinite(r)) throw EvalError("domain error: non-finite result");
    return r;
}

std::string to_string(const Expr& e) {
    if (e.empty()) return "";
    std::string out;
    print_node(e.root(), 0, out);
    return out;
}

bool equal(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    if (a.kind == NodeKind::number && a.value != b.value) return false;
    if (a.kind == NodeKind::call && a.func != b.func) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!equal(a.args[i], b.args[i])) return false;
    return true;
}

} // namespace gfem::expr
