#ifndef GFEM_EXPR_HPP
#define GFEM_EXPR_HPP

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gfem/geometry.hpp"

namespace gfem::expr {

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class EvalError : public Error {
public:
    using Error::Error;
};

enum class NodeKind { number, var_x, var_y, add, sub, mul, div, pow, neg, call };
enum class Func { sin, cos, exp, log, sqrt, abs, atan2 };

struct Node {
    NodeKind kind;
    double value = 0.0; // number
    Func func = Func::sin;
    std::vector<Node> args;
    std::size_t offset = 0; // byte offset in the source, for diagnostics
};

/// Parsed arithmetic expression in variables x, y with constant pi.
/// Immutable and cheap to copy.
class Expr {
public:
    Expr() = default;
    const Node& root() const { return *root_; }
    const std::string& source() const { return src_; }
    bool empty() const { return root_ == nullptr; }

private:
    std::shared_ptr<const Node> root_;
    std::string src_;
    friend Expr parse(std::string_view);
};

/// Recursive-descent parser. Precedence: ^ (right-assoc) > unary - > */ > +-.
/// Functions: sin cos exp log sqrt abs atan2(,).
Expr parse(std::string_view source);

/// IEEE double evaluation; domain violations (log of a non-positive value,
/// division by zero, invalid pow, non-finite result) throw EvalError naming
/// the offending node.
double eval(const Expr& e, double x, double y);

/// Canonical text form; parse(to_string(e)) reproduces the same tree.
std::string to_string(const Expr& e);

bool equal(const Node& a, const Node& b);

} // namespace gfem::expr

#endif
