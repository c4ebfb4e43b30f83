#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wagner/jets.hpp"

namespace wagner::expr {

// Scalar expressions of coordinate variables, parsed once and evaluated many
// times over plain doubles or over jets. Grammar: see docs/expressions.md.

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t offset)
      : std::runtime_error(std::move(message)), offset(offset) {}
  std::size_t offset;  // byte offset into the source text
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ordered set of variable names an expression may reference. Evaluation
// bindings are positional against this order.
struct VarSet {
  std::vector<std::string> names;

  // x1..x{2m+1}
  static VarSet chart_vars(int m);
  // x1..x{2m+1}, v1..v{2m}
  static VarSet fiber_vars(int m);
  // the curve parameter
  static VarSet curve_vars();

  std::optional<int> index_of(std::string_view name) const;
};

namespace detail {
struct Node;
}

class Expr {
 public:
  Expr() = default;

  static Expr parse(std::string_view text, const VarSet& vars);
  static Expr number(double value);

  bool valid() const { return root_ != nullptr; }
  std::string str() const;
  std::vector<int> free_vars() const;  // sorted, unique variable slots

  double evaluate(std::span<const double> values) const;
  jets::Jet evaluate(std::span<const jets::Jet> values) const;

  // Expression with every occurrence of variable `slot` replaced by
  // `replacement` (which must be bound to the same VarSet).
  Expr substitute(int slot, const Expr& replacement) const;

  // Simultaneous substitution: slot i becomes replacements[i] in one pass
  // over this tree, so variables inside a replacement are never rewritten
  // again. Slots without a valid replacement are left alone.
  Expr substitute_all(std::span<const Expr> replacements) const;

  bool same_tree(const Expr& other) const;

  // Small tree algebra for assembling derived expressions (changes of frame,
  // linear combinations). Subtrees are shared, not copied.
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);

  // Convenience: F = L * L for metrics supplied as a length rather than an
  // energy.
  static Expr squared(const Expr& base);

 private:
  explicit Expr(std::shared_ptr<const detail::Node> root)
      : root_(std::move(root)) {}

  std::shared_ptr<const detail::Node> root_;
};

}  // namespace wagner::expr
