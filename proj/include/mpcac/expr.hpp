#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mpcac/types.hpp"

namespace mpcac {

/// Immutable polynomial expression tree over variables x_1..x_n.
///
/// Copies share the underlying nodes, so an Expr is cheap to pass by value and
/// safe to evaluate concurrently. Variable indices are zero-based in the API
/// and one-based in text ("x1" is index 0).
class Expr {
 public:
  enum class Kind { Constant, Variable, Sum, Product, Power, Negation, Affine };

  struct Term {
    int index;
    double coef;
  };

  Expr();  // constant 0

  static Expr constant(double value);
  static Expr variable(int index);
  static Expr sum(std::vector<Expr> children);
  static Expr product(std::vector<Expr> children);
  static Expr power(Expr base, int exponent);
  static Expr negate(Expr child);
  /// sum_k coef_k * x_{index_k} + offset. Zero coefficients are dropped.
  static Expr affine(std::vector<Term> terms, double offset);

  Kind kind() const;
  double value() const;  // Constant only
  int index() const;     // Variable only
  int exponent() const;  // Power only
  const std::vector<Expr>& children() const;
  const std::vector<Term>& terms() const;  // Affine only
  double offset() const;                   // Affine only

  /// Largest variable index referenced, or -1 for a constant expression.
  int max_variable() const;

  /// Structural polynomial degree (an upper bound on the true degree).
  int degree() const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Parses the prefix grammar
///   expr := number | "x" digits | "(" op expr+ ")",  op in { + * neg ^ }
/// where "^" takes an expression followed by an integer literal >= 1.
/// Throws ParseError (with byte offset) on malformed text or an index > n.
Expr parse_expr(std::string_view text, int n);

/// Canonical prefix form, one space between tokens. parse_expr inverts it.
std::string to_string(const Expr& e);

/// Conventional infix rendering for reports. Variables with index >= n_x are
/// printed as y_{index - n_x + 1}; pass n_x < 0 to print everything as x.
std::string to_infix(const Expr& e, int n_x = -1);

double eval(const Expr& e, const Eigen::Ref<const Vec>& x);

/// Exact gradient by structural differentiation; result has size x.size().
Vec grad(const Expr& e, const Eigen::Ref<const Vec>& x);

/// max_i |grad_i - central difference_i| with step h.
double grad_check(const Expr& e, const Eigen::Ref<const Vec>& x, double h);

/// Replaces every variable i with keep[i] == false by the constant 0.
Expr fix_to_zero(const Expr& e, const std::vector<bool>& keep);

/// e(z) = a^T z + b, extracted exactly from an expression of degree <= 1.
struct AffineForm {
  Vec a;
  double b = 0.0;
};
AffineForm affine_form(const Expr& e, int n);

/// e(z) = 0.5 z^T Q z + c^T z + d for an expression of degree <= 2.
struct QuadraticForm {
  Mat Q;
  Vec c;
  double d = 0.0;
};
QuadraticForm quadratic_form(const Expr& e, int n);

}  // namespace mpcac
