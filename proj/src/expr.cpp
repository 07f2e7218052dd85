#include "mpcac/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <system_error>

#include "mpcac/error.hpp"

namespace mpcac {

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  int index = -1;
  int exponent = 1;
  std::vector<Expr> children;
  std::vector<Term> terms;
  int max_var = -1;
};

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(int index) {
  if (index < 0) throw InvalidInput("variable index must be non-negative");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->index = index;
  n->max_var = index;
  return Expr(std::move(n));
}

namespace {

int max_over(const std::vector<Expr>& children) {
  int m = -1;
  for (const auto& c : children) m = std::max(m, c.max_variable());
  return m;
}

}  // namespace

Expr Expr::sum(std::vector<Expr> children) {
  if (children.empty()) throw InvalidInput("sum needs at least one operand");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->max_var = max_over(children);
  n->children = std::move(children);
  return Expr(std::move(n));
}

Expr Expr::product(std::vector<Expr> children) {
  if (children.empty()) throw InvalidInput("product needs at least one operand");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  n->max_var = max_over(children);
  n->children = std::move(children);
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, int exponent) {
  if (exponent < 1) throw InvalidInput("exponent must be an integer >= 1");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Power;
  n->exponent = exponent;
  n->max_var = base.max_variable();
  n->children.push_back(std::move(base));
  return Expr(std::move(n));
}

Expr Expr::negate(Expr child) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Negation;
  n->max_var = child.max_variable();
  n->children.push_back(std::move(child));
  return Expr(std::move(n));
}

Expr Expr::affine(std::vector<Term> terms, double offset) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Affine;
  n->value = offset;
  for (const auto& t : terms) {
    if (t.index < 0) throw InvalidInput("variable index must be non-negative");
    if (t.coef != 0.0) {
      n->terms.push_back(t);
      n->max_var = std::max(n->max_var, t.index);
    }
  }
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
int Expr::index() const { return node_->index; }
int Expr::exponent() const { return node_->exponent; }
const std::vector<Expr>& Expr::children() const { return node_->children; }
const std::vector<Expr::Term>& Expr::terms() const { return node_->terms; }
double Expr::offset() const { return node_->value; }
int Expr::max_variable() const { return node_->max_var; }

int Expr::degree() const {
  switch (kind()) {
    case Kind::Constant:
      return 0;
    case Kind::Variable:
      return 1;
    case Kind::Affine:
      return terms().empty() ? 0 : 1;
    case Kind::Negation:
      return children()[0].degree();
    case Kind::Power:
      return children()[0].degree() * exponent();
    case Kind::Sum: {
      int d = 0;
      for (const auto& c : children()) d = std::max(d, c.degree());
      return d;
    }
    case Kind::Product: {
      int d = 0;
      for (const auto& c : children()) d += c.degree();
      return d;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, int n) : text_(text), n_(n) {}

  Expr parse() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r'))
      ++pos_;
  }

  static bool is_delim(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '(' || c == ')';
  }

  std::string_view token() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '(' || text_[pos_] == ')')) {
      ++pos_;
    } else {
      while (pos_ < text_.size() && !is_delim(text_[pos_])) ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  Expr parse_expr() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    if (text_[pos_] == '(') {
      ++pos_;
      return parse_compound();
    }
    if (text_[pos_] == ')') throw ParseError("unexpected ')'", pos_);
    std::size_t start = pos_;
    std::string_view tok = token();
    if (tok.front() == 'x') return parse_variable(tok, start);
    return Expr::constant(parse_number(tok, start));
  }

  Expr parse_variable(std::string_view tok, std::size_t start) {
    auto digits = tok.substr(1);
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(),
                     [](char c) { return c >= '0' && c <= '9'; }))
      throw ParseError("malformed variable '" + std::string(tok) + "'", start);
    long idx = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
    if (ec != std::errc() || idx < 1 || idx > n_)
      throw ParseError("variable index out of range 1.." + std::to_string(n_) + ": '" +
                           std::string(tok) + "'",
                       start);
    return Expr::variable(static_cast<int>(idx - 1));
  }

  double parse_number(std::string_view tok, std::size_t start) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
      throw ParseError("malformed number '" + std::string(tok) + "'", start);
    return v;
  }

  Expr parse_compound() {
    skip_ws();
    std::size_t op_pos = pos_;
    std::string_view op = token();
    if (op.empty() || op == "(" || op == ")") throw ParseError("expected operator", op_pos);

    if (op == "^") {
      Expr base = parse_expr();
      skip_ws();
      std::size_t exp_pos = pos_;
      std::string_view tok = token();
      int k = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), k);
      if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || k < 1)
        throw ParseError("exponent must be an integer literal >= 1", exp_pos);
      expect_close();
      return Expr::power(std::move(base), k);
    }

    if (op != "+" && op != "*" && op != "neg")
      throw ParseError("unknown operator '" + std::string(op) + "'", op_pos);

    std::vector<Expr> args;
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
      if (text_[pos_] == ')') break;
      args.push_back(parse_expr());
    }
    if (args.empty()) throw ParseError("operator needs at least one operand", pos_);
    if (op == "neg") {
      if (args.size() != 1) throw ParseError("neg takes exactly one operand", op_pos);
      expect_close();
      return Expr::negate(std::move(args[0]));
    }
    expect_close();
    return op == "+" ? Expr::sum(std::move(args)) : Expr::product(std::move(args));
  }

  void expect_close() {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != ')') throw ParseError("expected ')'", pos_);
    ++pos_;
  }

  std::string_view text_;
  int n_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void print_prefix(const Expr& e, std::string& out) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant:
      out += format_number(e.value());
      return;
    case K::Variable:
      out += 'x';
      out += std::to_string(e.index() + 1);
      return;
    case K::Negation:
      out += "(neg ";
      print_prefix(e.children()[0], out);
      out += ')';
      return;
    case K::Power:
      out += "(^ ";
      print_prefix(e.children()[0], out);
      out += ' ';
      out += std::to_string(e.exponent());
      out += ')';
      return;
    case K::Sum:
    case K::Product:
      out += e.kind() == K::Sum ? "(+" : "(*";
      for (const auto& c : e.children()) {
        out += ' ';
        print_prefix(c, out);
      }
      out += ')';
      return;
    case K::Affine: {
      // Mirrors eval(): terms left to right, then the offset when nonzero.
      const auto& terms = e.terms();
      auto term = [&](const Expr::Term& t) {
        out += "(* " + format_number(t.coef) + " x" + std::to_string(t.index + 1) + ")";
      };
      if (terms.empty()) {
        out += format_number(e.offset());
      } else if (terms.size() == 1 && e.offset() == 0.0) {
        term(terms[0]);
      } else {
        out += "(+";
        for (const auto& t : terms) {
          out += ' ';
          term(t);
        }
        if (e.offset() != 0.0) out += ' ' + format_number(e.offset());
        out += ')';
      }
      return;
    }
  }
}

// Infix precedence: sum 1, product 2, unary minus 3, power 4, atom 5.
int precedence(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Sum:
      return e.children().size() > 1 ? 1 : precedence(e.children()[0]);
    case K::Affine:
      if (e.terms().empty()) return e.offset() < 0 ? 3 : 5;
      return (e.terms().size() == 1 && e.offset() == 0.0) ? 2 : 1;
    case K::Product:
      return 2;
    case K::Negation:
      return 3;
    case K::Power:
      return 4;
    case K::Constant:
      return e.value() < 0 ? 3 : 5;
    case K::Variable:
      return 5;
  }
  return 5;
}

std::string infix(const Expr& e, int n_x);

std::string wrap(const Expr& e, int n_x, int min_prec) {
  std::string s = infix(e, n_x);
  return precedence(e) < min_prec ? "(" + s + ")" : s;
}

std::string var_name(int index, int n_x) {
  if (n_x >= 0 && index >= n_x) return "y" + std::to_string(index - n_x + 1);
  return "x" + std::to_string(index + 1);
}

void append_signed(std::string& out, const std::string& s) {
  if (out.empty()) {
    out = s;
  } else if (!s.empty() && s.front() == '-') {
    out += " - " + s.substr(1);
  } else {
    out += " + " + s;
  }
}

std::string infix(const Expr& e, int n_x) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant:
      return format_number(e.value());
    case K::Variable:
      return var_name(e.index(), n_x);
    case K::Negation:
      return "-" + wrap(e.children()[0], n_x, 3);
    case K::Power:
      return wrap(e.children()[0], n_x, 5) + "^" + std::to_string(e.exponent());
    case K::Sum: {
      std::string out;
      for (const auto& c : e.children()) append_signed(out, infix(c, n_x));
      return out;
    }
    case K::Product: {
      std::string out;
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i) out += '*';
        out += i == 0 ? wrap(e.children()[i], n_x, 2) : wrap(e.children()[i], n_x, 4);
      }
      return out;
    }
    case K::Affine: {
      std::string out;
      for (const auto& t : e.terms()) {
        std::string name = var_name(t.index, n_x);
        if (t.coef == 1.0) {
          append_signed(out, name);
        } else if (t.coef == -1.0) {
          append_signed(out, "-" + name);
        } else {
          append_signed(out, format_number(t.coef) + "*" + name);
        }
      }
      if (e.offset() != 0.0 || e.terms().empty()) append_signed(out, format_number(e.offset()));
      return out;
    }
  }
  return {};
}

void require_dim(const Expr& e, Index size) {
  if (e.max_variable() >= size)
    throw InvalidInput("point has dimension " + std::to_string(size) +
                       " but the expression references x" +
                       std::to_string(e.max_variable() + 1));
}

double eval_node(const Expr& e, const Eigen::Ref<const Vec>& x) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant:
      return e.value();
    case K::Variable:
      return x[e.index()];
    case K::Negation:
      return -eval_node(e.children()[0], x);
    case K::Power: {
      double b = eval_node(e.children()[0], x);
      double acc = b;
      for (int k = 1; k < e.exponent(); ++k) acc *= b;
      return acc;
    }
    case K::Sum: {
      const auto& c = e.children();
      double acc = eval_node(c[0], x);
      for (std::size_t i = 1; i < c.size(); ++i) acc += eval_node(c[i], x);
      return acc;
    }
    case K::Product: {
      const auto& c = e.children();
      double acc = eval_node(c[0], x);
      for (std::size_t i = 1; i < c.size(); ++i) acc *= eval_node(c[i], x);
      return acc;
    }
    case K::Affine: {
      const auto& t = e.terms();
      if (t.empty()) return e.offset();
      double acc = t[0].coef * x[t[0].index];
      for (std::size_t i = 1; i < t.size(); ++i) acc += t[i].coef * x[t[i].index];
      if (e.offset() != 0.0) acc += e.offset();
      return acc;
    }
  }
  return 0.0;
}

// Value and gradient in one pass; the gradient accumulates into `g` scaled by `w`.
double eval_grad(const Expr& e, const Eigen::Ref<const Vec>& x, double w, Vec& g) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant:
      return e.value();
    case K::Variable:
      g[e.index()] += w;
      return x[e.index()];
    case K::Negation:
      return -eval_grad(e.children()[0], x, -w, g);
    case K::Power: {
      const Expr& base = e.children()[0];
      double b = eval_node(base, x);
      int k = e.exponent();
      double lower = 1.0;  // b^(k-1)
      for (int i = 1; i < k; ++i) lower *= b;
      eval_grad(base, x, w * k * lower, g);
      return lower * b;
    }
    case K::Sum: {
      const auto& c = e.children();
      double acc = eval_grad(c[0], x, w, g);
      for (std::size_t i = 1; i < c.size(); ++i) acc += eval_grad(c[i], x, w, g);
      return acc;
    }
    case K::Product: {
      const auto& c = e.children();
      const std::size_t m = c.size();
      std::vector<double> v(m);
      for (std::size_t i = 0; i < m; ++i) v[i] = eval_node(c[i], x);
      // prefix[i] = v_0..v_{i-1}, suffix[i] = v_{i+1}..v_{m-1}; no division.
      std::vector<double> prefix(m, 1.0), suffix(m, 1.0);
      for (std::size_t i = 1; i < m; ++i) prefix[i] = prefix[i - 1] * v[i - 1];
      for (std::size_t i = m - 1; i-- > 0;) suffix[i] = suffix[i + 1] * v[i + 1];
      for (std::size_t i = 0; i < m; ++i) eval_grad(c[i], x, w * prefix[i] * suffix[i], g);
      return eval_node(e, x);
    }
    case K::Affine:
      for (const auto& t : e.terms()) g[t.index] += w * t.coef;
      return eval_node(e, x);
  }
  return 0.0;
}

Expr fix_node(const Expr& e, const std::vector<bool>& keep) {
  using K = Expr::Kind;
  auto kept = [&](int i) { return i < static_cast<int>(keep.size()) && keep[i]; };
  switch (e.kind()) {
    case K::Constant:
      return e;
    case K::Variable:
      return kept(e.index()) ? e : Expr::constant(0.0);
    case K::Negation:
      return Expr::negate(fix_node(e.children()[0], keep));
    case K::Power:
      return Expr::power(fix_node(e.children()[0], keep), e.exponent());
    case K::Sum:
    case K::Product: {
      std::vector<Expr> c;
      c.reserve(e.children().size());
      for (const auto& ch : e.children()) c.push_back(fix_node(ch, keep));
      return e.kind() == K::Sum ? Expr::sum(std::move(c)) : Expr::product(std::move(c));
    }
    case K::Affine: {
      std::vector<Expr::Term> t;
      for (const auto& term : e.terms())
        if (kept(term.index)) t.push_back(term);
      return Expr::affine(std::move(t), e.offset());
    }
  }
  return e;
}

}  // namespace

Expr parse_expr(std::string_view text, int n) { return Parser(text, n).parse(); }

std::string to_string(const Expr& e) {
  std::string out;
  print_prefix(e, out);
  return out;
}

std::string to_infix(const Expr& e, int n_x) { return infix(e, n_x); }

double eval(const Expr& e, const Eigen::Ref<const Vec>& x) {
  require_dim(e, x.size());
  return eval_node(e, x);
}

Vec grad(const Expr& e, const Eigen::Ref<const Vec>& x) {
  require_dim(e, x.size());
  Vec g = Vec::Zero(x.size());
  eval_grad(e, x, 1.0, g);
  return g;
}

double grad_check(const Expr& e, const Eigen::Ref<const Vec>& x, double h) {
  if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
  Vec g = grad(e, x);
  Vec probe = x;
  double worst = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    double up = eval_node(e, probe);
    probe[i] = x[i] - h;
    double down = eval_node(e, probe);
    probe[i] = x[i];
    worst = std::max(worst, std::abs(g[i] - (up - down) / (2.0 * h)));
  }
  return worst;
}

Expr fix_to_zero(const Expr& e, const std::vector<bool>& keep) { return fix_node(e, keep); }

AffineForm affine_form(const Expr& e, int n) {
  if (e.degree() > 1) throw InvalidInput("expression is not affine: " + to_string(e));
  Vec zero = Vec::Zero(n);
  return {grad(e, zero), eval(e, zero)};
}

QuadraticForm quadratic_form(const Expr& e, int n) {
  if (e.degree() > 2) throw InvalidInput("expression is not quadratic: " + to_string(e));
  Vec z = Vec::Zero(n);
  QuadraticForm q;
  q.c = grad(e, z);
  q.d = eval(e, z);
  q.Q.resize(n, n);
  for (int j = 0; j < n; ++j) {
    z[j] = 1.0;
    q.Q.col(j) = grad(e, z) - q.c;
    z[j] = 0.0;
  }
  q.Q = 0.5 * (q.Q + q.Q.transpose()).eval();
  return q;
}

}  // namespace mpcac
