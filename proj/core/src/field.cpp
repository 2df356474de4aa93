#include "superspine/field.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "superspine/errors.hpp"

namespace superspine {

namespace detail {

enum class Op { constant, coord, gauss, add, mul, neg, clamp };

struct FieldNode {
  Op op = Op::constant;
  double value = 0.0;  // constant value, or clamp lower bound
  double upper = 0.0;  // clamp upper bound
  int coord = 0;
  std::shared_ptr<const FieldNode> lhs;
  std::shared_ptr<const FieldNode> rhs;

  double eval(const Point& p) const {
    switch (op) {
      case Op::constant: return value;
      case Op::coord: return p.x[coord];
      case Op::gauss: return std::exp(-squared_norm(p));
      case Op::add: return lhs->eval(p) + rhs->eval(p);
      case Op::mul: return lhs->eval(p) * rhs->eval(p);
      case Op::neg: return -lhs->eval(p);
      case Op::clamp: return std::clamp(lhs->eval(p), value, upper);
    }
    return 0.0;
  }
};

}  // namespace detail

namespace {

using detail::FieldNode;
using detail::Op;
using NodePtr = std::shared_ptr<const FieldNode>;

constexpr double kInf = std::numeric_limits<double>::infinity();

NodePtr make_constant(double c) {
  auto n = std::make_shared<FieldNode>();
  n->op = Op::constant;
  n->value = c;
  return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<FieldNode>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

// Products of intervals must treat 0 * inf as 0.
double safe_mul(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

Interval node_range(const FieldNode& n) {
  switch (n.op) {
    case Op::constant: return {n.value, n.value};
    case Op::coord: return {-kInf, kInf};
    case Op::gauss: return {0.0, 1.0};
    case Op::add: {
      auto a = node_range(*n.lhs);
      auto b = node_range(*n.rhs);
      return {a.lo + b.lo, a.hi + b.hi};
    }
    case Op::mul: {
      auto a = node_range(*n.lhs);
      auto b = node_range(*n.rhs);
      double c[4] = {safe_mul(a.lo, b.lo), safe_mul(a.lo, b.hi), safe_mul(a.hi, b.lo),
                     safe_mul(a.hi, b.hi)};
      return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
    }
    case Op::neg: {
      auto a = node_range(*n.lhs);
      return {-a.hi, -a.lo};
    }
    case Op::clamp: {
      auto a = node_range(*n.lhs);
      return {std::clamp(a.lo, n.value, n.upper), std::clamp(a.hi, n.value, n.upper)};
    }
  }
  return {-kInf, kInf};
}

std::optional<std::vector<GaussianTerm>> node_gaussian(const FieldNode& n) {
  switch (n.op) {
    case Op::constant: return std::vector<GaussianTerm>{{n.value, 0.0}};
    case Op::gauss: return std::vector<GaussianTerm>{{1.0, 1.0}};
    case Op::add: {
      auto a = node_gaussian(*n.lhs);
      auto b = node_gaussian(*n.rhs);
      if (!a || !b) return std::nullopt;
      a->insert(a->end(), b->begin(), b->end());
      return a;
    }
    case Op::mul: {
      auto a = node_gaussian(*n.lhs);
      auto b = node_gaussian(*n.rhs);
      if (!a || !b) return std::nullopt;
      std::vector<GaussianTerm> out;
      for (const auto& s : *a) {
        for (const auto& t : *b) out.push_back({s.coefficient * t.coefficient, s.rate + t.rate});
      }
      return out;
    }
    case Op::neg: {
      auto a = node_gaussian(*n.lhs);
      if (!a) return std::nullopt;
      for (auto& t : *a) t.coefficient = -t.coefficient;
      return a;
    }
    default: return std::nullopt;
  }
}

bool node_constant(const FieldNode& n, double* out) {
  switch (n.op) {
    case Op::constant: *out = n.value; return true;
    case Op::coord:
    case Op::gauss: return false;
    case Op::add:
    case Op::mul: {
      double a, b;
      if (!node_constant(*n.lhs, &a) || !node_constant(*n.rhs, &b)) return false;
      *out = n.op == Op::add ? a + b : a * b;
      return true;
    }
    case Op::neg: {
      double a;
      if (!node_constant(*n.lhs, &a)) return false;
      *out = -a;
      return true;
    }
    case Op::clamp: {
      double a;
      if (!node_constant(*n.lhs, &a)) return false;
      *out = std::clamp(a, n.value, n.upper);
      return true;
    }
  }
  return false;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    auto n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("field expression '" + s_ + "' column " + std::to_string(pos_ + 1) + ": " +
                      msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(const std::string& tok) {
    skip();
    if (s_.compare(pos_, tok.size(), tok) == 0) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(const std::string& tok) {
    if (!accept(tok)) fail("expected '" + tok + "'");
  }

  NodePtr expr() {
    auto n = term();
    for (;;) {
      if (accept("+")) {
        n = make_binary(Op::add, n, term());
      } else if (accept("-")) {
        auto neg = std::make_shared<FieldNode>();
        neg->op = Op::neg;
        neg->lhs = term();
        n = make_binary(Op::add, n, neg);
      } else {
        return n;
      }
    }
  }

  NodePtr term() {
    auto n = unary();
    while (accept("*")) n = make_binary(Op::mul, n, unary());
    return n;
  }

  NodePtr unary() {
    if (accept("-")) {
      auto n = std::make_shared<FieldNode>();
      n->op = Op::neg;
      n->lhs = unary();
      return n;
    }
    return primary();
  }

  double number_literal() {
    skip();
    bool negative = accept("-");
    skip();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return negative ? -v : v;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    if (accept("(")) {
      auto n = expr();
      expect(")");
      return n;
    }
    if (accept("exp")) {
      expect("(");
      expect("-");
      expect("|");
      expect("x");
      expect("|");
      expect("^");
      expect("2");
      expect(")");
      auto n = std::make_shared<FieldNode>();
      n->op = Op::gauss;
      return n;
    }
    if (accept("clamp")) {
      expect("(");
      auto inner = expr();
      expect(",");
      double lo = number_literal();
      expect(",");
      double hi = number_literal();
      expect(")");
      if (!(lo <= hi)) fail("clamp bounds out of order");
      auto n = std::make_shared<FieldNode>();
      n->op = Op::clamp;
      n->lhs = inner;
      n->value = lo;
      n->upper = hi;
      return n;
    }
    for (int i = 0; i < kMaxDim; ++i) {
      if (accept("x" + std::to_string(i + 1))) {
        auto n = std::make_shared<FieldNode>();
        n->op = Op::coord;
        n->coord = i;
        return n;
      }
    }
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return make_constant(number_literal());
    fail("unknown token");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

std::string format_constant(double c) {
  std::ostringstream os;
  os.precision(17);
  os << c;
  return os.str();
}

}  // namespace

ScalarField::ScalarField() : root_(make_constant(0.0)), constant_(0.0), text_("0") {}

ScalarField ScalarField::constant(double c) {
  ScalarField f;
  f.root_ = make_constant(c);
  f.constant_ = c;
  f.text_ = format_constant(c);
  return f;
}

ScalarField ScalarField::parse(const std::string& text) {
  ScalarField f;
  f.root_ = Parser(text).parse();
  double c;
  if (node_constant(*f.root_, &c)) {
    f.constant_ = c;
  } else {
    f.constant_.reset();
  }
  f.text_ = text;
  return f;
}

ScalarField ScalarField::from_function(std::function<double(const Point&)> fn,
                                       std::optional<Interval> range, std::string label) {
  ScalarField f;
  f.root_.reset();
  f.fn_ = std::move(fn);
  f.fn_range_ = range;
  f.constant_.reset();
  f.text_ = std::move(label);
  return f;
}

double ScalarField::operator()(const Point& p) const {
  if (p.cemetery) return 0.0;
  if (constant_) return *constant_;
  if (root_) return root_->eval(p);
  return fn_(p);
}

std::optional<Interval> ScalarField::range() const {
  Interval r{-kInf, kInf};
  if (root_) {
    r = node_range(*root_);
  } else if (fn_range_) {
    r = *fn_range_;
  } else {
    return std::nullopt;
  }
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) return std::nullopt;
  return r;
}

std::optional<double> ScalarField::bound() const {
  auto r = range();
  if (!r) return std::nullopt;
  return std::max(std::abs(r->lo), std::abs(r->hi));
}

std::optional<std::vector<GaussianTerm>> ScalarField::gaussian_terms() const {
  if (!root_) return std::nullopt;
  return node_gaussian(*root_);
}

}  // namespace superspine
