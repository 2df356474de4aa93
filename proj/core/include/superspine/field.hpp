#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "superspine/geometry.hpp"

namespace superspine {

//! Closed interval with possibly infinite ends.
struct Interval {
  double lo;
  double hi;
};

//! One term c * exp(-k |x|^2) of a Gaussian mixture (k = 0 is a constant).
struct GaussianTerm {
  double coefficient;
  double rate;
};

namespace detail {
struct FieldNode;
}

/*!
 * Real-valued function on E, evaluating to 0 at the cemetery.
 *
 * Fields come either from the expression grammar
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary ('*' unary)*
 *   unary   := '-' unary | primary
 *   primary := number | x1 | x2 | x3 | exp(-|x|^2)
 *            | clamp(expr, number, number) | '(' expr ')'
 *
 * or from an arbitrary callable plus a caller-supplied bound. Expression
 * fields carry an interval bound and, when they are sums of products of
 * Gaussians, an exact Gaussian-mixture decomposition.
 */
class ScalarField {
 public:
  ScalarField();  //!< the zero field

  static ScalarField constant(double c);
  //! Parse an expression; throws ConfigError with the column on failure.
  static ScalarField parse(const std::string& text);
  static ScalarField from_function(std::function<double(const Point&)> fn,
                                   std::optional<Interval> range, std::string label);

  double operator()(const Point& p) const;

  bool is_constant() const { return constant_.has_value(); }
  double constant_value() const { return constant_.value_or(0.0); }

  //! Interval enclosing the field's range; nullopt if unbounded.
  std::optional<Interval> range() const;
  //! sup |f|, or nullopt if the field is not known to be bounded.
  std::optional<double> bound() const;

  //! Gaussian-mixture decomposition if the expression admits one.
  std::optional<std::vector<GaussianTerm>> gaussian_terms() const;

  //! Canonical text used for fingerprints and config echo.
  const std::string& text() const { return text_; }

 private:
  std::shared_ptr<const detail::FieldNode> root_;
  std::function<double(const Point&)> fn_;
  std::optional<Interval> fn_range_;
  std::optional<double> constant_;
  std::string text_;
};

}  // namespace superspine
