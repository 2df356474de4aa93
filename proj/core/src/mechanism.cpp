#include "superspine/mechanism.hpp"

#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "superspine/errors.hpp"
#include "superspine/numerics.hpp"

namespace superspine {

double stable_kernel_constant(double index) {
  return index * (index - 1.0) / std::tgamma(2.0 - index);
}

double LocalMechanism::psi(double z) const {
  if (z < 0.0) throw std::invalid_argument("psi: negative argument");
  double value = -alpha * z + b * z * z;
  if (stable_c > 0.0) value += stable_c * std::pow(z, stable_index);
  for (const auto& [y, r] : atoms) value += r * (std::expm1(-z * y) + z * y);
  return value;
}

double LocalMechanism::psi_prime(double z) const {
  if (z < 0.0) throw std::invalid_argument("psi_prime: negative argument");
  double value = -alpha + 2.0 * b * z;
  if (stable_c > 0.0 && z > 0.0) value += stable_c * stable_index * std::pow(z, stable_index - 1.0);
  for (const auto& [y, r] : atoms) value += -r * y * std::expm1(-z * y);
  return value;
}

double LocalMechanism::kernel_moment() const {
  double m = 0.0;
  if (stable_c > 0.0) {
    double a = stable_index;
    m += stable_c * stable_kernel_constant(a) * (1.0 / (2.0 - a) + 1.0 / (a - 1.0));
  }
  for (const auto& [y, r] : atoms) m += r * std::min(y, y * y);
  return m;
}

BranchingMechanism::BranchingMechanism(ScalarField alpha, ScalarField b, LevyKernel levy,
                                       double bound_K)
    : alpha_(std::move(alpha)), b_(std::move(b)), levy_(std::move(levy)), K_(bound_K) {
  if (const auto* s = std::get_if<StableKernel>(&levy_)) {
    if (!(s->index > 1.0 && s->index < 2.0)) {
      throw ConfigError("stable index must lie in (1, 2)");
    }
  }
  if (const auto* a = std::get_if<AtomKernel>(&levy_)) {
    if (a->sizes.size() != a->rates.size()) throw ConfigError("atom sizes and rates differ in length");
    for (double y : a->sizes) {
      if (!(y > 0.0)) throw ConfigError("atom sizes must be positive");
    }
  }
}

BranchingMechanism BranchingMechanism::quadratic(double b, double alpha) {
  return BranchingMechanism(ScalarField::constant(alpha), ScalarField::constant(b), std::monostate{},
                            std::abs(alpha) + b);
}

BranchingMechanism BranchingMechanism::stable(double index, double c, double alpha) {
  StableKernel k{index, ScalarField::constant(c)};
  LocalMechanism probe;
  probe.stable_c = c;
  probe.stable_index = index;
  return BranchingMechanism(ScalarField::constant(alpha), ScalarField::constant(0.0), k,
                            std::abs(alpha) + probe.kernel_moment());
}

LocalMechanism BranchingMechanism::at(const Point& x) const {
  LocalMechanism m;
  if (x.cemetery) return m;
  m.alpha = alpha_(x);
  m.b = b_(x);
  if (const auto* s = std::get_if<StableKernel>(&levy_)) {
    m.stable_c = s->strength(x);
    m.stable_index = s->index;
  } else if (const auto* a = std::get_if<AtomKernel>(&levy_)) {
    m.atoms.reserve(a->sizes.size());
    for (std::size_t i = 0; i < a->sizes.size(); ++i) m.atoms.emplace_back(a->sizes[i], a->rates[i](x));
  }
  return m;
}

double BranchingMechanism::psi(const Point& x, double z) const {
  if (z < 0.0) throw std::invalid_argument("psi: negative argument");
  if (x.cemetery) return 0.0;
  return at(x).psi(z);
}

double BranchingMechanism::psi_prime(const Point& x, double z) const {
  if (z < 0.0) throw std::invalid_argument("psi_prime: negative argument");
  if (x.cemetery) return 0.0;
  return at(x).psi_prime(z);
}

bool BranchingMechanism::homogeneous() const {
  if (!alpha_.is_constant() || !b_.is_constant()) return false;
  if (const auto* s = std::get_if<StableKernel>(&levy_)) return s->strength.is_constant();
  if (const auto* a = std::get_if<AtomKernel>(&levy_)) {
    for (const auto& r : a->rates) {
      if (!r.is_constant()) return false;
    }
  }
  return true;
}

void BranchingMechanism::validate(std::span<const Point> points) const {
  for (const auto& x : points) {
    auto m = at(x);
    if (m.b < 0.0) throw ConfigError("quadratic coefficient b is negative somewhere on the grid");
    if (m.stable_c < 0.0) throw ConfigError("stable strength is negative somewhere on the grid");
    for (const auto& [y, r] : m.atoms) {
      if (r < 0.0) throw ConfigError("atom rate is negative somewhere on the grid");
    }
    double total = std::abs(m.alpha) + m.b + m.kernel_moment();
    if (total > K_ * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "|alpha| + b + kernel moment = " << total << " exceeds bound K = " << K_;
      throw ConfigError(os.str());
    }
  }
}

std::string BranchingMechanism::describe() const {
  std::ostringstream os;
  os << "alpha=" << alpha_.text() << ";b=" << b_.text();
  if (const auto* s = std::get_if<StableKernel>(&levy_)) {
    os.precision(17);
    os << ";stable(index=" << s->index << ",c=" << s->strength.text() << ")";
  } else if (const auto* a = std::get_if<AtomKernel>(&levy_)) {
    os.precision(17);
    os << ";atoms(";
    for (std::size_t i = 0; i < a->sizes.size(); ++i) {
      os << (i ? "," : "") << a->sizes[i] << ":" << a->rates[i].text();
    }
    os << ")";
  }
  os << ";K=" << K_;
  return os.str();
}

GreyResult grey_check(const std::function<double(double)>& psi, double lower) {
  if (!(lower > 0.0)) throw std::invalid_argument("grey_check: lower limit must be positive");
  constexpr int kMaxDoublings = 900;
  constexpr int kWindow = 8;
  std::deque<double> recent;
  GreyResult result;
  double a = lower;
  for (int k = 0; k < kMaxDoublings; ++k) {
    if (!(psi(a) > 0.0) || !(psi(2.0 * a) > 0.0)) {
      throw std::domain_error("grey_check: mechanism is not eventually positive");
    }
    // Substituting z = a e^u keeps the integrand O(1) on every segment.
    double inc = integrate([&](double u) {
      double z = a * std::exp(u);
      return z / psi(z);
    }, 0.0, std::log(2.0), 1e-13);
    result.integral_estimate += inc;
    if (inc < 1e-10) {
      result.finite = true;
      return result;
    }
    recent.push_back(inc);
    if (static_cast<int>(recent.size()) > kWindow) {
      if (inc >= 0.999 * recent.front()) return result;
      recent.pop_front();
    }
    a *= 2.0;
  }
  return result;
}

}  // namespace superspine
