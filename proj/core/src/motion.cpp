#include "superspine/motion.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "superspine/errors.hpp"

namespace superspine {

const char* to_string(MotionKind kind) {
  switch (kind) {
    case MotionKind::brownian: return "brownian";
    case MotionKind::drift_diffusion: return "drift_diffusion";
    case MotionKind::killed_box: return "killed_box";
    case MotionKind::subordinate_bm: return "subordinate_bm";
  }
  return "?";
}

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("motion dimension must be 1, 2 or 3");
}

}  // namespace

MotionModel MotionModel::brownian(int dim, double sigma) {
  check_dim(dim);
  if (!(sigma > 0.0)) throw ConfigError("motion sigma must be positive");
  MotionModel m;
  m.kind_ = MotionKind::brownian;
  m.dim_ = dim;
  m.sigma_ = sigma;
  return m;
}

MotionModel MotionModel::drift_diffusion(int dim, double sigma, std::vector<ScalarField> drift) {
  auto m = brownian(dim, sigma);
  if (static_cast<int>(drift.size()) != dim) throw ConfigError("drift needs one field per dimension");
  for (const auto& f : drift) {
    if (!f.bound()) throw ConfigError("drift field '" + f.text() + "' is not bounded");
  }
  m.kind_ = MotionKind::drift_diffusion;
  m.drift_ = std::move(drift);
  return m;
}

MotionModel MotionModel::killed_box(int dim, double sigma, Box box) {
  auto m = brownian(dim, sigma);
  box.dim = dim;
  for (int i = 0; i < dim; ++i) {
    if (!(box.lo[i] < box.hi[i])) throw ConfigError("killing box has an empty side");
  }
  m.kind_ = MotionKind::killed_box;
  m.box_ = box;
  return m;
}

MotionModel MotionModel::subordinate_bm(int dim, double subordinator_index) {
  check_dim(dim);
  if (!(subordinator_index > 0.0 && subordinator_index < 1.0)) {
    throw ConfigError("subordinator index must lie in (0, 1)");
  }
  MotionModel m;
  m.kind_ = MotionKind::subordinate_bm;
  m.dim_ = dim;
  m.beta_ = subordinator_index;
  return m;
}

double MotionModel::sample_subordinator(Rng& rng) const {
  if (beta_ == 0.5) {
    // Levy's identity: 1/(2N^2) has Laplace transform exp(-sqrt(l)).
    double n = rng.normal();
    return 1.0 / (2.0 * n * n);
  }
  // Kanter's representation of the positive stable law.
  double u = M_PI * rng.uniform();
  double e = rng.exponential();
  double b = beta_;
  double a = std::pow(std::pow(std::sin(b * u), b) * std::pow(std::sin((1.0 - b) * u), 1.0 - b) /
                          std::sin(u),
                      1.0 / (1.0 - b));
  return std::pow(a / e, (1.0 - b) / b);
}

Point MotionModel::sample_step(const Point& x, double dt, Rng& rng) const {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_step: dt must be positive");
  if (x.cemetery) return x;
  Point y = x;
  switch (kind_) {
    case MotionKind::brownian: {
      double s = sigma_ * std::sqrt(dt);
      for (int i = 0; i < dim_; ++i) y.x[i] += s * rng.normal();
      break;
    }
    case MotionKind::drift_diffusion: {
      double s = sigma_ * std::sqrt(dt);
      for (int i = 0; i < dim_; ++i) y.x[i] += drift_[i](x) * dt + s * rng.normal();
      break;
    }
    case MotionKind::killed_box: {
      if (!box_.contains(x)) return Point::dead();
      double s = sigma_ * std::sqrt(dt);
      for (int i = 0; i < dim_; ++i) y.x[i] += s * rng.normal();
      if (!box_.contains(y)) return Point::dead();
      break;
    }
    case MotionKind::subordinate_bm: {
      double time = std::pow(dt, 1.0 / beta_) * sample_subordinator(rng);
      double s = std::sqrt(2.0 * time);
      for (int i = 0; i < dim_; ++i) y.x[i] += s * rng.normal();
      break;
    }
  }
  return y;
}

Point MotionModel::sample_path(const Point& x, double t, double max_step, Rng& rng) const {
  if (!(t > 0.0)) throw std::invalid_argument("sample_path: t must be positive");
  if (exact_steps()) return sample_step(x, t, rng);
  std::size_t n = static_cast<std::size_t>(std::ceil(t / max_step - 1e-9));
  if (n == 0) n = 1;
  double h = t / static_cast<double>(n);
  Point y = x;
  for (std::size_t k = 0; k < n && !y.cemetery; ++k) y = sample_step(y, h, rng);
  return y;
}

std::string MotionModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind_) << "(d=" << dim_;
  switch (kind_) {
    case MotionKind::brownian: os << ",sigma=" << sigma_; break;
    case MotionKind::drift_diffusion:
      os << ",sigma=" << sigma_ << ",drift=[";
      for (std::size_t i = 0; i < drift_.size(); ++i) os << (i ? "," : "") << drift_[i].text();
      os << "]";
      break;
    case MotionKind::killed_box:
      os << ",sigma=" << sigma_ << ",box=[";
      for (int i = 0; i < dim_; ++i) os << (i ? "," : "") << box_.lo[i] << ":" << box_.hi[i];
      os << "]";
      break;
    case MotionKind::subordinate_bm: os << ",index=" << beta_; break;
  }
  os << ")";
  return os.str();
}

Estimate semigroup_apply(const MotionModel& motion, const ScalarField& f, double t, const Point& x,
                         std::size_t n_mc, Rng& rng, double max_step, double bound_limit) {
  if (!(t > 0.0)) throw std::invalid_argument("semigroup_apply: t must be positive");
  if (n_mc < 1) throw std::invalid_argument("semigroup_apply: n_mc must be at least 1");
  auto bound = f.bound();
  if (!bound || *bound > bound_limit) {
    throw std::invalid_argument("semigroup_apply: field '" + f.text() + "' is not bounded");
  }
  if (x.cemetery) return {0.0, 0.0};
  if (f.is_constant() && motion.conservative()) return {f.constant_value(), 0.0};
  if (motion.kind() == MotionKind::brownian) {
    if (auto terms = f.gaussian_terms()) {
      double var = motion.sigma() * motion.sigma() * t;
      double total = 0.0;
      for (const auto& term : *terms) {
        double value = term.coefficient;
        for (int i = 0; i < kMaxDim; ++i) {
          if (i < motion.dim()) {
            double denom = 1.0 + 2.0 * term.rate * var;
            value *= std::exp(-term.rate * x.x[i] * x.x[i] / denom) / std::sqrt(denom);
          } else {
            value *= std::exp(-term.rate * x.x[i] * x.x[i]);
          }
        }
        total += value;
      }
      return {total, 0.0};
    }
  }
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < n_mc; ++k) {
    double v = f(motion.sample_path(x, t, max_step, rng));
    double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  double var = n_mc > 1 ? m2 / static_cast<double>(n_mc - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n_mc))};
}

}  // namespace superspine
