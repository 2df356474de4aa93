#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "superspine/errors.hpp"
#include "superspine/extinction.hpp"

namespace superspine {

namespace {

constexpr const char* kMagic = "superspine-profile";
constexpr int kVersion = 1;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_row(std::ostream& os, const double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) os << (i ? " " : "") << num(data[i]);
  os << '\n';
}

template <class T>
T read_value(std::istream& is, const char* what) {
  T value;
  if (!(is >> value)) throw ConfigError(std::string("profile file: cannot read ") + what);
  return value;
}

void expect_word(std::istream& is, const std::string& word) {
  auto got = read_value<std::string>(is, word.c_str());
  if (got != word) throw ConfigError("profile file: expected '" + word + "', found '" + got + "'");
}

}  // namespace

void ExtinctionProfile::write(std::ostream& os) const {
  os << kMagic << ' ' << kVersion << '\n';
  os << "mode " << (mode_ == Mode::closed_form ? "closed_form" : "grid") << '\n';
  os << "mechanism " << mechanism_fp_ << '\n';
  os << "motion " << motion_fp_ << '\n';
  if (mode_ == Mode::closed_form) {
    os << "local " << num(local_.alpha) << ' ' << num(local_.b) << ' ' << num(local_.stable_c) << ' '
       << num(local_.stable_index) << ' ' << local_.atoms.size();
    for (const auto& [y, r] : local_.atoms) os << ' ' << num(y) << ' ' << num(r);
    os << '\n';
  }
  if (support_) {
    os << "support " << support_->dim;
    for (int i = 0; i < support_->dim; ++i) os << ' ' << num(support_->lo[i]) << ' ' << num(support_->hi[i]);
    os << '\n';
  } else {
    os << "support none\n";
  }
  if (grid_.singleton()) {
    os << "space singleton\n";
  } else {
    os << "space " << grid_.dim();
    for (int i = 0; i < grid_.dim(); ++i) {
      os << ' ' << num(grid_.lo(i)) << ' ' << num(grid_.hi(i)) << ' ' << grid_.count(i);
    }
    os << '\n';
  }
  os << "times " << times_.size() << '\n';
  write_row(os, times_.data(), times_.size());
  std::size_t n = mode_ == Mode::closed_form ? 1 : grid_.size();
  os << "v\n";
  for (std::size_t k = 0; k < times_.size(); ++k) write_row(os, v_.data() + k * n, n);
  os << "w\n";
  for (std::size_t k = 0; k < times_.size(); ++k) write_row(os, w_.data() + k * n, n);
}

ExtinctionProfile ExtinctionProfile::read(std::istream& is) {
  expect_word(is, kMagic);
  if (read_value<int>(is, "version") != kVersion) throw ConfigError("profile file: unsupported version");
  expect_word(is, "mode");
  auto mode = read_value<std::string>(is, "mode");
  if (mode != "closed_form" && mode != "grid") throw ConfigError("profile file: unknown mode " + mode);
  ExtinctionProfile p;
  p.mode_ = mode == "grid" ? Mode::grid : Mode::closed_form;
  expect_word(is, "mechanism");
  p.mechanism_fp_ = read_value<std::string>(is, "mechanism fingerprint");
  expect_word(is, "motion");
  p.motion_fp_ = read_value<std::string>(is, "motion fingerprint");
  if (p.mode_ == Mode::closed_form) {
    expect_word(is, "local");
    p.local_.alpha = read_value<double>(is, "alpha");
    p.local_.b = read_value<double>(is, "b");
    p.local_.stable_c = read_value<double>(is, "stable strength");
    p.local_.stable_index = read_value<double>(is, "stable index");
    auto n_atoms = read_value<std::size_t>(is, "atom count");
    for (std::size_t i = 0; i < n_atoms; ++i) {
      double y = read_value<double>(is, "atom size");
      double r = read_value<double>(is, "atom rate");
      p.local_.atoms.emplace_back(y, r);
    }
    p.closed_ = has_closed_form(p.local_);
  }
  expect_word(is, "support");
  auto support = read_value<std::string>(is, "support");
  if (support != "none") {
    Box box;
    box.dim = std::stoi(support);
    for (int i = 0; i < box.dim; ++i) {
      box.lo[i] = read_value<double>(is, "support lo");
      box.hi[i] = read_value<double>(is, "support hi");
    }
    p.support_ = box;
  }
  expect_word(is, "space");
  auto space = read_value<std::string>(is, "space");
  if (space != "singleton") {
    int dim = std::stoi(space);
    std::array<double, kMaxDim> lo{}, hi{};
    std::array<int, kMaxDim> counts{1, 1, 1};
    for (int i = 0; i < dim; ++i) {
      lo[i] = read_value<double>(is, "space lo");
      hi[i] = read_value<double>(is, "space hi");
      counts[i] = read_value<int>(is, "space count");
    }
    p.grid_ = SpatialGrid(dim, lo, hi, counts);
  }
  expect_word(is, "times");
  auto m = read_value<std::size_t>(is, "time count");
  p.times_.resize(m);
  for (auto& t : p.times_) t = read_value<double>(is, "time");
  std::size_t n = p.mode_ == Mode::closed_form ? 1 : p.grid_.size();
  expect_word(is, "v");
  p.v_.resize(m * n);
  for (auto& x : p.v_) x = read_value<double>(is, "v value");
  expect_word(is, "w");
  p.w_.resize(m * n);
  for (auto& x : p.w_) x = read_value<double>(is, "w value");
  if (p.mode_ == Mode::grid && m < 2) throw ConfigError("profile file: grid mode needs two times");
  return p;
}

}  // namespace superspine
