#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "superspine/geometry.hpp"

namespace superspine {

struct Atom {
  Point x;
  double mass = 0.0;
};

//! Finite atomic measure on E; the zero measure has no atoms.
struct ParticleMeasure {
  std::vector<Atom> atoms;

  static ParticleMeasure dirac(const Point& x, double mass);

  bool empty() const { return atoms.empty(); }
  double total_mass() const;
  //! <f, mu> = sum of mass * f(location).
  template <class F>
  double integrate(const F& f) const {
    double total = 0.0;
    for (const auto& a : atoms) total += a.mass * f(a.x);
    return total;
  }
  //! Append an atom; non-positive masses and cemetery locations are dropped.
  void add(const Point& x, double mass);
  void append(const ParticleMeasure& other);
};

inline constexpr double kNeverExtinct = std::numeric_limits<double>::infinity();

/*!
 * Measure-valued path on a time grid starting at 0. The extinction time is
 * the first grid time whose measure is empty (zero is a trap), or
 * kNeverExtinct if every stored measure is nonempty.
 */
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<ParticleMeasure> states;
  double extinction_time = kNeverExtinct;

  std::size_t size() const { return times.size(); }
  //! Append a state; enforces increasing times and the zero trap.
  void push(double t, ParticleMeasure state);
  double mass_at(std::size_t k) const { return states[k].total_mass(); }
  //! Index of the grid time equal to t (within 1e-9 relative), or npos.
  std::size_t index_of(double t) const;
};

}  // namespace superspine
