#include "superspine/measure.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace superspine {

ParticleMeasure ParticleMeasure::dirac(const Point& x, double mass) {
  ParticleMeasure m;
  m.add(x, mass);
  return m;
}

double ParticleMeasure::total_mass() const {
  double total = 0.0;
  for (const auto& a : atoms) total += a.mass;
  return total;
}

void ParticleMeasure::add(const Point& x, double mass) {
  if (mass > 0.0 && !x.cemetery) atoms.push_back({x, mass});
}

void ParticleMeasure::append(const ParticleMeasure& other) {
  atoms.insert(atoms.end(), other.atoms.begin(), other.atoms.end());
}

void TrajectoryRecord::push(double t, ParticleMeasure state) {
  if (!times.empty() && !(t > times.back())) {
    throw std::invalid_argument("TrajectoryRecord: times must increase");
  }
  if (std::isfinite(extinction_time) && !state.empty()) {
    throw std::logic_error("TrajectoryRecord: mass reappeared after extinction at t=" +
                           std::to_string(extinction_time));
  }
  if (state.empty() && !std::isfinite(extinction_time)) extinction_time = t;
  times.push_back(t);
  states.push_back(std::move(state));
}

std::size_t TrajectoryRecord::index_of(double t) const {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace superspine
