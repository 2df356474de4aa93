#include <gtest/gtest.h>

#include <cmath>

#include "superspine/config.hpp"
#include "superspine/experiment.hpp"
#include "superspine/verify.hpp"

using namespace superspine;

namespace {

Model quadratic_model() {
  return build_model(load_config(std::string(SUPERSPINE_CONFIG_DIR) + "/quadratic_homogeneous.yaml"));
}

}  // namespace

TEST(Verify, JWithoutObservationsIsV) {
  auto model = quadratic_model();
  EXPECT_DOUBLE_EQ(compute_J(model, 0.2, 1.0, {}, Point{}), 1.0 / 0.8);
}

// psi(z) = z^2 with a constant observation c at t1: the reaction flow
// z0 / (1 + z0 tau) from z0 = v(h - t1) + c.
TEST(Verify, JWithConstantObservation) {
  auto model = quadratic_model();
  const double h = 1.0, t1 = 0.5, s = 0.1, c = 0.7;
  double z0 = 1.0 / (h - t1) + c;
  double oracle = z0 / (1.0 + z0 * (t1 - s));
  double j = compute_J(model, s, h, {{t1, ScalarField::constant(c)}}, Point{});
  EXPECT_NEAR(j, oracle, 1e-6 * oracle);
  // Observations at or before s are ignored.
  EXPECT_DOUBLE_EQ(compute_J(model, 0.6, h, {{t1, ScalarField::constant(c)}}, Point{}), 1.0 / 0.4);
}

TEST(Verify, JIncreasesWithObservationWeight) {
  auto model = quadratic_model();
  double prev = compute_J(model, 0.0, 1.0, {}, Point{});
  for (double c : {0.1, 0.5, 2.0}) {
    double j = compute_J(model, 0.0, 1.0, {{0.5, ScalarField::constant(c)}}, Point{});
    EXPECT_GT(j, prev);
    prev = j;
  }
  EXPECT_THROW(compute_J(model, 0.0, 1.0, {{0.5025, ScalarField::constant(1.0)}}, Point{}), std::exception);
}

TEST(Verify, MassAtTime) {
  TrajectoryRecord rec;
  rec.push(0.0, ParticleMeasure::dirac(Point{}, 2.0));
  rec.push(0.5, ParticleMeasure::dirac(Point{}, 3.0));
  rec.push(1.0, ParticleMeasure{});
  EXPECT_DOUBLE_EQ(mass_at_time(rec, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(mass_at_time(rec, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(mass_at_time(rec, 4.0), 0.0);
  EXPECT_THROW(mass_at_time(rec, 0.25), std::out_of_range);
}

TEST(Verify, NearExtinctionStatistic) {
  TrajectoryRecord rec;
  ParticleMeasure two;
  two.add(Point::at(-1.0), 1.0);
  two.add(Point::at(1.0), 1.0);
  rec.push(0.0, two);
  rec.push(0.1, ParticleMeasure::dirac(Point::at(3.0), 0.5));
  rec.push(0.2, ParticleMeasure{});
  auto st = near_extinction_statistic(rec, 1);
  ASSERT_TRUE(st.valid);
  ASSERT_EQ(st.dispersion.size(), 2u);
  EXPECT_DOUBLE_EQ(st.dispersion[0], 1.0);
  EXPECT_DOUBLE_EQ(st.dispersion[1], 0.0);
  EXPECT_DOUBLE_EQ(st.z[0], 3.0);
}

TEST(Verify, ClosedFormPasses) {
  auto r = verify_closed_form(quadratic_model());
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.statistic, 1e-6);
  auto j = to_json(r);
  EXPECT_TRUE(j["p_value"].is_null());
  EXPECT_EQ(j["test_id"], "closed_form");
}
