#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "superspine/io.hpp"

using namespace superspine;

TEST(Io, NumberFormatRoundTrips) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(kNeverExtinct), "inf");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Io, TrajectoryCsvKeepsExtinction) {
  TrajectoryRecord rec;
  ParticleMeasure m;
  m.add(Point::at(0.5, -1.0), 2.0);
  m.add(Point::at(1.5, 0.0), 0.25);
  rec.push(0.0, m);
  rec.push(0.1, ParticleMeasure{});
  std::stringstream ss;
  write_trajectory_header(ss, 2);
  write_trajectory_rows(ss, 4, rec, 2);
  auto t = read_csv(ss);
  ASSERT_EQ(t.header, (std::vector<std::string>{"replica_id", "t", "x_1", "x_2", "mass"}));
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[0][t.column("replica_id")], "4");
  EXPECT_EQ(t.rows[1][t.column("mass")], "0.25");
  EXPECT_EQ(t.rows[2][t.column("t")], "0.10000000000000001");
  EXPECT_EQ(t.rows[2][t.column("x_1")], "");
  EXPECT_EQ(t.rows[2][t.column("mass")], "0");
  EXPECT_THROW(t.column("nope"), std::out_of_range);
}

TEST(Io, EventsCsv) {
  ImmigrationEvent ev;
  ev.kind = ImmigrationKind::jump;
  ev.birth = 0.25;
  ev.source = Point::at(1.0, 2.0);
  ev.mass = 0.5;
  ev.clone.push(0.0, ParticleMeasure::dirac(ev.source, 0.5));
  std::stringstream ss;
  write_events_header(ss);
  write_events_rows(ss, 0, {ev}, 2);
  auto t = read_csv(ss);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][t.column("kind")], "jump");
  EXPECT_EQ(t.rows[0][t.column("x")], "1;2");
  EXPECT_EQ(t.rows[0][t.column("y_or_eps")], "0.5");
  EXPECT_EQ(t.rows[0][t.column("clone_extinction_time")], "inf");
}

TEST(Io, SummaryAndSvg) {
  VerificationReport a, b;
  a.test_id = "closed_form";
  a.pass = true;
  b.test_id = "mixture";
  b.infeasible = true;
  auto s = summary_table({a, b});
  EXPECT_NE(s.find("PASS"), std::string::npos);
  EXPECT_NE(s.find("INFEAS"), std::string::npos);
  auto svg = ecdf_svg("t", {{"a", {1, 2, 3}}});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  auto v = version_info();
  EXPECT_TRUE(v.contains("superspine"));
  EXPECT_EQ(v["csv_schema"], 1);
}
