#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "superspine/measure.hpp"
#include "superspine/spine.hpp"
#include "superspine/verify.hpp"
#include "superspine/williams.hpp"

namespace superspine {

//! Shortest round-trip decimal form ("%.17g"); identical across runs.
std::string format_number(double x);

// Trajectory CSV: replica_id,t,x_1..x_d,mass with one row per atom.
// An empty measure is written as one row with blank coordinates and mass 0,
// so extinction stays visible in the file.
void write_trajectory_header(std::ostream& os, int dim);
void write_trajectory_rows(std::ostream& os, std::size_t replica, const TrajectoryRecord& traj, int dim);
//! Spine locations in the trajectory schema with mass 1.
void write_spine_rows(std::ostream& os, std::size_t replica, const SpinePath& spine, int dim);

// Events CSV: replica_id,kind,s,x,y_or_eps,clone_extinction_time.
// Multi-dimensional sources are joined with ';'; an infinite clone
// extinction time is written as "inf".
void write_events_header(std::ostream& os);
void write_events_rows(std::ostream& os, std::size_t replica, const std::vector<ImmigrationEvent>& events,
                       int dim);

//! Header plus rows of a simple comma-separated file.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  //! Column index by name; throws std::out_of_range when absent.
  std::size_t column(const std::string& name) const;
};
CsvTable read_csv(std::istream& is);
CsvTable read_csv(const std::filesystem::path& path);

//! Human-readable table, one line per report.
std::string summary_table(const std::vector<VerificationReport>& reports);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

//! Step plots of the empirical CDFs of each sample.
std::string ecdf_svg(const std::string& title, const std::vector<std::pair<std::string, std::vector<double>>>& samples);
//! Polyline plot (used for dispersion curves).
std::string line_svg(const std::string& title, const std::string& x_label, const std::vector<PlotSeries>& series);

//! Library and compiler versions recorded in run manifests.
nlohmann::json version_info();

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace superspine
