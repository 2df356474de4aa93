// End-to-end acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "superspine/config.hpp"
#include "superspine/experiment.hpp"
#include "superspine/extinction.hpp"
#include "superspine/io.hpp"
#include "superspine/spine.hpp"
#include "superspine/transition.hpp"
#include "superspine/verify.hpp"

using namespace superspine;
namespace fs = std::filesystem;

namespace {

std::string config_path(const std::string& name) {
  return std::string(SUPERSPINE_CONFIG_DIR) + "/" + name + ".yaml";
}

Model model_for(const std::string& name) { return build_model(load_config(config_path(name))); }

VerificationReport run(const std::string& id, const std::string& config) {
  auto model = model_for(config);
  auto r = run_test(id, model, model.config.seed, VerifyOptions{});
  std::printf("  %-14s %-22s %s stat=%.6g threshold=%.6g p=%.4g\n", id.c_str(), config.c_str(),
              r.infeasible ? "INFEAS" : (r.pass ? "pass" : "fail"), r.statistic, r.threshold,
              r.p_value);
  std::fflush(stdout);
  return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Closed-form v and w for psi = z^2 and psi = z^1.5.
bool closed_forms() {
  auto t0 = std::chrono::steady_clock::now();
  LocalMechanism quad;
  quad.b = 1.0;
  LocalMechanism stable;
  stable.stable_c = 1.0;  // psi(z) = z^1.5
  stable.stable_index = 1.5;
  double v_q = solve_v_homogeneous(quad, 1.0), w_q = solve_w_homogeneous(quad, 1.0);
  double v_s = solve_v_homogeneous(stable, 1.0), w_s = solve_w_homogeneous(stable, 1.0);
  double elapsed = seconds_since(t0);
  std::printf("  v(1)=%.12g w(1)=%.12g | stable v(1)=%.12g w(1)=%.12g | %.3f s\n", v_q, w_q, v_s, w_s,
              elapsed);
  return std::abs(v_q - 1.0) <= 1e-8 && std::abs(w_q - 1.0) <= 1e-8 && std::abs(v_s - 4.0) <= 1e-6 &&
         std::abs(w_s - 8.0) <= 1e-6 && elapsed < 1.0;
}

bool csbp_law() {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(derive_seed(20240601, {2}));
  const int n = 100000;
  int zero = 0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double m = sample_csbp_exact(1.0, 1.0, 1.0, rng);
    zero += m == 0.0;
    sum += m;
  }
  double elapsed = seconds_since(t0);
  double p0 = std::exp(-1.0), freq = zero / double(n), mean = sum / n;
  double z_p = std::abs(freq - p0) / std::sqrt(p0 * (1 - p0) / n);
  double z_m = std::abs(mean - 1.0) / std::sqrt(2.0 / n);
  std::printf("  P(X=0)=%.5f (z=%.2f) mean=%.5f (z=%.2f) %.2f s\n", freq, z_p, mean, z_m, elapsed);
  return z_p <= 4.0 && z_m <= 4.0 && elapsed < 10.0;
}

bool martingales() {
  auto hom = run("martingale", "quadratic_homogeneous");
  auto spatial = run("martingale", "quadratic_spatial");
  // Homogeneous Y is exactly one along any path.
  auto mech = BranchingMechanism::quadratic(1.0);
  auto profile = ExtinctionProfile::homogeneous(mech);
  std::vector<double> times{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<Point> path;
  for (std::size_t k = 0; k < times.size(); ++k) path.push_back(Point::at(std::sin(double(k))));
  bool exact = spine_weight_Y(profile, mech, times, path, 1.0) == 1.0;
  std::printf("  homogeneous Y == 1: %s\n", exact ? "yes" : "no");
  return hom.pass && spatial.pass && exact;
}

// Rerun from the manifest reproduces every output byte, for each subcommand,
// and the worker count does not change results.
bool determinism() {
  fs::path root = fs::temp_directory_path() / "superspine_acceptance";
  fs::remove_all(root);
  auto dir = [&](const std::string& leaf) { return (root / leaf).string(); };
  auto same_dir = [](const fs::path& a, const fs::path& b) {
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      auto other = b / e.path().filename();
      if (!fs::exists(other) || read_text(e.path()) != read_text(other)) return false;
      ++files;
    }
    return files > 0 && files == static_cast<std::size_t>(std::distance(fs::directory_iterator(b),
                                                                        fs::directory_iterator{}));
  };
  std::string hom = config_path("quadratic_homogeneous");
  std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
      {"solve", {"solve", config_path("quadratic_spatial")}},
      {"forward", {"sample", hom, "--replicas", "50"}},
      {"conditioned", {"sample", hom, "--kind", "conditioned", "--replicas", "5"}},
      {"williams", {"sample", hom, "--kind", "williams", "--replicas", "20"}},
      {"stable", {"sample", config_path("stable_homogeneous"), "--kind", "williams", "--replicas", "2"}},
      {"verify", {"verify", hom, "--tests", "closed_form,martingale"}},
  };
  bool ok = true;
  for (auto& [name, args] : runs) {
    auto first = args, second = args;
    first.insert(first.end(), {"--out", dir(name + "_w1"), "--workers", "1"});
    second.insert(second.end(), {"--out", dir(name + "_w2"), "--workers", "2"});
    int s1 = cli::run(first), s2 = cli::run(second);
    int s3 = cli::run({"rerun", dir(name + "_w1") + "/manifest.json", "--out", dir(name + "_re")});
    bool same_workers = same_dir(root / (name + "_w1"), root / (name + "_w2"));
    bool same_rerun = same_dir(root / (name + "_w1"), root / (name + "_re"));
    std::printf("  %-12s status %d/%d/%d workers-identical=%d rerun-identical=%d\n", name.c_str(), s1, s2,
                s3, same_workers, same_rerun);
    ok = ok && s1 == cli::kPass && s2 == s1 && s3 == s1 && same_workers && same_rerun;
  }
  int p1 = cli::run({"plot", "--input", dir("forward_w1"), "--out", dir("plot")});
  int p2 = cli::run({"rerun", dir("plot") + "/manifest.json", "--out", dir("plot_re")});
  bool plot_same = same_dir(root / "plot", root / "plot_re");
  std::printf("  plot         status %d/%d rerun-identical=%d\n", p1, p2, plot_same);
  fs::remove_all(root);
  return ok && p1 == cli::kPass && p2 == cli::kPass && plot_same;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* what;
    std::function<bool()> check;
  };
  std::vector<Criterion> criteria = {
      {1, "closed-form extinction functionals", closed_forms},
      {2, "exact CSBP transition law", csbp_law},
      {3, "martingale means", martingales},
      {4, "Williams sampler vs conditioned-direct sampler",
       [] { return run("williams_law", "quadratic_homogeneous").pass; }},
      {5, "extinction-time mixture of Williams samples",
       [] { return run("mixture", "quadratic_homogeneous").pass; }},
      {6, "Feynman-Kac cross-check",
       [] {
         bool a = run("feynman_kac", "quadratic_homogeneous").pass;
         bool b = run("feynman_kac", "quadratic_spatial").pass;
         return a && b;
       }},
      {7, "flow and semigroup identities on every shipped config",
       [] {
         bool ok = true;
         for (const char* c : {"quadratic_homogeneous", "stable_homogeneous", "quadratic_spatial",
                               "mixed_diffusion", "subordinate"})
           ok = run("flow", c).pass && ok;
         return ok;
       }},
      {8, "concentration before extinction",
       [] {
         bool spatial = run("concentration", "quadratic_spatial").pass;
         bool hom = run("concentration", "quadratic_homogeneous").pass;
         return spatial && hom;
       }},
      {9, "determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    std::printf("AC%d %s\n", c.id, c.what);
    std::fflush(stdout);
    bool pass = false;
    try {
      pass = c.check();
    } catch (const std::exception& e) {
      std::printf("  error: %s\n", e.what());
    }
    std::printf("AC%d %s (%.1f s)\n", c.id, pass ? "PASS" : "FAIL", seconds_since(t0));
    std::fflush(stdout);
    failed += !pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
