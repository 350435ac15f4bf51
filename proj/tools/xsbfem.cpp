#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "xsb/bench.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_summary(const xsb::BenchmarkConfig& cfg, const xsb::BenchmarkReport& report) {
  fmt::print("problem: {} ({} runs)\n", cfg.problem, report.rows.size());
  for (const xsb::BenchmarkRow& r : report.rows) {
    std::string line = fmt::format("  {:>3}x{:<3} layers={} tip={}", r.nx, r.ny, r.n_layers, r.tip);
    if (!std::isnan(r.param)) line += fmt::format(" param={:g}", r.param);
    if (!std::isnan(r.k1_stress))
      line += fmt::format("  K1={:.6g} K2={:.6g} (stress)", r.k1_stress, r.k2_stress);
    if (!std::isnan(r.k1_disp))
      line += fmt::format("  K1={:.6g} K2={:.6g} (displacement)", r.k1_disp, r.k2_disp);
    if (!std::isnan(r.err_k1_stress)) line += fmt::format("  relerr_K1={:.3e}", r.err_k1_stress);
    else if (!std::isnan(r.err_k1_disp)) line += fmt::format("  relerr_K1={:.3e}", r.err_k1_disp);
    if (!std::isnan(r.kappa_scaled)) line += fmt::format("  cond={:.3e}", r.kappa_scaled);
    fmt::print("{}\n", line);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xsbfem: XFEM + scaled-boundary crack benchmarks"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "run a benchmark sweep and write CSV/JSON reports");
  std::string config_path;
  std::string problem;
  std::vector<int> mesh;
  int layers = 0;
  std::string sif_method;
  std::string out;
  bool emit_modes = false;
  bool dump_mesh = false;

  run->add_option("config", config_path, "JSON config file (omit to use --problem defaults)");
  run->add_option("--problem", problem,
                  "problem name: griffith | edge_tension | edge_shear | ortho_center | ortho_edge");
  run->add_option("--mesh", mesh, "override the mesh sweep with a single NX NY pair")
      ->expected(2);
  run->add_option("--layers", layers, "override the layer sweep with a single ring count");
  run->add_option("--sif-method", sif_method, "displacement | stress | all")
      ->check(CLI::IsMember({"displacement", "stress", "all"}));
  run->add_option("--out", out, "output path stem (writes <out>.csv and <out>.json)");
  run->add_flag("--emit-modes", emit_modes, "include subdomain exponents in the JSON report");
  run->add_flag("--dump-mesh", dump_mesh, "include mesh/region dumps in the JSON report");

  CLI11_PARSE(app, argc, argv);

  try {
    xsb::BenchmarkConfig cfg;
    if (!config_path.empty() && !problem.empty())
      throw std::invalid_argument("pass either a config file or --problem, not both");
    if (!config_path.empty())
      cfg = xsb::parse_config(read_file(config_path));
    else if (!problem.empty())
      cfg = xsb::default_config(problem);
    else
      throw std::invalid_argument("either a config file or --problem is required");

    if (!mesh.empty()) cfg.meshes = {{mesh[0], mesh[1]}};
    if (layers > 0) cfg.layer_sweep = {layers};
    if (sif_method == "displacement") cfg.sif_methods = {"displacement"};
    else if (sif_method == "stress") cfg.sif_methods = {"stress"};
    else if (sif_method == "all") cfg.sif_methods = {"displacement", "stress"};
    if (!out.empty()) cfg.out = out;
    if (emit_modes) cfg.emit_modes = true;
    if (dump_mesh) cfg.dump_mesh = true;

    xsb::validate_config(cfg);
    const xsb::BenchmarkReport report = xsb::run_benchmark(cfg);
    print_summary(cfg, report);
    const auto paths = xsb::write_report(cfg, report);
    fmt::print("wrote {} and {}\n", paths[0], paths[1]);
    return 0;
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()}};
    fmt::print("{}\n", err.dump());
    return 1;
  }
}
