#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "xsb/pipeline.hpp"

namespace xsb {

// Optional material override for the isotropic benchmark problems.
struct MaterialSpec {
  bool present = false;
  double E = 0.0;
  double nu = 0.0;
  std::string plane = "strain";
};

struct BenchmarkConfig {
  std::string problem;  // griffith | edge_tension | edge_shear | ortho_center | ortho_edge
  std::vector<std::array<int, 2>> meshes;
  std::vector<int> layer_sweep;
  std::vector<double> param_sweep;  // stiffness ratio (ortho_center) or fiber angle (ortho_edge)
  double width = 0.0;               // 0 keeps the problem default
  double height = 0.0;
  double crack_length = 0.0;
  double crack_ratio = 0.0;  // edge_tension: crack length / plate width
  double load = 0.0;
  MaterialSpec material;
  std::vector<std::string> sif_methods;  // subset of {displacement, stress}
  bool conditioning = true;
  bool emit_modes = false;
  bool dump_mesh = false;
  std::string out = "xsbfem_out";
};

BenchmarkConfig default_config(const std::string& problem);
BenchmarkConfig parse_config(const std::string& json_text);
void validate_config(const BenchmarkConfig& cfg);

// A fully assembled benchmark instance: discretization, loads, and the
// reference intensity factors (NaN when no reference value exists).
struct BenchmarkProblem {
  CoupledProblem prob;
  LoadSpec loads;
  double k1_ref = 0.0;
  double k2_ref = 0.0;
  double crack_length = 0.0;
  double load = 0.0;
};

BenchmarkProblem make_griffith(int n, int n_layers);
BenchmarkProblem make_edge_tension(int nx, int ny, int n_layers, double ratio = 0.5);
BenchmarkProblem make_edge_shear(int nx, int ny, int n_layers, double width = 7.0,
                                 double height = 16.0, double a = 3.5);
BenchmarkProblem make_ortho_center(int nx, int ny, int n_layers, double phi);
BenchmarkProblem make_ortho_edge(int nx, int ny, int n_layers, double fiber_angle_deg);

// Near-tip opening-mode displacement field (plane strain) used as the exact
// Dirichlet data of the Griffith run.
Eigen::Vector2d griffith_displacement(const Eigen::Vector2d& p, const Eigen::Vector2d& tip,
                                      double k1, double E, double nu);

// Width-correction polynomial of the edge-crack tension reference.
double edge_tension_correction(double ratio);

struct BenchmarkRow {
  std::string problem;
  int nx = 0, ny = 0, n_layers = 0, tip = 0;
  double param = 0.0;  // sweep parameter (NaN when the problem has none)
  double h = 0.0;      // coarsest element dimension
  int n_dofs = 0;      // active dofs
  double k1_disp = 0.0, k2_disp = 0.0;
  double k1_stress = 0.0, k2_stress = 0.0;
  double k1_ref = 0.0, k2_ref = 0.0;
  double err_k1_disp = 0.0, err_k2_disp = 0.0;
  double err_k1_stress = 0.0, err_k2_stress = 0.0;
  double rate_k1 = 0.0, rate_k2 = 0.0;  // stress-route convergence slopes
  double kappa_scaled = 0.0, kappa_unscaled = 0.0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  // Per-row diagnostics that would break CSV determinism (wall time) or are
  // too bulky for a table (mode exponents); emitted in the JSON report.
  std::vector<nlohmann::json> row_details;
};

BenchmarkReport run_benchmark(const BenchmarkConfig& cfg);

std::string rows_to_csv(const std::vector<BenchmarkRow>& rows);
std::vector<BenchmarkRow> parse_csv(const std::string& text);
bool rows_equal(const std::vector<BenchmarkRow>& a, const std::vector<BenchmarkRow>& b);

nlohmann::json report_to_json(const BenchmarkConfig& cfg, const BenchmarkReport& report);

// Writes <out>.csv and <out>.json; returns the two paths.
std::array<std::string, 2> write_report(const BenchmarkConfig& cfg, const BenchmarkReport& report);

}  // namespace xsb
