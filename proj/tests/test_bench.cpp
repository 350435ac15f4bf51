#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "xsb/bench.hpp"

using xsb::BenchmarkConfig;
using xsb::BenchmarkReport;
using xsb::BenchmarkRow;
using xsb::default_config;
using xsb::edge_tension_correction;
using xsb::parse_config;
using xsb::validate_config;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

TEST_CASE("default configurations cover the five benchmark problems") {
  const auto griffith = default_config("griffith");
  CHECK(griffith.meshes == std::vector<std::array<int, 2>>{{10, 10}, {20, 20}, {40, 40}});
  CHECK(griffith.layer_sweep == std::vector<int>{3});
  CHECK(griffith.sif_methods == std::vector<std::string>{"displacement", "stress"});
  CHECK(griffith.conditioning);

  const auto tension = default_config("edge_tension");
  CHECK(tension.meshes.size() == 4);
  CHECK(tension.crack_ratio == 0.5);
  CHECK(tension.layer_sweep == std::vector<int>{5});

  const auto shear = default_config("edge_shear");
  CHECK(shear.meshes.size() == 5);
  CHECK(shear.meshes.front() == std::array<int, 2>{20, 40});
  CHECK(shear.meshes.back() == std::array<int, 2>{60, 120});

  const auto center = default_config("ortho_center");
  CHECK(center.param_sweep == std::vector<double>{0.5, 1.0, 2.0, 3.0, 4.0});
  CHECK(center.sif_methods == std::vector<std::string>{"stress"});

  const auto edge = default_config("ortho_edge");
  CHECK(edge.param_sweep.size() == 7);
  CHECK(edge.param_sweep.front() == 0.0);
  CHECK(edge.param_sweep.back() == 180.0);

  CHECK_THROWS_WITH_AS(default_config("bogus"), doctest::Contains("unknown benchmark problem"),
                       std::invalid_argument);
}

TEST_CASE("configuration validation rejects inconsistent requests") {
  auto cfg = default_config("griffith");
  CHECK_NOTHROW(validate_config(cfg));

  SUBCASE("empty sweeps") {
    cfg.meshes.clear();
    CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("mesh sweep"),
                         std::invalid_argument);
  }
  SUBCASE("bad mesh dims") {
    cfg.meshes = {{0, 10}};
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  }
  SUBCASE("bad layer count") {
    cfg.layer_sweep = {0};
    CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("n_layers"),
                         std::invalid_argument);
  }
  SUBCASE("no method") {
    cfg.sif_methods.clear();
    CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("no SIF method"),
                         std::invalid_argument);
  }
  SUBCASE("unknown method") {
    cfg.sif_methods = {"psychic"};
    CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("unknown SIF method"),
                         std::invalid_argument);
  }
  SUBCASE("tension ratio outside the correction's range") {
    auto t = default_config("edge_tension");
    t.crack_ratio = 0.65;
    CHECK_THROWS_WITH_AS(validate_config(t), doctest::Contains("calibrated range"),
                         std::invalid_argument);
  }
  SUBCASE("displacement route on an anisotropic problem") {
    auto c = default_config("ortho_center");
    c.sif_methods = {"displacement"};
    CHECK_THROWS_WITH_AS(validate_config(c), doctest::Contains("isotropic"),
                         std::invalid_argument);
  }
  SUBCASE("material override on an anisotropic problem") {
    auto c = default_config("ortho_edge");
    c.material.present = true;
    c.material.E = 1e7;
    c.material.nu = 0.3;
    CHECK_THROWS_WITH_AS(validate_config(c), doctest::Contains("isotropic problems only"),
                         std::invalid_argument);
  }
  SUBCASE("nonpositive override modulus") {
    cfg.material.present = true;
    cfg.material.E = 0.0;
    CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("E must be positive"),
                         std::invalid_argument);
  }
}

TEST_CASE("JSON configuration parsing") {
  const std::string text = R"({
    "problem": "edge_shear",
    "meshes": [[20, 40], [30, 60]],
    "layer_sweep": [2, 5],
    "width": 14.0,
    "height": 32.0,
    "crack_length": 7.0,
    "load": 2.5,
    "sif_methods": "all",
    "conditioning": false,
    "emit_modes": true,
    "out": "shear_run"
  })";
  const auto cfg = parse_config(text);
  CHECK(cfg.problem == "edge_shear");
  CHECK(cfg.meshes == std::vector<std::array<int, 2>>{{20, 40}, {30, 60}});
  CHECK(cfg.layer_sweep == std::vector<int>{2, 5});
  CHECK(cfg.width == 14.0);
  CHECK(cfg.height == 32.0);
  CHECK(cfg.crack_length == 7.0);
  CHECK(cfg.load == 2.5);
  CHECK(cfg.sif_methods == std::vector<std::string>{"displacement", "stress"});
  CHECK_FALSE(cfg.conditioning);
  CHECK(cfg.emit_modes);
  CHECK(cfg.out == "shear_run");

  const auto single = parse_config(R"({"problem": "griffith", "layers": 4,
                                       "sif_methods": "stress"})");
  CHECK(single.layer_sweep == std::vector<int>{4});
  CHECK(single.sif_methods == std::vector<std::string>{"stress"});

  const auto with_mat = parse_config(R"({"problem": "edge_tension",
                                         "material": {"E": 2e7, "nu": 0.25, "plane": "stress"}})");
  CHECK(with_mat.material.present);
  CHECK(with_mat.material.E == 2e7);
  CHECK(with_mat.material.plane == "stress");

  CHECK_THROWS_WITH_AS(parse_config("not json"), doctest::Contains("invalid JSON"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(R"({"meshes": [[10, 10]]})"),
                       doctest::Contains("missing 'problem'"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"problem": "ortho_center", "sif_methods": "all"})"),
                  std::invalid_argument);
}

TEST_CASE("width-correction polynomial of the edge-crack reference") {
  CHECK(edge_tension_correction(0.0) == doctest::Approx(1.12).epsilon(1e-15));
  // 1.12 - 0.231/2 + 10.55/4 - 21.72/8 + 30.39/16
  CHECK(edge_tension_correction(0.5) == doctest::Approx(2.826375).epsilon(1e-14));
}

TEST_CASE("benchmark problem factories fix the reference solutions") {
  const auto griffith = xsb::make_griffith(10, 3);
  CHECK(griffith.k1_ref == doctest::Approx(1e4 * std::sqrt(kPi * 100.0)).epsilon(1e-15));
  CHECK(griffith.k2_ref == 0.0);
  CHECK(griffith.crack_length == 100.0);
  CHECK(griffith.prob.mesh.nx == 10);
  CHECK(griffith.prob.mesh.width == 10.0);
  // Dirichlet data on every outer-boundary node, both components.
  CHECK(griffith.loads.dirichlet.size() == 2 * 4 * 10);
  CHECK(griffith.loads.tractions.empty());

  const auto tension = xsb::make_edge_tension(11, 23, 5);
  CHECK(tension.k1_ref ==
        doctest::Approx(edge_tension_correction(0.5) * std::sqrt(kPi * 0.5)).epsilon(1e-14));
  CHECK(tension.loads.tractions.size() == 2);
  CHECK(tension.loads.dirichlet.size() == 3);
  CHECK_THROWS_WITH_AS(xsb::make_edge_tension(11, 23, 5, 0.65),
                       doctest::Contains("calibrated range"), std::invalid_argument);

  const auto shear = xsb::make_edge_shear(20, 40, 5);
  CHECK(shear.k1_ref == 34.0);
  CHECK(shear.k2_ref == 4.55);
  CHECK(shear.prob.mesh.height == 16.0);
  CHECK(shear.loads.dirichlet.size() == 2 * 21);  // clamped bottom edge

  const auto center = xsb::make_ortho_center(61, 61, 3, 2.0);
  CHECK(center.prob.two_tip);
  CHECK(std::isnan(center.k1_ref));
  CHECK_FALSE(center.prob.mat.is_isotropic);

  const auto edge = xsb::make_ortho_edge(60, 120, 3, 30.0);
  CHECK(std::isnan(edge.k1_ref));
  CHECK(edge.loads.dirichlet.size() == 121 + 1);  // sliding symmetry plane + one pin
}

TEST_CASE("near-tip displacement field matches the plane-strain crack profile") {
  const double E = 1e7, nu = 0.3, k1 = 5e4;
  const double G = E / (2.0 * (1.0 + nu));
  const double kappa = 3.0 - 4.0 * nu;
  const Eigen::Vector2d tip(2.0, 1.0);

  // On the upper crack face (theta -> pi): u_y = (k1 / 2G) sqrt(r / 2pi) (kappa + 1).
  const double r = 0.37;
  const Eigen::Vector2d up = xsb::griffith_displacement(tip + Eigen::Vector2d(-r, 1e-12 * r),
                                                        tip, k1, E, nu);
  const double face = k1 / (2.0 * G) * std::sqrt(r / (2.0 * kPi)) * (kappa + 1.0);
  CHECK(up.y() == doctest::Approx(face).epsilon(1e-5));
  CHECK(std::abs(up.x()) <= 1e-5 * face);

  // Lower face: mirror image.
  const Eigen::Vector2d dn = xsb::griffith_displacement(tip + Eigen::Vector2d(-r, -1e-12 * r),
                                                        tip, k1, E, nu);
  CHECK(dn.y() == doctest::Approx(-face).epsilon(1e-5));

  // Ahead of the tip (theta = 0): u_x = (k1 / 2G) sqrt(r / 2pi) (kappa - 1), u_y = 0.
  const Eigen::Vector2d ahead = xsb::griffith_displacement(tip + Eigen::Vector2d(r, 0.0),
                                                           tip, k1, E, nu);
  const double ux = k1 / (2.0 * G) * std::sqrt(r / (2.0 * kPi)) * (kappa - 1.0);
  CHECK(ahead.x() == doctest::Approx(ux).epsilon(1e-12));
  CHECK(ahead.y() == doctest::Approx(0.0).epsilon(1e-12));

  // The field scales like sqrt(r).
  const Eigen::Vector2d far = xsb::griffith_displacement(tip + Eigen::Vector2d(4.0 * r, 0.0),
                                                         tip, k1, E, nu);
  CHECK(far.x() == doctest::Approx(2.0 * ahead.x()).epsilon(1e-12));
}

TEST_CASE("CSV serialization round-trips exactly, including NaN columns") {
  BenchmarkRow a;
  a.problem = "edge_shear";
  a.nx = 20;
  a.ny = 40;
  a.n_layers = 5;
  a.tip = 0;
  a.param = kNaN;
  a.h = 0.4;
  a.n_dofs = 1234;
  a.k1_disp = 33.871234567890123;
  a.k2_disp = 4.5312;
  a.k1_stress = 33.99;
  a.k2_stress = 4.52;
  a.k1_ref = 34.0;
  a.k2_ref = 4.55;
  a.err_k1_disp = 0.0038;
  a.err_k2_disp = 0.0041;
  a.err_k1_stress = 0.00029;
  a.err_k2_stress = 0.0066;
  a.rate_k1 = 1.1;
  a.rate_k2 = kNaN;
  a.kappa_scaled = 9.5e3;
  a.kappa_unscaled = 7.7e6;

  BenchmarkRow b;
  b.problem = "ortho_edge";
  b.param = 30.0;
  b.h = 1.0 / 60.0;
  b.k1_ref = kNaN;
  b.k2_ref = kNaN;
  b.err_k1_stress = kNaN;

  const std::vector<BenchmarkRow> rows = {a, b};
  const std::string csv = xsb::rows_to_csv(rows);
  const auto parsed = xsb::parse_csv(csv);
  REQUIRE(parsed.size() == 2);
  CHECK(xsb::rows_equal(rows, parsed));
  CHECK(xsb::rows_to_csv(parsed) == csv);  // stable bytes after one round trip

  CHECK_FALSE(xsb::rows_equal(rows, {a}));
  auto mutated = parsed;
  mutated[1].k1_stress += 1e-12;
  CHECK_FALSE(xsb::rows_equal(rows, mutated));

  CHECK_THROWS_WITH_AS(xsb::parse_csv("k1,k2\n"), doctest::Contains("unexpected header"),
                       std::invalid_argument);
  const std::string truncated = csv.substr(0, csv.find('\n') + 1) + "edge_shear,20,40\n";
  CHECK_THROWS_WITH_AS(xsb::parse_csv(truncated), doctest::Contains("malformed row"),
                       std::invalid_argument);
}

TEST_CASE("small benchmark run is deterministic and convergent") {
  auto cfg = default_config("griffith");
  cfg.meshes = {{10, 10}, {20, 20}};
  cfg.layer_sweep = {2};

  const BenchmarkReport first = xsb::run_benchmark(cfg);
  const BenchmarkReport second = xsb::run_benchmark(cfg);
  REQUIRE(first.rows.size() == 2);
  CHECK(xsb::rows_equal(first.rows, second.rows));
  CHECK(xsb::rows_to_csv(first.rows) == xsb::rows_to_csv(second.rows));

  const auto& coarse = first.rows[0];
  const auto& fine = first.rows[1];
  CHECK(coarse.problem == "griffith");
  CHECK(coarse.h == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fine.h == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::isnan(coarse.param));
  CHECK(coarse.n_dofs > 0);
  CHECK(fine.n_dofs > coarse.n_dofs);

  // The imposed near-tip field is recovered within a few percent and the
  // error shrinks under refinement.
  for (const auto* r : {&coarse, &fine}) {
    CHECK(std::isfinite(r->err_k1_disp));
    CHECK(std::isfinite(r->err_k1_stress));
    CHECK(r->err_k1_disp < 0.1);
    CHECK(r->err_k1_stress < 0.1);
    CHECK(r->kappa_scaled >= 1.0);
    CHECK(r->kappa_unscaled >= r->kappa_scaled * 0.999);
  }
  CHECK(fine.err_k1_stress < coarse.err_k1_stress);

  // Two meshes in one sweep group: a finite common convergence rate.
  CHECK(std::isfinite(coarse.rate_k1));
  CHECK(coarse.rate_k1 == fine.rate_k1);
  CHECK(coarse.rate_k1 > 0.0);
  // k2_ref is exactly zero, so the mode-II error column stays undefined.
  CHECK(std::isnan(coarse.err_k2_disp));
  CHECK(std::isnan(coarse.rate_k2));

  // Row-level diagnostics accompany every row.
  REQUIRE(first.row_details.size() == 2);
  CHECK(first.row_details[0].contains("wall_seconds"));
  CHECK(first.row_details[0].contains("solve_residual"));
}

TEST_CASE("JSON report carries the configuration and quadrature description") {
  auto cfg = default_config("griffith");
  cfg.meshes = {{10, 10}};
  cfg.layer_sweep = {2};
  const BenchmarkReport report = xsb::run_benchmark(cfg);
  const nlohmann::json j = xsb::report_to_json(cfg, report);

  CHECK(j.at("config").at("problem") == "griffith");
  CHECK(j.at("config").at("layer_sweep") == std::vector<int>{2});
  CHECK(j.at("quadrature").contains("standard_element"));
  CHECK(j.at("quadrature").contains("split_element"));
  const std::string note = j.at("notes").at("crack_half_length").get<std::string>();
  CHECK(note.find("virtual half-length") != std::string::npos);
  REQUIRE(j.at("rows").size() == 1);
  CHECK(j.at("rows")[0].at("n_dofs").get<int>() == report.rows[0].n_dofs);
  CHECK(j.at("rows")[0].contains("diagnostics"));
}

TEST_CASE("report writer emits the CSV and JSON files") {
  namespace fs = std::filesystem;
  auto cfg = default_config("griffith");
  cfg.meshes = {{10, 10}};
  cfg.layer_sweep = {2};
  cfg.conditioning = false;
  const fs::path base = fs::temp_directory_path() / "xsb_bench_report_test";
  cfg.out = base.string();

  const BenchmarkReport report = xsb::run_benchmark(cfg);
  const auto paths = xsb::write_report(cfg, report);
  CHECK(paths[0] == base.string() + ".csv");
  CHECK(paths[1] == base.string() + ".json");

  std::ifstream csv_in(paths[0]);
  REQUIRE(csv_in.good());
  std::string csv((std::istreambuf_iterator<char>(csv_in)), std::istreambuf_iterator<char>());
  CHECK(xsb::rows_equal(xsb::parse_csv(csv), report.rows));

  std::ifstream json_in(paths[1]);
  REQUIRE(json_in.good());
  const auto j = nlohmann::json::parse(json_in);
  CHECK(j.at("config").at("conditioning") == false);
  CHECK(std::isnan(report.rows[0].kappa_scaled));

  fs::remove(paths[0]);
  fs::remove(paths[1]);
}
