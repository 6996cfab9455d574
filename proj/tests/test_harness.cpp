#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lowmach/harness.hpp"

using namespace lowmach;

TEST_CASE("config parsing") {
  const auto c = parse_config(R"(
# comment
domain.geometry = channel
domain.nx = 64
domain.ny = 16   # trailing comment
eos.family = linear
eos.k = 500
solver.t_final = 0.2
solver.dt = 1e-3
sweep.k_list = 100, 1000, inf
sweep.n_max = 1
seed = 7
output.dir = results
)");
  CHECK(c.domain.is_channel());
  CHECK(c.domain.nx == 64);
  CHECK(c.domain.ny == 16);
  CHECK(c.eos.family == EosFamily::Linear);
  CHECK(c.eos.k == 500.0);
  CHECK(c.dt.value() == 1e-3);
  REQUIRE(c.k_list.size() == 3);
  CHECK(std::isinf(c.k_list[2]));
  CHECK(c.n_max == 1);
  CHECK(c.seed == 7);
  CHECK(c.output_dir == "results");

  CHECK_THROWS_AS(parse_config("domain.nz = 3"), ConfigError);
  CHECK_THROWS_AS(parse_config("domain.nx = abc"), ConfigError);
  CHECK_THROWS_AS(parse_config("domain.nx 32"), ConfigError);
  CHECK_THROWS_AS(parse_config("eos.k = -1"), ConfigError);
  CHECK_THROWS_AS(parse_config("sweep.k_list = 100, 0"), ConfigError);
  CHECK_THROWS_AS(parse_config("domain.nx = 30"), ConfigError);  // not a power of two
  try {
    parse_config("\n\nbogus = 1");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  // entries round-trip
  std::string text;
  for (const auto& [k, v] : c.entries()) text += k + " = " + v + "\n";
  const auto back = parse_config(text);
  CHECK(back.entries() == c.entries());
  CHECK(config_keys().size() == c.entries().size());
}

TEST_CASE("slope fits") {
  const std::vector<double> k{1e2, 1e3, 1e4, 1e5};
  std::vector<double> a, b;
  for (double x : k) {
    a.push_back(3.0 / x);
    b.push_back(0.7 / std::sqrt(x));
  }
  auto fa = fit_slope(k, a), fb = fit_slope(k, b);
  CHECK(fa.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(fa.constant() == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fa.stderr_ <= 1e-12);
  CHECK(fb.slope == doctest::Approx(-0.5).epsilon(1e-12));

  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 0.05);
  std::vector<double> kk, v;
  for (int i = 0; i < 12; ++i) {
    const double x = std::pow(10.0, 2.0 + 0.25 * i);
    kk.push_back(x);
    v.push_back(2.0 * std::pow(x, -0.5) * std::exp(nd(rng)));
  }
  const auto f = fit_slope(kk, v);
  CHECK(f.stderr_ > 0.0);
  CHECK(std::abs(f.slope + 0.5) <= 3.0 * f.stderr_);

  CHECK_THROWS_AS(fit_slope({1, 2}, {1, 2}), InputError);
  try {
    fit_slope({1, 2, 3}, {1, -2, 3});
    FAIL("accepted a negative value");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }
}

TEST_CASE("initial data family") {
  Config c;
  c.domain = DomainSpec::torus(16, 16);
  const auto d = initial_data(c);
  CHECK(sobolev_norm(div(d.v0), {0}) <= 1e-12);
  CHECK(d.v0.max_abs() == doctest::Approx(c.velocity_amplitude));
  CHECK(d.chi2.max_abs() == doctest::Approx(1.0));
  CHECK(std::abs(mean(d.chi2)) <= 1e-14);
  const auto u = velocity_for(d, c, 400.0);
  CHECK((project_p(u) - d.v0).max_abs() <= 1e-12);
  CHECK(log_density_for(d, c, 400.0).max_abs() == doctest::Approx(1.0 / 400.0));

  c.domain = DomainSpec::channel(16, 16);
  const auto e = initial_data(c);
  const auto w = velocity_for(e, c, 100.0);
  for (double y : trace_values(w.y, Wall::Y0)) CHECK(std::abs(y) <= 1e-14);
}

TEST_CASE("small sweep, sentinel and writers") {
  Config c;
  c.domain = DomainSpec::torus(16, 16);
  c.t_final = 0.05;
  c.samples = 2;
  c.n_max = 1;
  c.operator_samples = 1;
  c.k_list = {1e2, 1e3, std::numeric_limits<double>::infinity()};
  const auto r = run_sweep(c);
  REQUIRE(r.cells.size() == 3);
  CHECK(r.cells[0].ok);
  CHECK(r.cells[0].u_err_h1 > r.cells[1].u_err_h1);
  CHECK(r.cells[0].cascade_rows.size() == 2);
  CHECK(std::isnan(r.cells[2].u_err_h1));
  CHECK(r.incomplete.empty());
  CHECK(r.slopes.empty());  // two finite k values only

  const auto dir = std::filesystem::temp_directory_path() / "lowmach_harness_test";
  std::filesystem::create_directories(dir);
  const auto csv = (dir / "sweep.csv").string();
  write_sweep_csv(csv, r);
  write_sweep_json((dir / "sweep.json").string(), r);
  write_sweep_dat((dir / "sweep.dat").string(), r);
  const auto cols = read_csv_columns(csv);
  REQUIRE(cols.count("u_err_h1") == 1);
  CHECK(cols.at("u_err_h1")[0] == doctest::Approx(r.cells[0].u_err_h1).epsilon(1e-12));
  CHECK(std::isnan(cols.at("u_err_h1")[2]));
  CHECK(std::isinf(cols.at("k")[2]));

  // determinism
  const auto again = (dir / "again.csv").string();
  write_sweep_csv(again, run_sweep(c));
  std::ifstream a(csv), b(again);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());

  // per-k failure is isolated
  Config bad = c;
  bad.dt = 0.05;
  const auto rb = run_sweep(bad);
  CHECK(!rb.cells[0].ok);
  CHECK(!rb.cells[1].ok);
  CHECK(rb.incomplete.size() == 2);
  CHECK(rb.cells[2].ok);
  std::filesystem::remove_all(dir);
}
