#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vem/errors.hpp"
#include "vem/harness.hpp"

using namespace vem;

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  cfg.p = 1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.p = 3;
  cfg.family = "nonsense";
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.family = "flatten";
  cfg.index = 9;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.index = 2;
  cfg.format = "yaml";
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.format = "markdown";
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("fem selfcheck hits the Taylor-Hood rates") {
  RateReport rep = run_fem_selfcheck();
  CHECK(rep.h1_slope == doctest::Approx(2.0).epsilon(0.075));
  CHECK(rep.l2_slope == doctest::Approx(3.0).epsilon(0.067));
  CHECK(rep.h1_r2 > 0.99);
}

TEST_CASE("pspan on a fixed level produces sorted deterministic rows") {
  ExperimentConfig cfg;
  cfg.family = "flatten";
  cfg.index = 1;
  cfg.p = 2;
  cfg.p_max = 3;
  cfg.refine = 2;
  cfg.stab = StabChoice::both;
  auto rows = run_pspan(cfg);
  CHECK(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.lambda_min > 0);
    CHECK(r.lambda_max >= r.lambda_min);
    CHECK(std::isfinite(r.cond_A));
    CHECK(std::isfinite(r.cond_B));
  }
  // deterministic ordering and values (modulo wall_time)
  auto rows2 = run_pspan(cfg);
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].element_id == rows2[i].element_id);
    CHECK(rows[i].p == rows2[i].p);
    CHECK(rows[i].stab == rows2[i].stab);
    CHECK(rows[i].lambda_min == rows2[i].lambda_min);
    CHECK(rows[i].lambda_max == rows2[i].lambda_max);
  }
  // dofi and projection agree within 20% at p=2 on a benign element
  const TableRow* proj = nullptr;
  const TableRow* dofi = nullptr;
  for (const auto& r : rows)
    if (r.p == 2) (r.stab == "projection" ? proj : dofi) = &r;
  REQUIRE(proj);
  REQUIRE(dofi);
  CHECK(std::abs(proj->lambda_min - dofi->lambda_min) <
        0.2 * std::max(proj->lambda_min, dofi->lambda_min));
}

TEST_CASE("parallel jobs produce the same rows") {
  ExperimentConfig cfg;
  cfg.family = "hanging_node";
  cfg.index = 1;
  cfg.p = 2;
  cfg.p_max = 3;
  cfg.refine = 1;
  cfg.stab = StabChoice::projection;
  auto seq_rows = run_pspan(cfg);
  cfg.jobs = 4;
  auto par_rows = run_pspan(cfg);
  REQUIRE(seq_rows.size() == par_rows.size());
  for (size_t i = 0; i < seq_rows.size(); ++i) {
    CHECK(seq_rows[i].lambda_min == par_rows[i].lambda_min);
    CHECK(seq_rows[i].lambda_max == par_rows[i].lambda_max);
  }
}

TEST_CASE("cache round trip, verify, corruption, clear") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "vemstab-cache-test";
  fs::remove_all(dir);

  ExperimentConfig cfg;
  cfg.family = "hanging_node";
  cfg.index = 1;
  cfg.p = 2;
  cfg.refine = 1;
  cfg.stab = StabChoice::projection;
  cfg.cache_dir = dir.string();
  auto rows1 = run_pspan(cfg);
  auto entries = cache_list(cfg.cache_dir);
  CHECK(entries.size() == 1);
  // second run reads the cache and matches
  auto rows2 = run_pspan(cfg);
  CHECK(rows1[0].lambda_min == rows2[0].lambda_min);
  // verify passes
  for (const auto& e : cache_verify(cfg.cache_dir)) CHECK(e.valid);
  // corrupt the binary -> verify flags it, runs skip it
  {
    fs::path bin;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".bin") bin = e.path();
    std::ofstream f(bin, std::ios::binary | std::ios::trunc);
    f << "garbage";
  }
  auto verified = cache_verify(cfg.cache_dir);
  CHECK(verified.size() == 1);
  CHECK_FALSE(verified[0].valid);
  auto rows3 = run_pspan(cfg);  // recomputes despite the bad entry
  CHECK(rows3[0].lambda_min == doctest::Approx(rows1[0].lambda_min).epsilon(1e-12));
  CHECK(cache_clear(cfg.cache_dir) >= 2);
  CHECK(cache_verify(cfg.cache_dir).empty());
  fs::remove_all(dir);
}

TEST_CASE("emitters produce the documented shapes") {
  TableRow r;
  r.element_id = "flatten-1";
  r.p = 2;
  r.stab = "projection";
  r.lambda_min = 0.1;
  r.lambda_max = 2.0;
  r.cond_A = 10;
  r.cond_B = 20;
  r.rho_star = 0.5;
  std::string csv = emit_table({r}, "csv");
  CHECK(csv.find("element,p,stab,lambda_min") == 0);
  CHECK(csv.find("flatten-1,2,projection") != std::string::npos);
  std::string md = emit_table({r}, "markdown");
  CHECK(md.find("| element |") == 0);
  CHECK(md.find("| flatten-1 |") != std::string::npos);
}

TEST_CASE("loglog regression recovers a known slope") {
  std::vector<double> x = {1.0, 0.5, 0.25, 0.125};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * v * v * v);
  auto [slope, r2] = loglog_slope(x, y);
  CHECK(slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("interpolation rates match the degree") {
  for (int p : {2, 3}) {
    ExperimentConfig cfg;
    cfg.p = p;
    RateReport rep = run_interp_rates(cfg);
    CHECK(rep.h1_slope == doctest::Approx((double)p).epsilon(0.25 / p));
    CHECK(rep.h1_r2 > 0.99);
  }
}
