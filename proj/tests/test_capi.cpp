#include "splitbell/splitbell.h"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

TEST_SUITE("capi") {

TEST_CASE("scalar entry points") {
  double b = 0.0;
  REQUIRE(sb_exact_chsh(0.0, &b) == SB_OK);
  CHECK(std::abs(b - 2 * std::sqrt(2.0)) < 1e-12);
  CHECK(sb_exact_chsh(-1.0, &b) == SB_ERR_RANGE);
  CHECK(std::string(sb_last_error()).size() > 0);
  CHECK(sb_exact_chsh(0.1, nullptr) == SB_ERR_INVALID_ARGUMENT);
  double r = 0.0;
  REQUIRE(sb_violation_threshold(&r) == SB_OK);
  CHECK(r == doctest::Approx(0.4911).epsilon(1e-4));
  CHECK(std::strlen(sb_version()) > 0);
}

TEST_CASE("grid") {
  std::size_t count = 0;
  REQUIRE(sb_make_grid(0.0, 0.8, 0.02, nullptr, 0, &count) == SB_OK);
  CHECK(count == 41);
  std::vector<double> g(count);
  REQUIRE(sb_make_grid(0.0, 0.8, 0.02, g.data(), g.size(), &count) == SB_OK);
  CHECK(g[40] == 0.8);
  CHECK(sb_make_grid(0.5, 0.1, 0.1, nullptr, 0, &count) == SB_ERR_RANGE);
}

TEST_CASE("state handle") {
  sb_state* s = nullptr;
  REQUIRE(sb_prepare(0.02, 1.0, 10, nullptr, &s) == SB_OK);
  sb_state_info info;
  REQUIRE(sb_state_get_info(s, &info) == SB_OK);
  CHECK(info.k_cut == 10);
  CHECK(info.dimension == 14641u);
  CHECK(info.r == 0.02);
  CHECK(info.boundary_mass < 1e-20);
  CHECK(info.max_stage_boundary_mass >= info.boundary_mass);

  double re = 0, im = 0;
  REQUIRE(sb_state_amplitude(s, 1, 0, 0, 1, &re, &im) == SB_OK);
  CHECK(std::abs(re) < 1e-5);
  CHECK(im == doctest::Approx(0.02).epsilon(1e-3));
  CHECK(sb_state_amplitude(s, 11, 0, 0, 0, &re, &im) == SB_ERR_RANGE);

  double p = 0;
  REQUIRE(sb_state_sector_probability(s, 1, 1, &p) == SB_OK);
  std::vector<double> m(4);
  REQUIRE(sb_state_sector_matrix(s, 1, 1, 0.3, 0.7, m.data(), m.size()) == SB_OK);
  CHECK(m[0] + m[1] + m[2] + m[3] == doctest::Approx(p).epsilon(1e-12));
  CHECK(sb_state_sector_matrix(s, 1, 1, 0.3, 0.7, m.data(), 3) == SB_ERR_INVALID_ARGUMENT);
  std::vector<double> big(12 * 12);
  CHECK(sb_state_sector_matrix(s, 11, 11, 0.0, 0.0, big.data(), big.size()) == SB_ERR_RANGE);
  sb_state_free(s);
  sb_state_free(nullptr);

  CHECK(sb_prepare(0.1, 1.0, 0, nullptr, &s) == SB_ERR_RANGE);
  CHECK(s == nullptr);
  CHECK(sb_prepare(-0.1, 1.0, 5, nullptr, &s) == SB_ERR_RANGE);
}

TEST_CASE("integration failure status") {
  sb_integrator integ;
  sb_integrator_init(&integ);
  CHECK(integ.rtol == 1e-10);
  integ.max_steps = 2;
  sb_state* s = nullptr;
  CHECK(sb_prepare(0.8, 1.0, 10, &integ, &s) == SB_ERR_INTEGRATION);
  CHECK(s == nullptr);
}

TEST_CASE("tables and correlators") {
  const int k = 1;
  std::vector<double> probs(16, 0.0);
  probs[1 * 8 + 1] = 1.0;  // label (1,0,0,1)
  sb_table* t = nullptr;
  REQUIRE(sb_table_from_probs(k, probs.data(), probs.size(), &t) == SB_OK);
  double v = 0;
  REQUIRE(sb_table_probability(t, 1, 0, 0, 1, &v) == SB_OK);
  CHECK(v == 1.0);
  for (auto a : {SB_APPROACH_I, SB_APPROACH_II, SB_APPROACH_III}) {
    REQUIRE(sb_correlator(t, a, 1.0, SB_LOSS, &v) == SB_OK);
    CHECK(v == -1.0);
  }
  CHECK(sb_correlator(t, static_cast<sb_approach>(7), 1.0, SB_LOSS, &v) == SB_ERR_INVALID_ARGUMENT);
  CHECK(sb_correlator(t, SB_APPROACH_II, 1.5, SB_LOSS, &v) == SB_ERR_RANGE);
  sb_table_free(t);

  probs.assign(16, 0.0);
  probs[0] = 1.0;
  REQUIRE(sb_table_from_probs(k, probs.data(), probs.size(), &t) == SB_OK);
  CHECK(sb_correlator(t, SB_APPROACH_III, 1.0, SB_LOSS, &v) == SB_ERR_UNDEFINED_CORRELATOR);
  sb_table_free(t);
  CHECK(sb_table_from_probs(k, probs.data(), 15, &t) == SB_ERR_RANGE);

  sb_state* s = nullptr;
  REQUIRE(sb_prepare(0.2, 1.0, 10, nullptr, &s) == SB_OK);
  REQUIRE(sb_table_create(s, 1.0, 0.5, &t) == SB_OK);
  double ideal = 0, lossy = 0, det = 0;
  REQUIRE(sb_correlator(t, SB_APPROACH_III, 0.8, SB_LOSS, &lossy) == SB_OK);
  REQUIRE(sb_correlator(t, SB_APPROACH_III, 0.8, SB_DETECTOR, &det) == SB_OK);
  REQUIRE(sb_correlator(t, SB_APPROACH_III, 1.0, SB_LOSS, &ideal) == SB_OK);
  CHECK(lossy == det);
  CHECK(lossy != ideal);
  sb_table_free(t);
  sb_state_free(s);
}

TEST_CASE("sweep handle") {
  const double rs[] = {0.0, 0.1};
  const int approaches[] = {SB_APPROACH_II};
  sb_sweep_config cfg;
  sb_sweep_config_init(&cfg);
  CHECK(cfg.k_cut == 12);
  cfg.r_values = rs;
  cfg.r_count = 2;
  cfg.approaches = approaches;
  cfg.approach_count = 1;
  cfg.k_cut = 8;
  sb_sweep* sw = nullptr;
  REQUIRE(sb_sweep_run(&cfg, &sw) == SB_OK);
  REQUIRE(sb_sweep_size(sw) == 2);
  sb_record rec;
  REQUIRE(sb_sweep_record(sw, 0, &rec) == SB_OK);
  CHECK(rec.approach == SB_APPROACH_II);
  CHECK(rec.B == 2.0);
  CHECK(rec.error_flag == 0);
  CHECK(rec.atoms == 0);
  REQUIRE(sb_sweep_record(sw, 1, &rec) == SB_OK);
  CHECK(rec.B > 2.0);
  CHECK(rec.B == doctest::Approx(rec.E[0] + rec.E[1] + rec.E[2] - rec.E[3]));
  CHECK(sb_sweep_record(sw, 2, &rec) == SB_ERR_RANGE);
  CHECK(std::string(sb_sweep_record_message(sw, 0)).empty());
  sb_sweep_free(sw);

  const int bad[] = {9};
  cfg.approaches = bad;
  CHECK(sb_sweep_run(&cfg, &sw) == SB_ERR_INVALID_ARGUMENT);
  cfg.approaches = nullptr;
  cfg.approach_count = 0;
  cfg.r_count = 0;
  CHECK(sb_sweep_run(&cfg, &sw) == SB_ERR_RANGE);
}

TEST_CASE("exact-model sweep handle") {
  const double rs[] = {0.05};
  const int approaches[] = {SB_APPROACH_III};
  sb_sweep_config cfg;
  sb_sweep_config_init(&cfg);
  cfg.r_values = rs;
  cfg.r_count = 1;
  cfg.approaches = approaches;
  cfg.approach_count = 1;
  sb_sweep* sw = nullptr;
  REQUIRE(sb_fullham_run(&cfg, 6, &sw) == SB_OK);
  sb_record rec;
  REQUIRE(sb_sweep_record(sw, 0, &rec) == SB_OK);
  CHECK(rec.atoms == 6);
  CHECK(rec.k_cut == 6);
  CHECK(rec.B > 2.7);
  sb_sweep_free(sw);
  CHECK(sb_fullham_run(&cfg, 1, &sw) == SB_ERR_RANGE);
}

TEST_CASE("report handle") {
  const int only[] = {1};
  sb_report* rep = nullptr;
  REQUIRE(sb_validate(1, 40, only, 1, &rep) == SB_OK);
  CHECK(sb_report_size(rep) == 1);
  CHECK(sb_report_passed(rep) == 1);
  int id = 0, passed = 0;
  double seconds = -1;
  const char* name = nullptr;
  REQUIRE(sb_report_check(rep, 0, &id, &passed, &seconds, &name) == SB_OK);
  CHECK(id == 1);
  CHECK(passed == 1);
  CHECK(seconds >= 0.0);
  CHECK(std::string(name) == "closed-form benchmark");
  CHECK(std::string(sb_report_json(rep)).find("\"checks\"") != std::string::npos);
  CHECK(sb_report_check(rep, 1, &id, &passed, &seconds, &name) == SB_ERR_RANGE);
  sb_report_free(rep);

  const int wrong[] = {10};
  CHECK(sb_validate(1, 40, wrong, 1, &rep) == SB_ERR_RANGE);
}

}
