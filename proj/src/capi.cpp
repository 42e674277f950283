#include "splitbell/splitbell.h"

#include "splitbell/bell.hpp"
#include "splitbell/error.hpp"
#include "splitbell/exacthamiltonian.hpp"
#include "splitbell/validation.hpp"

#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

struct sb_state {
  splitbell::PreparedState prepared;
  double r;
  double desqueeze_scale;
};

struct sb_table {
  splitbell::ProbabilityTable table;
};

struct sb_sweep {
  std::vector<splitbell::SweepRecord> records;
};

struct sb_report {
  splitbell::ValidationReport report;
  std::string json;
};

namespace {

thread_local std::string g_last_error;

sb_status fail(sb_status code, const char* what) {
  g_last_error = what;
  return code;
}

// Maps exceptions to status codes; fn returns nothing and writes outputs.
template <class Fn>
sb_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SB_OK;
  } catch (const splitbell::UndefinedCorrelator& e) {
    return fail(SB_ERR_UNDEFINED_CORRELATOR, e.what());
  } catch (const splitbell::IntegrationError& e) {
    return fail(SB_ERR_INTEGRATION, e.what());
  } catch (const splitbell::RangeError& e) {
    return fail(SB_ERR_RANGE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SB_ERR_INTERNAL, e.what());
  }
}

sb_status null_arg(const char* name) {
  return fail(SB_ERR_INVALID_ARGUMENT, (std::string(name) + " must not be null").c_str());
}

splitbell::IntegratorConfig to_cpp(const sb_integrator* in) {
  splitbell::IntegratorConfig cfg;
  if (in) {
    cfg.rtol = in->rtol;
    cfg.atol = in->atol;
    cfg.max_steps = in->max_steps;
  }
  return cfg;
}

splitbell::Approach to_approach(int a) {
  switch (a) {
    case SB_APPROACH_I: return splitbell::Approach::I;
    case SB_APPROACH_II: return splitbell::Approach::II;
    case SB_APPROACH_III: return splitbell::Approach::III;
  }
  throw std::invalid_argument("unknown approach " + std::to_string(a));
}

splitbell::LossKind to_loss_kind(int k) {
  if (k == SB_LOSS) return splitbell::LossKind::Loss;
  if (k == SB_DETECTOR) return splitbell::LossKind::DetectorInefficiency;
  throw std::invalid_argument("unknown loss kind " + std::to_string(k));
}

// Common fields of the two sweep flavours.
template <class Spec>
void fill_spec(const sb_sweep_config& c, Spec& spec) {
  if (c.r_count > 0 && !c.r_values) throw std::invalid_argument("r_values must not be null");
  spec.r_values.assign(c.r_values, c.r_values + c.r_count);
  if (c.gammas) spec.gammas.assign(c.gammas, c.gammas + c.gamma_count);
  if (c.approaches) {
    spec.approaches.clear();
    for (std::size_t i = 0; i < c.approach_count; ++i) spec.approaches.push_back(to_approach(c.approaches[i]));
  }
  spec.angles = {c.angles[0], c.angles[1], c.angles[2], c.angles[3]};
  spec.desqueeze_scale = c.desqueeze_scale;
  spec.loss_kind = to_loss_kind(c.loss_kind);
  spec.integrator = to_cpp(&c.integrator);
  spec.jobs = c.jobs;
}

}  // namespace

extern "C" {

const char* sb_last_error(void) { return g_last_error.c_str(); }

const char* sb_version(void) { return "1.0.0"; }

sb_status sb_exact_chsh(double r, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = splitbell::exact_chsh(r); });
}

sb_status sb_violation_threshold(double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = splitbell::violation_threshold(); });
}

sb_status sb_make_grid(double r_min, double r_max, double r_step, double* out, size_t capacity,
                       size_t* count) {
  if (!count) return null_arg("count");
  if (capacity > 0 && !out) return null_arg("out");
  return guarded([&] {
    const auto grid = splitbell::make_grid(r_min, r_max, r_step);
    *count = grid.size();
    std::memcpy(out, grid.data(), std::min(capacity, grid.size()) * sizeof(double));
  });
}

void sb_integrator_init(sb_integrator* cfg) {
  if (!cfg) return;
  const splitbell::IntegratorConfig d;
  cfg->rtol = d.rtol;
  cfg->atol = d.atol;
  cfg->max_steps = d.max_steps;
}

sb_status sb_prepare(double r, double desqueeze_scale, int k_cut, const sb_integrator* integrator,
                     sb_state** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const splitbell::TruncationConfig cfg(k_cut);
    *out = new sb_state{splitbell::prepare_bell_state({r, desqueeze_scale}, cfg, to_cpp(integrator)),
                        r, desqueeze_scale};
  });
}

void sb_state_free(sb_state* state) { delete state; }

sb_status sb_state_get_info(const sb_state* state, sb_state_info* out) {
  if (!state) return null_arg("state");
  if (!out) return null_arg("out");
  const auto& p = state->prepared;
  out->k_cut = p.state.config().k_cut();
  out->dimension = p.state.size();
  out->r = state->r;
  out->desqueeze_scale = state->desqueeze_scale;
  out->norm_drift = p.norm_drift;
  out->boundary_mass = p.boundary_mass;
  out->max_stage_boundary_mass = p.max_stage_boundary_mass;
  g_last_error.clear();
  return SB_OK;
}

sb_status sb_state_amplitude(const sb_state* state, int k_a, int l_a, int k_b, int l_b, double* re,
                             double* im) {
  if (!state) return null_arg("state");
  if (!re || !im) return null_arg("re/im");
  return guarded([&] {
    const auto a = state->prepared.state.at({k_a, l_a, k_b, l_b});
    *re = a.real();
    *im = a.imag();
  });
}

sb_status sb_state_sector_probability(const sb_state* state, int n_a, int n_b, double* out) {
  if (!state) return null_arg("state");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto m = splitbell::sector_marginal(state->prepared.state);
    const auto it = m.find(splitbell::SectorKey{n_a, n_b});
    *out = it == m.end() ? 0.0 : it->second;
  });
}

sb_status sb_state_sector_matrix(const sb_state* state, int n_a, int n_b, double theta_a,
                                 double theta_b, double* out, size_t len) {
  if (!state) return null_arg("state");
  if (!out) return null_arg("out");
  const int k_cut = state->prepared.state.config().k_cut();
  if (n_a < 0 || n_b < 0 || n_a > k_cut || n_b > k_cut) {
    return fail(SB_ERR_RANGE, "sector exceeds the per-mode ceiling");
  }
  const std::size_t need = static_cast<std::size_t>(n_a + 1) * static_cast<std::size_t>(n_b + 1);
  if (len < need) return fail(SB_ERR_INVALID_ARGUMENT, "output buffer too small");
  return guarded([&] {
    const auto rotated = splitbell::rotate(state->prepared.state, theta_a, theta_b);
    for (int ka = 0; ka <= n_a; ++ka)
      for (int kb = 0; kb <= n_b; ++kb)
        out[static_cast<std::size_t>(ka) * (n_b + 1) + kb] =
            std::norm(rotated.at({ka, n_a - ka, kb, n_b - kb}));
  });
}

sb_status sb_table_create(const sb_state* state, double theta_a, double theta_b, sb_table** out) {
  if (!state) return null_arg("state");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new sb_table{splitbell::probability_table(state->prepared.state, theta_a, theta_b)};
  });
}

sb_status sb_table_from_probs(int k_cut, const double* probs, size_t len, sb_table** out) {
  if (!probs) return null_arg("probs");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const splitbell::TruncationConfig cfg(k_cut);
    *out = new sb_table{splitbell::ProbabilityTable(cfg, std::vector<double>(probs, probs + len))};
  });
}

void sb_table_free(sb_table* table) { delete table; }

sb_status sb_table_probability(const sb_table* table, int k_a, int l_a, int k_b, int l_b,
                               double* out) {
  if (!table) return null_arg("table");
  if (!out) return null_arg("out");
  return guarded([&] { *out = table->table.at({k_a, l_a, k_b, l_b}); });
}

sb_status sb_correlator(const sb_table* table, sb_approach approach, double gamma,
                        sb_loss_kind kind, double* out) {
  if (!table) return null_arg("table");
  if (!out) return null_arg("out");
  try {
    const auto a = to_approach(approach);
    const auto k = to_loss_kind(kind);
    return guarded([&] { *out = splitbell::correlator(table->table, a, {gamma, k}); });
  } catch (const std::invalid_argument& e) {
    return fail(SB_ERR_INVALID_ARGUMENT, e.what());
  }
}

void sb_sweep_config_init(sb_sweep_config* cfg) {
  if (!cfg) return;
  const splitbell::SweepSpec d;
  cfg->r_values = nullptr;
  cfg->r_count = 0;
  cfg->gammas = nullptr;
  cfg->gamma_count = 0;
  cfg->approaches = nullptr;
  cfg->approach_count = 0;
  cfg->k_cut = d.k_cut;
  cfg->angles[0] = d.angles.theta_a;
  cfg->angles[1] = d.angles.theta_a_prime;
  cfg->angles[2] = d.angles.theta_b;
  cfg->angles[3] = d.angles.theta_b_prime;
  cfg->desqueeze_scale = d.desqueeze_scale;
  cfg->loss_kind = SB_LOSS;
  sb_integrator_init(&cfg->integrator);
  cfg->jobs = d.jobs;
}

sb_status sb_sweep_run(const sb_sweep_config* cfg, sb_sweep** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  *out = nullptr;
  splitbell::SweepSpec spec;
  try {
    fill_spec(*cfg, spec);
  } catch (const std::invalid_argument& e) {
    return fail(SB_ERR_INVALID_ARGUMENT, e.what());
  }
  spec.k_cut = cfg->k_cut;
  return guarded([&] { *out = new sb_sweep{splitbell::sweep(spec)}; });
}

sb_status sb_fullham_run(const sb_sweep_config* cfg, int atoms, sb_sweep** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  *out = nullptr;
  splitbell::FullHamSpec spec;
  try {
    fill_spec(*cfg, spec);
  } catch (const std::invalid_argument& e) {
    return fail(SB_ERR_INVALID_ARGUMENT, e.what());
  }
  spec.atoms = atoms;
  return guarded([&] { *out = new sb_sweep{splitbell::fullham_sweep(spec)}; });
}

size_t sb_sweep_size(const sb_sweep* sweep) { return sweep ? sweep->records.size() : 0; }

sb_status sb_sweep_record(const sb_sweep* sweep, size_t index, sb_record* out) {
  if (!sweep) return null_arg("sweep");
  if (!out) return null_arg("out");
  if (index >= sweep->records.size()) return fail(SB_ERR_RANGE, "record index out of range");
  const auto& rec = sweep->records[index];
  out->approach = static_cast<int>(rec.approach) + 1;
  out->r = rec.r;
  out->gamma = rec.gamma;
  out->k_cut = rec.k_cut;
  out->atoms = rec.atoms.value_or(0);
  for (int i = 0; i < 4; ++i) out->E[i] = rec.E[i];
  out->B = rec.B;
  out->boundary_mass = rec.boundary_mass;
  out->norm_drift = rec.norm_drift;
  out->error_flag = static_cast<int>(rec.error);
  g_last_error.clear();
  return SB_OK;
}

const char* sb_sweep_record_message(const sb_sweep* sweep, size_t index) {
  if (!sweep || index >= sweep->records.size()) return "";
  return sweep->records[index].message.c_str();
}

void sb_sweep_free(sb_sweep* sweep) { delete sweep; }

sb_status sb_validate(int jobs, int k_cut, const int* only, size_t only_count, sb_report** out) {
  if (!out) return null_arg("out");
  if (only_count > 0 && !only) return null_arg("only");
  *out = nullptr;
  return guarded([&] {
    splitbell::ValidationOptions opt;
    opt.jobs = jobs;
    opt.k_cut = k_cut;
    if (only) opt.only.assign(only, only + only_count);
    auto report = splitbell::run_validation(opt);
    std::string json = report.to_json();
    *out = new sb_report{std::move(report), std::move(json)};
  });
}

int sb_report_passed(const sb_report* report) { return report && report->report.passed() ? 1 : 0; }

size_t sb_report_size(const sb_report* report) { return report ? report->report.checks.size() : 0; }

sb_status sb_report_check(const sb_report* report, size_t index, int* id, int* passed,
                          double* seconds, const char** name) {
  if (!report) return null_arg("report");
  if (index >= report->report.checks.size()) return fail(SB_ERR_RANGE, "check index out of range");
  const auto& c = report->report.checks[index];
  if (id) *id = c.id;
  if (passed) *passed = c.passed ? 1 : 0;
  if (seconds) *seconds = c.seconds;
  if (name) *name = c.name.c_str();
  g_last_error.clear();
  return SB_OK;
}

const char* sb_report_json(const sb_report* report) { return report ? report->json.c_str() : ""; }

void sb_report_free(sb_report* report) { delete report; }

}  // extern "C"
