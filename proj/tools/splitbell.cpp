// Command-line front end over the C interface.

#include "run_config.hpp"
#include "splitbell/splitbell.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using splitbell::cli::Format;
using splitbell::cli::RunConfig;
using splitbell::cli::Subcommand;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCompute = 1;
constexpr int kExitUsage = 2;
constexpr double kBoundaryWarning = 1e-8;

// Thrown for bad input; mapped to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown for failures inside the computation; exit status 1.
struct ComputeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(sb_status s) {
  if (s == SB_OK) return;
  const std::string msg = sb_last_error();
  if (s == SB_ERR_RANGE || s == SB_ERR_INVALID_ARGUMENT) throw UsageError(msg);
  throw ComputeError(msg);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

nlohmann::json jnum(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::vector<double> grid_of(const RunConfig& c) {
  std::size_t count = 0;
  check(sb_make_grid(c.r_min, c.r_max, c.r_step, nullptr, 0, &count));
  std::vector<double> g(count);
  check(sb_make_grid(c.r_min, c.r_max, c.r_step, g.data(), g.size(), &count));
  if (g.empty()) throw UsageError("empty r grid");
  return g;
}

std::vector<int> approaches_of(const RunConfig& c) {
  if (c.approaches.empty()) throw UsageError("no approach selected");
  std::vector<int> out;
  for (std::string a : c.approaches) {
    for (auto& ch : a) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (a == "I" || a == "1") out.push_back(SB_APPROACH_I);
    else if (a == "II" || a == "2") out.push_back(SB_APPROACH_II);
    else if (a == "III" || a == "3") out.push_back(SB_APPROACH_III);
    else throw UsageError("unknown approach '" + a + "' (expected I, II or III)");
  }
  return out;
}

int loss_kind_of(const RunConfig& c) {
  if (c.loss_kind == "loss") return SB_LOSS;
  if (c.loss_kind == "detector") return SB_DETECTOR;
  throw UsageError("unknown loss kind '" + c.loss_kind + "' (expected loss or detector)");
}

const char* approach_label(int a) {
  switch (a) {
    case SB_APPROACH_I: return "I";
    case SB_APPROACH_II: return "II";
    case SB_APPROACH_III: return "III";
  }
  return "?";
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s;
}

std::string joined_numbers(const std::vector<double>& v, const char* sep) {
  std::vector<std::string> parts;
  for (double x : v) parts.push_back(num(x));
  return join(parts, sep);
}

void emit(const RunConfig& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(c.output, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot open output file '" + c.output + "'");
  f << text;
  if (!f) throw ComputeError("failed writing '" + c.output + "'");
}

struct SweepDeleter {
  void operator()(sb_sweep* s) const { sb_sweep_free(s); }
};
using SweepPtr = std::unique_ptr<sb_sweep, SweepDeleter>;

// ---- exact ----------------------------------------------------------------

int run_exact(const RunConfig& c) {
  const auto grid = grid_of(c);
  std::vector<double> values;
  for (double r : grid) {
    double b = 0.0;
    check(sb_exact_chsh(r, &b));
    values.push_back(b);
  }
  std::string text;
  if (c.format == Format::Csv) {
    text += "# splitbell exact\n";
    text += "# r_grid=" + num(c.r_min) + ":" + num(c.r_step) + ":" + num(c.r_max) + "\n";
    text += "r,B_exact\n";
    for (std::size_t i = 0; i < grid.size(); ++i) text += num(grid[i]) + "," + num(values[i]) + "\n";
  } else {
    nlohmann::json j{{"command", "exact"}, {"config", c}, {"columns", {"r", "B_exact"}}};
    j["records"] = nlohmann::json::array();
    for (std::size_t i = 0; i < grid.size(); ++i)
      j["records"].push_back({{"r", grid[i]}, {"B_exact", values[i]}});
    text = j.dump(2) + "\n";
  }
  emit(c, text);
  return kExitOk;
}

// ---- sweep / fullham ------------------------------------------------------

int run_records(const RunConfig& c, bool fullham) {
  std::vector<double> grid = grid_of(c);
  if (fullham) {
    std::vector<double> kept;
    for (double r : grid)
      if (r <= splitbell::cli::kFullhamMaxR + 1e-12) kept.push_back(r);
    if (kept.size() != grid.size()) {
      std::cerr << "splitbell: exact-Hamiltonian grid capped at r = "
                << num(splitbell::cli::kFullhamMaxR) << "\n";
    }
    if (kept.empty()) throw UsageError("empty r grid after capping at r = 0.5");
    grid = std::move(kept);
  }
  const auto approaches = approaches_of(c);
  if (c.gammas.empty()) throw UsageError("no gamma given");
  for (double g : c.gammas)
    if (!(g >= 0.0 && g <= 1.0)) throw UsageError("gamma must lie in [0, 1], got " + num(g));
  const int k_cut = c.k_cut.value_or(splitbell::cli::default_k_cut(grid.back()));
  if (c.jobs < 1) throw UsageError("--jobs must be at least 1");

  sb_sweep_config cfg;
  sb_sweep_config_init(&cfg);
  cfg.r_values = grid.data();
  cfg.r_count = grid.size();
  cfg.gammas = c.gammas.data();
  cfg.gamma_count = c.gammas.size();
  cfg.approaches = approaches.data();
  cfg.approach_count = approaches.size();
  cfg.k_cut = k_cut;
  for (int i = 0; i < 4; ++i) cfg.angles[i] = c.angles[static_cast<std::size_t>(i)];
  cfg.desqueeze_scale = c.desqueeze_scale;
  cfg.loss_kind = loss_kind_of(c);
  cfg.jobs = c.jobs;

  sb_sweep* raw = nullptr;
  check(fullham ? sb_fullham_run(&cfg, c.atoms, &raw) : sb_sweep_run(&cfg, &raw));
  SweepPtr sweep(raw);

  const std::vector<std::string> columns = [&] {
    std::vector<std::string> cols{"approach", "r", "gamma", "k_cut", "E1", "E2", "E3", "E4", "B",
                                  "boundary_mass", "norm_drift", "error_flag"};
    if (fullham) cols.push_back("N");
    return cols;
  }();

  bool integration_failed = false;
  double worst_boundary = 0.0;
  std::string text;
  nlohmann::json records = nlohmann::json::array();
  std::string rows;
  for (std::size_t i = 0; i < sb_sweep_size(sweep.get()); ++i) {
    sb_record rec;
    check(sb_sweep_record(sweep.get(), i, &rec));
    integration_failed |= rec.error_flag == 2;
    if (rec.boundary_mass > worst_boundary) worst_boundary = rec.boundary_mass;
    if (c.format == Format::Csv) {
      rows += approach_label(rec.approach);
      for (double v : {rec.r, rec.gamma}) rows += "," + num(v);
      rows += "," + std::to_string(rec.k_cut);
      for (double v : rec.E) rows += "," + num(v);
      for (double v : {rec.B, rec.boundary_mass, rec.norm_drift}) rows += "," + num(v);
      rows += "," + std::to_string(rec.error_flag);
      if (fullham) rows += "," + std::to_string(rec.atoms);
      rows += "\n";
    } else {
      nlohmann::json jr{{"approach", approach_label(rec.approach)},
                        {"r", rec.r},
                        {"gamma", rec.gamma},
                        {"k_cut", rec.k_cut},
                        {"E", {jnum(rec.E[0]), jnum(rec.E[1]), jnum(rec.E[2]), jnum(rec.E[3])}},
                        {"B", jnum(rec.B)},
                        {"boundary_mass", jnum(rec.boundary_mass)},
                        {"norm_drift", jnum(rec.norm_drift)},
                        {"error_flag", rec.error_flag}};
      if (fullham) jr["N"] = rec.atoms;
      if (rec.error_flag != 0) jr["message"] = sb_sweep_record_message(sweep.get(), i);
      records.push_back(std::move(jr));
    }
  }

  if (worst_boundary > kBoundaryWarning)
    std::cerr << "splitbell: warning: boundary_mass reaches " << num(worst_boundary)
              << "; raise --kcut\n";

  RunConfig effective = c;
  effective.k_cut = k_cut;
  if (c.format == Format::Csv) {
    text += std::string("# splitbell ") + (fullham ? "fullham" : "sweep") + "\n";
    text += "# approaches=" + join(c.approaches, ";") + " gammas=" + joined_numbers(c.gammas, ";") +
            " loss_kind=" + c.loss_kind + "\n";
    text += "# r_grid=" + num(grid.front()) + ":" + num(c.r_step) + ":" + num(grid.back()) +
            " k_cut=" + std::to_string(k_cut) + " desqueeze_scale=" + num(c.desqueeze_scale) + "\n";
    if (fullham) text += "# N=" + std::to_string(c.atoms) + "\n";
    text += "# angles=" + joined_numbers({c.angles.begin(), c.angles.end()}, ";") + "\n";
    sb_integrator integ;
    sb_integrator_init(&integ);
    text += "# integrator rtol=" + num(integ.rtol) + " atol=" + num(integ.atol) + "\n";
    text += "# error_flag: 0 ok, 1 undefined correlator, 2 integration failure\n";
    text += join(columns, ",") + "\n" + rows;
  } else {
    nlohmann::json j{{"command", fullham ? "fullham" : "sweep"}, {"config", effective},
                     {"columns", columns}, {"records", std::move(records)}};
    text = j.dump(2) + "\n";
  }
  emit(c, text);
  return integration_failed ? kExitCompute : kExitOk;
}

// ---- probs ----------------------------------------------------------------

int run_probs(const RunConfig& c) {
  const int k_cut = c.k_cut.value_or(splitbell::cli::default_k_cut(c.r));
  if (c.sectors.empty()) throw UsageError("no sector requested");
  for (auto [na, nb] : c.sectors) {
    if (na < 0 || nb < 0 || na > k_cut || nb > k_cut) {
      throw UsageError("sector (" + std::to_string(na) + "," + std::to_string(nb) +
                       ") exceeds k_cut = " + std::to_string(k_cut));
    }
  }
  sb_state* raw = nullptr;
  check(sb_prepare(c.r, c.desqueeze_scale, k_cut, nullptr, &raw));
  std::unique_ptr<sb_state, void (*)(sb_state*)> state(raw, sb_state_free);
  sb_state_info info;
  check(sb_state_get_info(state.get(), &info));
  if (info.boundary_mass > kBoundaryWarning)
    std::cerr << "splitbell: warning: boundary_mass " << num(info.boundary_mass) << "; raise --kcut\n";

  struct Sector {
    int na, nb;
    double mass;
    std::vector<double> matrix;
  };
  std::vector<Sector> sectors;
  for (auto [na, nb] : c.sectors) {
    Sector s{na, nb, 0.0, std::vector<double>(static_cast<std::size_t>(na + 1) * (nb + 1))};
    check(sb_state_sector_probability(state.get(), na, nb, &s.mass));
    check(sb_state_sector_matrix(state.get(), na, nb, c.theta_a, c.theta_b, s.matrix.data(),
                                 s.matrix.size()));
    sectors.push_back(std::move(s));
  }

  std::string text;
  if (c.format == Format::Csv) {
    text += "# splitbell probs\n";
    text += "# r=" + num(c.r) + " k_cut=" + std::to_string(k_cut) + " theta_a=" + num(c.theta_a) +
            " theta_b=" + num(c.theta_b) + " desqueeze_scale=" + num(c.desqueeze_scale) + "\n";
    text += "# boundary_mass=" + num(info.boundary_mass) + " norm_drift=" + num(info.norm_drift) + "\n";
    for (const auto& s : sectors)
      text += "# sector " + std::to_string(s.na) + "," + std::to_string(s.nb) +
              " probability=" + num(s.mass) + "\n";
    text += "N_A,N_B,k_A,k_B,p\n";
    for (const auto& s : sectors)
      for (int ka = 0; ka <= s.na; ++ka)
        for (int kb = 0; kb <= s.nb; ++kb)
          text += std::to_string(s.na) + "," + std::to_string(s.nb) + "," + std::to_string(ka) + "," +
                  std::to_string(kb) + "," +
                  num(s.matrix[static_cast<std::size_t>(ka) * (s.nb + 1) + kb]) + "\n";
  } else {
    RunConfig effective = c;
    effective.k_cut = k_cut;
    nlohmann::json j{{"command", "probs"},
                     {"config", effective},
                     {"boundary_mass", info.boundary_mass},
                     {"norm_drift", info.norm_drift}};
    j["sectors"] = nlohmann::json::array();
    for (const auto& s : sectors) {
      nlohmann::json m = nlohmann::json::array();
      for (int ka = 0; ka <= s.na; ++ka) {
        const auto first = s.matrix.begin() + static_cast<std::ptrdiff_t>(ka) * (s.nb + 1);
        m.push_back(std::vector<double>(first, first + s.nb + 1));
      }
      j["sectors"].push_back({{"N_A", s.na}, {"N_B", s.nb}, {"probability", s.mass}, {"matrix", m}});
    }
    text = j.dump(2) + "\n";
  }
  emit(c, text);
  return kExitOk;
}

// ---- validate -------------------------------------------------------------

int run_validate(const RunConfig& c) {
  const int k_cut = c.k_cut.value_or(40);
  for (int id : c.criteria)
    if (id < 1 || id > 9) throw UsageError("criteria are numbered 1 to 9");
  if (c.jobs < 1) throw UsageError("--jobs must be at least 1");
  sb_report* raw = nullptr;
  check(sb_validate(c.jobs, k_cut, c.criteria.data(), c.criteria.size(), &raw));
  std::unique_ptr<sb_report, void (*)(sb_report*)> report(raw, sb_report_free);

  const std::string json = sb_report_json(report.get());
  if (c.format == Format::Json && c.output.empty()) {
    std::cout << json << "\n";
  } else {
    const auto parsed = nlohmann::json::parse(json);
    for (const auto& chk : parsed.at("checks")) {
      std::printf("[%s] %d %s (%.1f s)\n", chk.at("passed").get<bool>() ? "PASS" : "FAIL",
                  chk.at("id").get<int>(), chk.at("name").get<std::string>().c_str(),
                  chk.at("seconds").get<double>());
      if (chk.contains("error")) std::printf("       error: %s\n", chk.at("error").get<std::string>().c_str());
      for (const auto& m : chk.at("measurements"))
        if (!m.at("passed").get<bool>())
          std::printf("       %s = %s (%s %s)\n", m.at("quantity").get<std::string>().c_str(),
                      m.at("measured").dump().c_str(), m.at("relation").get<std::string>().c_str(),
                      m.at("limit").dump().c_str());
    }
    std::fflush(stdout);
    if (!c.output.empty()) emit(c, json + "\n");
  }
  return sb_report_passed(report.get()) ? kExitOk : kExitCompute;
}

int dispatch(const RunConfig& c) {
  switch (c.subcommand) {
    case Subcommand::Exact: return run_exact(c);
    case Subcommand::Sweep: return run_records(c, false);
    case Subcommand::Fullham: return run_records(c, true);
    case Subcommand::Probs: return run_probs(c);
    case Subcommand::Validate: return run_validate(c);
  }
  return kExitUsage;
}

// ---- argument parsing -----------------------------------------------------

struct Flags {
  RunConfig cfg = RunConfig::defaults();
  std::vector<std::string> approaches;
  std::vector<double> gammas;
  std::string angles;
  std::vector<std::string> sectors;
  std::string format = "csv";
  int k_cut = 0;
  bool print_config = false;
  std::string replay;
};

std::array<double, 4> parse_angles(const std::string& s) {
  std::array<double, 4> out{};
  std::stringstream in(s);
  std::string item;
  std::size_t n = 0;
  while (std::getline(in, item, ',')) {
    if (n == 4) throw UsageError("--angles takes exactly four comma-separated values");
    try {
      std::size_t used = 0;
      out[n] = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad angle '" + item + "'");
    }
    ++n;
  }
  if (n != 4) throw UsageError("--angles takes exactly four comma-separated values");
  return out;
}

std::pair<int, int> parse_sector(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(s);
    std::size_t u1 = 0, u2 = 0;
    const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
    const int na = std::stoi(a, &u1);
    const int nb = std::stoi(b, &u2);
    if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument(s);
    return {na, nb};
  } catch (const std::exception&) {
    throw UsageError("bad sector '" + s + "' (expected N_A,N_B)");
  }
}

void add_output(CLI::App* sub, Flags& f) {
  sub->add_option("--output,-o", f.cfg.output, "Output file (default stdout)");
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--print-config", f.print_config, "Print the effective run configuration as JSON and exit");
}

void add_grid(CLI::App* sub, Flags& f) {
  sub->add_option("--r-min", f.cfg.r_min, "Smallest squeezing parameter")->capture_default_str();
  sub->add_option("--r-max", f.cfg.r_max, "Largest squeezing parameter")->capture_default_str();
  sub->add_option("--r-step", f.cfg.r_step, "Grid spacing")->capture_default_str();
}

void add_physics(CLI::App* sub, Flags& f, bool with_kcut) {
  sub->add_option("--approach", f.approaches, "I, II or III (repeatable; default all)");
  sub->add_option("--gamma", f.gammas, "Survival probability / detector efficiency (repeatable)");
  sub->add_option("--loss-kind", f.cfg.loss_kind, "loss or detector")
      ->check(CLI::IsMember({"loss", "detector"}))
      ->capture_default_str();
  sub->add_option("--angles", f.angles, "theta_A,theta_A',theta_B,theta_B' in radians");
  sub->add_option("--desqueeze-scale", f.cfg.desqueeze_scale, "Multiplier on the local desqueezing")
      ->capture_default_str();
  sub->add_option("--jobs,-j", f.cfg.jobs, "Worker threads")->capture_default_str();
  if (with_kcut) sub->add_option("--kcut", f.k_cut, "Per-mode occupation ceiling (default 12 if r_max <= 0.4, else 40)");
}

RunConfig finish(Flags& f, Subcommand sub) {
  RunConfig c = f.cfg;
  c.subcommand = sub;
  if (!f.approaches.empty()) c.approaches = f.approaches;
  if (!f.gammas.empty()) c.gammas = f.gammas;
  if (!f.angles.empty()) c.angles = parse_angles(f.angles);
  if (!f.sectors.empty()) {
    c.sectors.clear();
    for (const auto& s : f.sectors) c.sectors.push_back(parse_sector(s));
  }
  if (f.k_cut != 0) c.k_cut = f.k_cut;
  c.format = f.format == "json" ? Format::Json : Format::Csv;
  if (sub == Subcommand::Fullham && !c.k_cut) c.k_cut = c.atoms;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split two-mode-squeezed BEC Bell-test simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sb_version()));

  Flags f;
  auto* exact = app.add_subcommand("exact", "Closed-form Approach I optimum over an r grid");
  add_grid(exact, f);
  add_output(exact, f);

  auto* sweep = app.add_subcommand("sweep", "Bell quantity B over an r grid");
  add_grid(sweep, f);
  add_physics(sweep, f, true);
  add_output(sweep, f);

  auto* probs = app.add_subcommand("probs", "Per-sector probability matrices p(k_A, k_B)");
  probs->add_option("--r", f.cfg.r, "Squeezing parameter")->capture_default_str();
  probs->add_option("--sector", f.sectors, "N_A,N_B (repeatable; default 5,5 7,7 11,11 7,5)");
  probs->add_option("--theta-a", f.cfg.theta_a, "Rotation angle of well A")->capture_default_str();
  probs->add_option("--theta-b", f.cfg.theta_b, "Rotation angle of well B")->capture_default_str();
  probs->add_option("--desqueeze-scale", f.cfg.desqueeze_scale, "Multiplier on the local desqueezing")
      ->capture_default_str();
  probs->add_option("--kcut", f.k_cut, "Per-mode occupation ceiling (default 12 if r <= 0.4, else 40)");
  add_output(probs, f);

  auto* fullham = app.add_subcommand("fullham", "B from the exact six-mode Hamiltonian (r <= 0.5)");
  add_grid(fullham, f);
  add_physics(fullham, f, false);
  fullham->add_option("--N", f.cfg.atoms, "Total atom number")->capture_default_str();
  add_output(fullham, f);

  auto* validate = app.add_subcommand("validate", "Run the acceptance checks");
  validate->add_option("--criterion", f.cfg.criteria, "Criterion number 1-9 (repeatable; default all)");
  validate->add_option("--kcut", f.k_cut, "Ceiling of the full-range sweeps (default 40)");
  validate->add_option("--jobs,-j", f.cfg.jobs, "Worker threads")->capture_default_str();
  add_output(validate, f);

  auto* replay = app.add_subcommand("replay", "Run a configuration saved with --print-config");
  replay->add_option("config", f.replay, "Configuration JSON file")->required();

  // fullham defaults differ from sweep: r up to 0.5
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "fullham") {
      f.cfg.r_max = splitbell::cli::kFullhamMaxR;
      f.cfg.r_step = 0.05;
      break;
    }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    RunConfig cfg;
    if (replay->parsed()) {
      std::ifstream in(f.replay);
      if (!in) throw UsageError("cannot read '" + f.replay + "'");
      try {
        cfg = nlohmann::json::parse(in).get<RunConfig>();
      } catch (const std::exception& e) {
        throw UsageError(std::string("bad configuration: ") + e.what());
      }
    } else {
      Subcommand sub = Subcommand::Sweep;
      if (exact->parsed()) sub = Subcommand::Exact;
      else if (probs->parsed()) sub = Subcommand::Probs;
      else if (fullham->parsed()) sub = Subcommand::Fullham;
      else if (validate->parsed()) sub = Subcommand::Validate;
      cfg = finish(f, sub);
    }
    if (f.print_config) {
      std::cout << nlohmann::json(cfg).dump(2) << "\n";
      return kExitOk;
    }
    return dispatch(cfg);
  } catch (const UsageError& e) {
    std::cerr << "splitbell: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ComputeError& e) {
    std::cerr << "splitbell: " << e.what() << "\n";
    return kExitCompute;
  } catch (const std::exception& e) {
    std::cerr << "splitbell: " << e.what() << "\n";
    return kExitCompute;
  }
}
