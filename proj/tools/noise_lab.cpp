// Copyright 2026 The noise-lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// noise_lab: command-line front end for the noiselab library.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "noiselab/io.hpp"
#include "noiselab/noiselab.hpp"

namespace {

using namespace noiselab;
using io::format_double;

struct RunConfig {
  std::string space_path;
  std::string rv_path;
  std::string t_arg;
  std::string tower_arg;
  std::string table_arg;
  std::string out_path;
  std::string levels_path;
  std::uint64_t seed = 0;
  std::size_t samples = 100000;
  int p = 0;
  int m = 0;
  double tol = kDefaultOperatorTolerance;
};

std::size_t max_states_from_env() {
  const char* v = std::getenv("NOISE_LAB_MAX_STATES");
  if (v == nullptr || *v == '\0') return kDefaultMaxStates;
  char* end = nullptr;
  const unsigned long long n = std::strtoull(v, &end, 10);
  if (end == v || *end != '\0' || n == 0) fail(ErrorKind::kParse, "NOISE_LAB_MAX_STATES must be a positive integer");
  return static_cast<std::size_t>(n);
}

SpacePtr load_space(const std::string& path) {
  const std::string text = io::read_file(path);
  return io::space_from_json(io::parse_json(text, path), max_states_from_env());
}

RandomVariable load_rv(const std::string& path, const SpacePtr& space) {
  const std::string text = io::read_file(path);
  return io::rv_from_json(io::parse_json(text, path), space);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    io::write_file_atomic(out_path, content);
  }
}

double single_t(const std::string& text) {
  const auto grid = io::parse_t_grid(text);
  require(grid.size() == 1, "--t must be a single value for this command");
  require_time(grid[0]);
  return grid[0];
}

int cmd_validate(const RunConfig& cfg) {
  const auto space = load_space(cfg.space_path);
  std::cout << "ok: " << space->num_factors() << " factors, " << space->total_states()
            << " states, space_hash " << space->hash_hex() << "\n";
  return 0;
}

int cmd_decompose(const RunConfig& cfg) {
  const auto space = load_space(cfg.space_path);
  const auto x = load_rv(cfg.rv_path, space);
  const auto d = decompose(x);
  io::OutputMeta meta{space->hash_hex(), 0, false, cfg.tol};
  const double drop = cfg.tol * std::max(1.0, norm(x));
  emit(cfg.out_path, io::decomposition_to_json(d, drop, meta).dump(2) + "\n");

  std::string csv = io::csv_header(meta) + "level,weight\n";
  const auto w = level_weights(x);
  for (std::size_t n = 0; n < w.size(); ++n) csv += std::to_string(n) + "," + format_double(w[n]) + "\n";
  std::string levels = cfg.levels_path;
  if (levels.empty() && !cfg.out_path.empty() && cfg.out_path != "-") levels = cfg.out_path + ".levels.csv";
  if (levels.empty()) {
    std::cout << csv;
  } else {
    emit(levels, csv);
  }
  return 0;
}

int cmd_noise_curve(const RunConfig& cfg) {
  const auto space = load_space(cfg.space_path);
  const auto x = load_rv(cfg.rv_path, space);
  const auto grid = io::parse_t_grid(cfg.t_arg);
  const auto c = sensitivity_curves(x, grid);
  std::string csv = io::csv_header({space->hash_hex(), 0, false, cfg.tol}) + "t,dist,norm_drop,quad_form\n";
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    csv += format_double(c.t[i]) + "," + format_double(c.dist[i]) + "," + format_double(c.norm_drop[i]) + "," +
           format_double(c.quad_form[i]) + "\n";
  }
  emit(cfg.out_path, csv);
  return 0;
}

int cmd_mc_noise(const RunConfig& cfg) {
  const auto space = load_space(cfg.space_path);
  const auto x = load_rv(cfg.rv_path, space);
  const double t = single_t(cfg.t_arg);
  const auto r = mc_noise_form(x, t, cfg.samples, cfg.seed);
  const double exact = space->num_factors() <= kMaxAveragingFactors ? noise_form(x, t)
                                                                     : std::numeric_limits<double>::quiet_NaN();
  std::string csv = io::csv_header({space->hash_hex(), cfg.seed, true, cfg.tol}) +
                    "t,samples,estimate,std_error,exact\n" + format_double(t) + "," + std::to_string(r.samples) +
                    "," + format_double(r.estimate) + "," + format_double(r.std_error) + "," +
                    format_double(exact) + "\n";
  emit(cfg.out_path, csv);
  return 0;
}

int cmd_tower_check(const RunConfig& cfg) {
  const auto space = load_space(cfg.space_path);
  const auto x = load_rv(cfg.rv_path, space);
  const double t = single_t(cfg.t_arg);
  const auto tower = Tower::parse(cfg.tower_arg, space->num_factors());
  const auto forms = tower_forms(x, tower, t);
  std::string csv = io::csv_header({space->hash_hex(), 0, false, cfg.tol}) + "stage,n_form,u_form\n";
  bool ordered = true;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    csv += std::to_string(i) + "," + format_double(forms[i].n_form) + "," + format_double(forms[i].u_form) + "\n";
    if (i > 0) {
      ordered = ordered && forms[i - 1].n_form <= forms[i].n_form + cfg.tol &&
                forms[i - 1].u_form >= forms[i].u_form - cfg.tol;
    }
  }
  emit(cfg.out_path, csv);
  if (!ordered) {
    std::cerr << "error: monotonicity violated along the tower beyond tolerance " << format_double(cfg.tol) << "\n";
    return static_cast<int>(ErrorKind::kNumerical);
  }
  return 0;
}

std::pair<int, int> parse_m_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) fail(ErrorKind::kParse, "--table must look like 2..10");
  try {
    std::size_t u1 = 0, u2 = 0;
    const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
    const int lo = std::stoi(a, &u1);
    const int hi = std::stoi(b, &u2);
    if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    fail(ErrorKind::kParse, "--table must look like 2..10");
  }
}

int cmd_walk(const RunConfig& cfg) {
  const double t = single_t(cfg.t_arg);
  int lo = cfg.m;
  int hi = cfg.m;
  if (!cfg.table_arg.empty()) std::tie(lo, hi) = parse_m_range(cfg.table_arg);
  require(lo >= 1, "m must be at least 1");
  // Validate p and the cap up front so errors map to their own exit codes.
  build_walk_space(cfg.p, hi, max_states_from_env());
  const auto rows = sensitivity_decay_table(cfg.p, t, lo, hi, max_states_from_env());

  io::OutputMeta meta{"", 0, false, cfg.tol};
  std::string csv = io::csv_header(meta) + "# walk: p=" + std::to_string(cfg.p) + " t=" + format_double(t) +
                    "\n" + "m,exact,closed_form,ratio,increment_norm\n";
  bool agree = true;
  for (const auto& r : rows) {
    csv += std::to_string(r.m) + "," + format_double(r.exact) + "," + format_double(r.closed_form) + "," +
           format_double(r.ratio) + "," + format_double(r.increment_norm) + "\n";
    agree = agree && std::abs(r.exact - r.closed_form) <= cfg.tol;
  }
  // Level-one variables at the last m: increments survive as m grows, the
  // tail functions of X_{m-1} are artefacts of truncation.
  const auto ws = build_walk_space(cfg.p, hi, max_states_from_env());
  const auto basis = walk_h1_basis(ws);
  csv += "# h1 at m=" + std::to_string(hi) + ": " + std::to_string(basis.increments.size()) +
         " increments (persist as m grows), " + std::to_string(basis.tail_functions.size()) +
         " mean-zero functions of X_{m-1} (truncation only)\n";
  emit(cfg.out_path, csv);
  if (!agree) {
    std::cerr << "error: exact and closed-form norms differ beyond tolerance " << format_double(cfg.tol) << "\n";
    return static_cast<int>(ErrorKind::kNumerical);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noise_lab: noise operators, Efron-Stein decompositions and sensitivity on finite product spaces.\n"
               "Exit codes: 0 ok, 1 parse error, 2 validation error, 3 numerical tolerance failure, "
               "4 state cap exceeded.\nEnvironment: NOISE_LAB_MAX_STATES overrides the state cap (default 16777216)."};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--tol", cfg.tol, "Tolerance for numerical checks")->capture_default_str();

  auto add_space = [&](CLI::App* sub) { sub->add_option("--space", cfg.space_path, "Space JSON file")->required(); };
  auto add_rv = [&](CLI::App* sub) { sub->add_option("--rv", cfg.rv_path, "Random variable JSON file")->required(); };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", cfg.out_path, "Output file (stdout when omitted)"); };
  auto add_tol = [&](CLI::App* sub) { sub->add_option("--tol", cfg.tol, "Tolerance for numerical checks"); };

  auto* validate = app.add_subcommand("validate", "Validate a space JSON file");
  add_space(validate);

  auto* decomp = app.add_subcommand("decompose", "Efron-Stein components and level weights");
  add_space(decomp);
  add_rv(decomp);
  add_out(decomp);
  add_tol(decomp);
  decomp->add_option("--levels", cfg.levels_path, "Level-weight CSV (default <out>.levels.csv)");

  auto* curve = app.add_subcommand("noise-curve", "Sensitivity functionals on a t grid");
  add_space(curve);
  add_rv(curve);
  add_out(curve);
  add_tol(curve);
  curve->add_option("--t", cfg.t_arg, "t grid: start:step:stop, comma list, or single value")->required();

  auto* mc = app.add_subcommand("mc-noise", "Monte Carlo estimate of <(1-U_t)X,X>");
  add_space(mc);
  add_rv(mc);
  add_out(mc);
  add_tol(mc);
  mc->add_option("--t", cfg.t_arg, "Noise time t")->required();
  mc->add_option("--samples", cfg.samples, "Number of samples")->capture_default_str();
  mc->add_option("--seed", cfg.seed, "64-bit seed")->required();

  auto* tower = app.add_subcommand("tower-check", "Quadratic forms along a refinement tower");
  add_space(tower);
  add_rv(tower);
  add_out(tower);
  add_tol(tower);
  tower->add_option("--tower", cfg.tower_arg, "Stages separated by ';', blocks by '|', e.g. \"0,1|2;0|1|2\"")
      ->required();
  tower->add_option("--t", cfg.t_arg, "Noise time t")->required();

  auto* walk = app.add_subcommand("walk", "Character decay for the random walk on Z_p");
  add_out(walk);
  add_tol(walk);
  walk->add_option("--p", cfg.p, "Odd modulus >= 3")->required();
  walk->add_option("--m", cfg.m, "Number of atoms");
  walk->add_option("--t", cfg.t_arg, "Noise time t")->required();
  walk->add_option("--table", cfg.table_arg, "Range of m, e.g. 2..10");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kParse);
  }

  try {
    if (*validate) return cmd_validate(cfg);
    if (*decomp) return cmd_decompose(cfg);
    if (*curve) return cmd_noise_curve(cfg);
    if (*mc) return cmd_mc_noise(cfg);
    if (*tower) return cmd_tower_check(cfg);
    if (*walk) {
      if (cfg.m == 0 && cfg.table_arg.empty()) fail(ErrorKind::kParse, "walk needs --m or --table");
      if (cfg.m == 0) cfg.m = 1;
      return cmd_walk(cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kParse);
  }
  return 0;
}
