// Copyright 2026 The pwdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Experiment configuration and the commands behind the pwdyn CLI.
 *
 * Each command turns a validated ExperimentConfig into named tables. Tables
 * carry every resolved parameter as metadata and contain no timestamps, host
 * names or thread counts, so a rerun with the same config is byte-identical.
 * Sites are 1-based in configs and tables, 0-based everywhere else.
 */

#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pwdyn/dense_engine.hpp"
#include "pwdyn/errors.hpp"
#include "pwdyn/gate_analysis.hpp"
#include "pwdyn/io.hpp"
#include "pwdyn/lattice.hpp"
#include "pwdyn/mc_engine.hpp"
#include "pwdyn/mean_field.hpp"
#include "pwdyn/mps_engine.hpp"
#include "pwdyn/parallel.hpp"
#include "pwdyn/transfer_matrix.hpp"

#ifndef PWDYN_VERSION
#define PWDYN_VERSION "0.1.0"
#endif

namespace pwdyn {

enum class Engine { dense, mps, mc, meanfield };
enum class GateKind { dual_unitary, clifford, general };
enum class InitialKind { single, contiguous, full };
enum class Format { csv, json };

inline const char* engine_name(Engine e) {
  switch (e) {
    case Engine::dense: return "dense";
    case Engine::mps: return "mps";
    case Engine::mc: return "mc";
    case Engine::meanfield: return "meanfield";
  }
  return "?";
}

inline const char* gate_kind_name(GateKind g) {
  switch (g) {
    case GateKind::dual_unitary: return "dual_unitary";
    case GateKind::clifford: return "clifford";
    case GateKind::general: return "general";
  }
  return "?";
}

inline const char* initial_name(InitialKind i) {
  switch (i) {
    case InitialKind::single: return "single";
    case InitialKind::contiguous: return "contiguous";
    case InitialKind::full: return "full";
  }
  return "?";
}

/// Keys accepted in config files and as --key flags.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "engine",  "gate",   "alpha",    "j",      "i1",     "i2",        "n",
      "depth",   "boundary", "initial", "site",  "k",      "center",    "samples",
      "seed",    "max_bond", "cutoff",  "threads", "output", "format",  "alphas",
      "ks",      "times",  "gate_file", "gate_name"};
  return keys;
}

namespace detail {

inline double parse_number(const std::string& key, const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  const auto r = std::from_chars(b, e, v);
  if (s.empty() || r.ec != std::errc() || r.ptr != e) {
    throw ConfigError("'" + key + "': cannot parse '" + s + "' as a number");
  }
  return v;
}

// A term is a decimal number or [coefficient]pi, e.g. "0.25", "pi", "-2pi".
inline double parse_term(const std::string& key, const std::string& s) {
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    const std::string c = s.substr(0, s.size() - 2);
    const double coef = c.empty() ? 1.0 : (c == "-" ? -1.0 : parse_number(key, c));
    return coef * std::numbers::pi;
  }
  return parse_number(key, s);
}

/// Reals accept an optional single division: "1/3", "pi/8".
inline double parse_real(const std::string& key, const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_term(key, s);
  const double den = parse_term(key, s.substr(slash + 1));
  if (den == 0.0) throw ConfigError("'" + key + "': division by zero in '" + s + "'");
  return parse_term(key, s.substr(0, slash)) / den;
}

inline std::int64_t parse_int(const std::string& key, const std::string& s) {
  std::int64_t v = 0;
  const char* e = s.data() + s.size();
  const auto r = std::from_chars(s.data(), e, v);
  if (s.empty() || r.ec != std::errc() || r.ptr != e) {
    throw ConfigError("'" + key + "': cannot parse '" + s + "' as an integer");
  }
  return v;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(io::trim(item));
  return out;
}

inline std::vector<double> parse_real_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_real(key, item));
  if (out.empty()) throw ConfigError("'" + key + "': empty list");
  return out;
}

/// Comma-separated integers; "a:b" expands to the inclusive range.
inline std::vector<int> parse_int_list(const std::string& key, const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      out.push_back(int(parse_int(key, item)));
      continue;
    }
    const auto lo = parse_int(key, item.substr(0, colon));
    const auto hi = parse_int(key, item.substr(colon + 1));
    if (hi < lo) throw ConfigError("'" + key + "': empty range '" + item + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(int(v));
  }
  if (out.empty()) throw ConfigError("'" + key + "': empty list");
  return out;
}

template <class E>
E parse_choice(const std::string& key, const std::string& s,
               std::initializer_list<std::pair<const char*, E>> choices) {
  std::string allowed;
  for (const auto& [name, v] : choices) {
    if (s == name) return v;
    allowed += (allowed.empty() ? "" : "|") + std::string(name);
  }
  throw ConfigError("'" + key + "': expected " + allowed + ", got '" + s + "'");
}

}  // namespace detail

struct ExperimentConfig {
  Engine engine = Engine::dense;
  GateKind gate = GateKind::dual_unitary;
  std::optional<double> alpha, j, i1, i2;
  int n = 12;
  int depth = 10;
  Boundary boundary = Boundary::open;
  InitialKind initial = InitialKind::full;
  std::optional<int> site;    ///< 1-based
  std::optional<int> k;
  std::optional<int> center;  ///< 1-based; default n/2 + 1
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = 1;
  int max_bond = kDefaultMaxBond;
  double cutoff = kDefaultCutoff;
  unsigned threads = 0;
  std::string output;  ///< path prefix; empty selects the default directory
  Format format = Format::csv;
  std::vector<double> alphas;
  std::vector<int> ks;
  std::vector<int> times;
  std::string gate_file, gate_name;

  bool has_alpha() const { return alpha.has_value() || j.has_value(); }

  /// Dual-unitary alpha, from `alpha` or via alpha_from_j.
  double resolved_alpha() const {
    if (gate != GateKind::dual_unitary) throw ConfigError("alpha needs gate = dual_unitary");
    if (alpha) return *alpha;
    if (j) return alpha_from_j(*j);
    throw ConfigError("dual_unitary gate needs exactly one of alpha or j");
  }

  TransferMatrix tm() const {
    switch (gate) {
      case GateKind::dual_unitary: return dual_unitary_tm(resolved_alpha());
      case GateKind::clifford: return clifford_tm();
      case GateKind::general: return general_tm({*i1, *i2});
    }
    throw ConfigError("unknown gate");
  }

  int center0() const { return center ? *center - 1 : n / 2; }

  SupportPattern pattern() const {
    switch (initial) {
      case InitialKind::single: return SupportPattern::single(n, *site - 1);
      case InitialKind::contiguous: return SupportPattern::contiguous(n, *k, center0());
      case InitialKind::full: return SupportPattern::full(n);
    }
    throw ConfigError("unknown initial state");
  }

  BrickwallSpec spec() const {
    BrickwallSpec s;
    s.n = n;
    s.depth = depth;
    s.boundary = boundary;
    s.tm = tm();
    return s;
  }

  /// Checks that hold for every command; commands add their own.
  void validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (n < 2) fail("n must be at least 2");
    if (depth < 0) fail("depth must be non-negative");
    if (boundary == Boundary::periodic && n % 2 != 0) fail("periodic boundary needs even n");
    if (alpha && j) fail("give exactly one of alpha or j");
    if (gate != GateKind::dual_unitary && has_alpha()) {
      fail("alpha and j apply only to gate = dual_unitary");
    }
    if (alpha && !(*alpha >= 0.0 && *alpha <= 2.0 / 3.0)) fail("alpha must lie in [0, 2/3]");
    if (gate == GateKind::general) {
      if (!i1 || !i2) fail("gate = general needs i1 and i2");
    } else if (i1 || i2) {
      fail("i1 and i2 apply only to gate = general");
    }
    switch (engine) {
      case Engine::mc:
        if (!samples) fail("engine = mc needs samples");
        break;
      case Engine::mps:
        if (boundary != Boundary::open) fail("engine = mps needs boundary = open");
        break;
      case Engine::dense:
        if (n > kDenseMaxSites) fail("engine = dense needs n <= " + std::to_string(kDenseMaxSites));
        break;
      case Engine::meanfield:
        if (gate != GateKind::dual_unitary) fail("engine = meanfield needs gate = dual_unitary");
        break;
    }
    if (samples && *samples == 0) fail("samples must be positive");
    if (max_bond < 1) fail("max_bond must be positive");
    if (!(cutoff >= 0.0)) fail("cutoff must be non-negative");
    switch (initial) {
      case InitialKind::single:
        if (!site) fail("initial = single needs site");
        if (*site < 1 || *site > n) fail("site must lie in 1..n");
        if (k || center) fail("k and center apply only to initial = contiguous");
        break;
      case InitialKind::contiguous: {
        if (!k) fail("initial = contiguous needs k");
        if (*k < 1 || *k > n) fail("k must lie in 1..n");
        const int lo = center0() - *k / 2;
        if (lo < 0 || lo + *k > n) fail("contiguous support does not fit in 1..n");
        if (site) fail("site applies only to initial = single");
        break;
      }
      case InitialKind::full:
        if (site || k || center) fail("site, k and center do not apply to initial = full");
        break;
    }
    for (double a : alphas) {
      if (!(a > 0.0 && a <= 2.0 / 3.0)) fail("alphas entries must lie in (0, 2/3]");
    }
    for (int kk : ks) {
      if (kk < 1 || kk > n) fail("ks entries must lie in 1..n");
    }
    for (int t : times) {
      if (t < 0) fail("times entries must be non-negative");
    }
  }

  /// Resolved parameters for table metadata; excludes output and threads,
  /// which do not affect results.
  std::vector<std::pair<std::string, std::string>> describe() const {
    using io::format_double;
    std::vector<std::pair<std::string, std::string>> d;
    d.emplace_back("engine", engine_name(engine));
    d.emplace_back("gate", gate_kind_name(gate));
    if (j) d.emplace_back("j", format_double(*j));
    if (gate == GateKind::dual_unitary && has_alpha()) {
      d.emplace_back("alpha", format_double(resolved_alpha()));
    }
    if (i1) d.emplace_back("i1", format_double(*i1));
    if (i2) d.emplace_back("i2", format_double(*i2));
    d.emplace_back("n", std::to_string(n));
    d.emplace_back("depth", std::to_string(depth));
    d.emplace_back("boundary", boundary_name(boundary));
    d.emplace_back("initial", initial_name(initial));
    if (site) d.emplace_back("site", std::to_string(*site));
    if (k) d.emplace_back("k", std::to_string(*k));
    if (initial == InitialKind::contiguous) d.emplace_back("center", std::to_string(center0() + 1));
    if (samples) d.emplace_back("samples", std::to_string(*samples));
    d.emplace_back("seed", std::to_string(seed));
    d.emplace_back("max_bond", std::to_string(max_bond));
    d.emplace_back("cutoff", format_double(cutoff));
    auto join = [](const auto& v, auto fmt) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : ",") + fmt(x);
      return s;
    };
    if (!alphas.empty()) d.emplace_back("alphas", join(alphas, format_double));
    if (!ks.empty()) d.emplace_back("ks", join(ks, [](int x) { return std::to_string(x); }));
    if (!times.empty()) d.emplace_back("times", join(times, [](int x) { return std::to_string(x); }));
    if (!gate_file.empty()) d.emplace_back("gate_file", gate_file);
    if (!gate_name.empty()) d.emplace_back("gate_name", gate_name);
    return d;
  }
};

/// Builds and validates a config; unknown keys are errors.
inline ExperimentConfig config_from_keys(const io::KeyValues& kv) {
  using namespace detail;
  ExperimentConfig c;
  for (const auto& [key, v] : kv) {
    if (key == "engine") {
      c.engine = parse_choice<Engine>(key, v, {{"dense", Engine::dense}, {"mps", Engine::mps},
                                               {"mc", Engine::mc},
                                               {"meanfield", Engine::meanfield}});
    } else if (key == "gate") {
      c.gate = parse_choice<GateKind>(key, v, {{"dual_unitary", GateKind::dual_unitary},
                                               {"clifford", GateKind::clifford},
                                               {"general", GateKind::general}});
    } else if (key == "alpha") {
      c.alpha = parse_real(key, v);
    } else if (key == "j") {
      c.j = parse_real(key, v);
    } else if (key == "i1") {
      c.i1 = parse_real(key, v);
    } else if (key == "i2") {
      c.i2 = parse_real(key, v);
    } else if (key == "n") {
      c.n = int(parse_int(key, v));
    } else if (key == "depth") {
      c.depth = int(parse_int(key, v));
    } else if (key == "boundary") {
      c.boundary = parse_boundary(v);
    } else if (key == "initial") {
      c.initial = parse_choice<InitialKind>(key, v, {{"single", InitialKind::single},
                                                     {"contiguous", InitialKind::contiguous},
                                                     {"full", InitialKind::full}});
    } else if (key == "site") {
      c.site = int(parse_int(key, v));
    } else if (key == "k") {
      c.k = int(parse_int(key, v));
    } else if (key == "center") {
      c.center = int(parse_int(key, v));
    } else if (key == "samples") {
      const auto s = parse_int(key, v);
      if (s < 1) throw ConfigError("samples must be positive");
      c.samples = std::uint64_t(s);
    } else if (key == "seed") {
      const auto s = parse_int(key, v);
      if (s < 0) throw ConfigError("seed must be non-negative");
      c.seed = std::uint64_t(s);
    } else if (key == "max_bond") {
      c.max_bond = int(parse_int(key, v));
    } else if (key == "cutoff") {
      c.cutoff = parse_real(key, v);
    } else if (key == "threads") {
      const auto t = parse_int(key, v);
      if (t < 0) throw ConfigError("threads must be non-negative");
      c.threads = unsigned(t);
    } else if (key == "output") {
      c.output = v;
    } else if (key == "format") {
      c.format = parse_choice<Format>(key, v, {{"csv", Format::csv}, {"json", Format::json}});
    } else if (key == "alphas") {
      c.alphas = parse_real_list(key, v);
    } else if (key == "ks") {
      c.ks = parse_int_list(key, v);
    } else if (key == "times") {
      c.times = parse_int_list(key, v);
    } else if (key == "gate_file") {
      c.gate_file = v;
    } else if (key == "gate_name") {
      c.gate_name = v;
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

struct CommandResult {
  std::vector<io::Table> tables;
  bool ok = true;  ///< false only when a compare tolerance failed
  std::string message;
};

namespace detail {

inline io::Table make_table(const std::string& command, const std::string& name,
                            const ExperimentConfig& cfg, std::vector<std::string> columns) {
  io::Table t;
  t.name = name;
  t.metadata.emplace_back("command", command);
  t.metadata.emplace_back("pwdyn_version", PWDYN_VERSION);
  t.metadata.emplace_back("eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                               std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                               std::to_string(EIGEN_MINOR_VERSION));
  for (auto& kv : cfg.describe()) t.metadata.push_back(std::move(kv));
  t.columns = std::move(columns);
  return t;
}

inline void require_config(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

/// beta = shadow_norm^(1/k) for a size-k support; 1 for the identity.
inline double beta_of(double log_weight, int k) {
  return k == 0 ? 1.0 : std::exp(-log_weight / k);
}

/// Occupation profiles and log Pauli weights at t = 0..depth.
struct ExactSeries {
  std::vector<std::vector<double>> rho;
  std::vector<double> log_weight;
  std::vector<int> bond;
  std::vector<double> trunc, discarded;
};

inline ExactSeries exact_series(Engine engine, const BrickwallSpec& spec,
                                const SupportPattern& p, int max_bond, double cutoff,
                                unsigned threads, bool want_rho = true) {
  ExactSeries out;
  if (engine == Engine::dense) {
    evolve(
        spec, p,
        [&](const WeightState& s) {
          if (want_rho) out.rho.push_back(occupation_profile(s));
          out.log_weight.push_back(std::log(pauli_weight(s)));
        },
        threads);
    return out;
  }
  require_config(engine == Engine::mps, "this command needs engine = dense or mps");
  if (want_rho) {
    mps_evolve(spec, p, max_bond, cutoff, [&](const MpsWeightState& s) {
      out.rho.push_back(mps_occupation_profile(s));
      out.bond.push_back(s.max_bond_used());
      out.trunc.push_back(s.cumulative_trunc_error());
    });
  }
  mps_evolve_tilted(spec, p, max_bond, cutoff, [&](const MpsWeightState& s) {
    out.log_weight.push_back(mps_log_pauli_weight(s));
    out.discarded.push_back(s.cumulative_trunc_error());
    if (!want_rho) out.bond.push_back(s.max_bond_used());
  });
  return out;
}

}  // namespace detail

inline CommandResult cmd_evolve(const ExperimentConfig& cfg) {
  using detail::make_table;
  const auto spec = cfg.spec();
  const auto p = cfg.pattern();
  const int k = p.count();
  const bool mc = cfg.engine == Engine::mc;
  const bool mps = cfg.engine == Engine::mps;
  std::vector<std::string> occ_cols{"x", "t", "rho"};
  std::vector<std::string> w_cols{"t", "pauli_weight", "shadow_norm", "beta"};
  if (mc) {
    occ_cols.push_back("stderr");
    w_cols.push_back("stderr");
  }
  if (mps) {
    w_cols.insert(w_cols.end(), {"max_bond_used", "trunc_error", "weight_discarded"});
  }
  auto occ = make_table("evolve", "occupation", cfg, occ_cols);
  auto wt = make_table("evolve", "weight", cfg, w_cols);

  if (mc) {
    const auto f = estimate_occupation(spec, p, *cfg.samples, cfg.seed, cfg.threads);
    const auto w = estimate_pauli_weight_series(spec, p, *cfg.samples, cfg.seed, cfg.threads);
    for (int t = 0; t <= spec.depth; ++t) {
      for (int x = 0; x < spec.n; ++x) {
        occ.add_row({std::int64_t(x + 1), std::int64_t(t), f.at(x, t), f.err(x, t)});
      }
      const double lw = std::log(w[t].mean);
      wt.add_row({std::int64_t(t), w[t].mean, 1.0 / w[t].mean, detail::beta_of(lw, k),
                  w[t].stderr_});
    }
  } else if (cfg.engine == Engine::meanfield) {
    std::vector<double> row0(p.bits().begin(), p.bits().end());
    const auto g = mf_evolve(row0, cfg.resolved_alpha(), spec.depth, spec.boundary);
    for (int t = 0; t <= spec.depth; ++t) {
      double lw = 0.0;
      for (int x = 0; x < spec.n; ++x) {
        occ.add_row({std::int64_t(x + 1), std::int64_t(t), g.at(x, t)});
        lw += std::log1p(-2.0 * g.at(x, t) / 3.0);
      }
      wt.add_row({std::int64_t(t), std::exp(lw), std::exp(-lw), detail::beta_of(lw, k)});
    }
  } else {
    const auto s = detail::exact_series(cfg.engine, spec, p, cfg.max_bond, cfg.cutoff,
                                        cfg.threads);
    for (int t = 0; t <= spec.depth; ++t) {
      for (int x = 0; x < spec.n; ++x) {
        occ.add_row({std::int64_t(x + 1), std::int64_t(t), s.rho[t][x]});
      }
      const double lw = s.log_weight[t];
      std::vector<io::Cell> row{std::int64_t(t), std::exp(lw), std::exp(-lw),
                                detail::beta_of(lw, k)};
      if (mps) {
        row.insert(row.end(), {std::int64_t(s.bond[t]), s.trunc[t], s.discarded[t]});
      }
      wt.add_row(std::move(row));
    }
  }
  return {{std::move(occ), std::move(wt)}, true, ""};
}

/// Full-support beta(t) for each alpha, next to a Clifford run on the same
/// engine, the continuum mean-field curve and the fitted Clifford reference.
inline CommandResult cmd_beta_scan(const ExperimentConfig& cfg) {
  detail::require_config(cfg.initial == InitialKind::full, "beta-scan needs initial = full");
  detail::require_config(cfg.engine == Engine::dense || cfg.engine == Engine::mps,
                         "beta-scan needs engine = dense or mps");
  detail::require_config(cfg.depth >= 1, "beta-scan needs depth >= 1");
  std::vector<double> alphas = cfg.alphas;
  if (alphas.empty()) {
    alphas = cfg.has_alpha() ? std::vector<double>{cfg.resolved_alpha()}
                             : std::vector<double>{1.0 / 3.0, 0.5, 2.0 / 3.0};
  }
  const int n = cfg.n;
  BrickwallSpec spec;
  spec.n = n;
  spec.depth = cfg.depth;
  spec.boundary = cfg.boundary;
  const auto p = SupportPattern::full(n);

  spec.tm = clifford_tm();
  const auto cl = detail::exact_series(cfg.engine, spec, p, cfg.max_bond, cfg.cutoff,
                                       cfg.threads);
  // The reference constant is fitted on the Clifford run's centre site.
  const int t_lo = std::min(5, cfg.depth), t_hi = std::min(25, cfg.depth);
  std::vector<double> ts, rho_c;
  for (int t = t_lo; t <= t_hi; ++t) {
    ts.push_back(t);
    rho_c.push_back(cl.rho[t][n / 2]);
  }
  const double c = fit_clifford_constant(ts, rho_c);

  std::vector<std::vector<double>> logw(alphas.size());
  std::vector<double> aprime(alphas.size());
  parallel_for(alphas.size(), cfg.threads, [&](std::size_t i) {
    BrickwallSpec s = spec;
    s.tm = dual_unitary_tm(alphas[i]);
    logw[i] = detail::exact_series(cfg.engine, s, p, cfg.max_bond, cfg.cutoff, 1, false)
                  .log_weight;
    aprime[i] = fit_alpha_prime(alphas[i]);
  });

  auto table = detail::make_table("beta-scan", "beta", cfg,
                                  {"alpha", "t", "beta", "beta_clifford", "beta_mft",
                                   "beta_clifford_ref"});
  table.metadata.emplace_back("clifford_c", io::format_double(c));
  table.metadata.emplace_back("clifford_fit_window",
                              std::to_string(t_lo) + ":" + std::to_string(t_hi));
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    for (int t = 1; t <= cfg.depth; ++t) {
      table.add_row({alphas[i], std::int64_t(t), detail::beta_of(logw[i][t], n),
                     detail::beta_of(cl.log_weight[t], n), beta_mft(t, alphas[i], aprime[i]),
                     clifford_beta_reference(t, c)});
    }
  }
  return {{std::move(table)}, true, ""};
}

/// Optimal depth for contiguous supports, fits t* = a log k per alpha, then
/// a = c alpha^b across alphas.
inline CommandResult cmd_opt_depth(const ExperimentConfig& cfg) {
  detail::require_config(cfg.engine == Engine::dense || cfg.engine == Engine::mps,
                         "opt-depth needs engine = dense or mps");
  detail::require_config(cfg.boundary == Boundary::open, "opt-depth needs boundary = open");
  detail::require_config(cfg.depth >= 1, "opt-depth needs depth >= 1 (the scanned t_max)");
  std::vector<double> alphas = cfg.alphas;
  if (alphas.empty()) alphas = {0.2, 0.3, 0.4, 0.5, 0.6, 0.65};
  std::vector<int> ks = cfg.ks;
  if (ks.empty()) ks = {4, 8, 16, 32, 64};
  detail::require_config(alphas.size() >= 2, "opt-depth needs at least two alphas");
  detail::require_config(ks.size() >= 2, "opt-depth needs at least two ks");
  for (int k : ks) detail::require_config(k >= 2, "opt-depth needs ks >= 2");
  const auto engine = cfg.engine == Engine::dense ? DepthEngine::dense : DepthEngine::mps;

  const std::size_t nk = ks.size();
  std::vector<int> tstar(alphas.size() * nk);
  parallel_for(tstar.size(), cfg.threads, [&](std::size_t i) {
    tstar[i] = optimal_depth(ks[i % nk], alphas[i / nk], cfg.n, engine, cfg.depth,
                             cfg.max_bond, cfg.cutoff);
  });

  auto points = detail::make_table("opt-depth", "t_star", cfg, {"alpha", "k", "t_star", "at_edge"});
  auto fits = detail::make_table("opt-depth", "fit", cfg,
                                 {"alpha", "a", "affine_slope", "affine_intercept"});
  auto expo = detail::make_table("opt-depth", "exponent", cfg, {"method", "c", "b"});
  std::vector<double> a_origin, a_affine;
  for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
    std::vector<double> lk, ts;
    for (std::size_t ik = 0; ik < nk; ++ik) {
      const int t = tstar[ia * nk + ik];
      // A minimum on the last scanned depth may lie beyond the scan.
      points.add_row({alphas[ia], std::int64_t(ks[ik]), std::int64_t(t),
                      std::string(t == cfg.depth ? "true" : "false")});
      lk.push_back(std::log(double(ks[ik])));
      ts.push_back(t);
    }
    const double a = fit_through_origin(lk, ts);
    const auto line = fit_line(lk, ts);
    fits.add_row({alphas[ia], a, line.slope, line.intercept});
    a_origin.push_back(a);
    a_affine.push_back(line.slope);
  }
  auto add_exponent = [&](const char* method, const std::vector<double>& a) {
    if (std::all_of(a.begin(), a.end(), [](double v) { return v > 0.0; })) {
      const auto pl = fit_power_law(alphas, a);
      expo.add_row({std::string(method), pl.c, pl.b});
    } else {
      expo.add_row({std::string(method), std::string("nan"), std::string("nan")});
    }
  };
  add_exponent("origin", a_origin);
  add_exponent("affine", a_affine);
  return {{std::move(points), std::move(fits), std::move(expo)}, true, ""};
}

/// rho - 3/4 per site for the configured dual-unitary gate and for Clifford.
inline CommandResult cmd_boundary(const ExperimentConfig& cfg) {
  detail::require_config(cfg.initial == InitialKind::full, "boundary needs initial = full");
  detail::require_config(cfg.boundary == Boundary::open, "boundary needs boundary = open");
  detail::require_config(cfg.engine == Engine::dense || cfg.engine == Engine::mps,
                         "boundary needs engine = dense or mps");
  std::vector<int> times = cfg.times;
  if (times.empty()) times = {2, 4, 6};
  BrickwallSpec spec;
  spec.n = cfg.n;
  spec.depth = *std::max_element(times.begin(), times.end());
  spec.boundary = Boundary::open;
  const auto p = SupportPattern::full(cfg.n);
  spec.tm = dual_unitary_tm(cfg.resolved_alpha());
  const auto du = detail::exact_series(cfg.engine, spec, p, cfg.max_bond, cfg.cutoff, cfg.threads);
  spec.tm = clifford_tm();
  const auto cl = detail::exact_series(cfg.engine, spec, p, cfg.max_bond, cfg.cutoff, cfg.threads);

  auto sites = detail::make_table("boundary", "deviation", cfg,
                                  {"x", "t", "dev_dual_unitary", "dev_clifford"});
  auto summary = detail::make_table("boundary", "max_deviation", cfg,
                                    {"t", "max_dev_dual_unitary", "max_dev_clifford"});
  for (int t : times) {
    double mdu = 0.0, mcl = 0.0;
    for (int x = 0; x < cfg.n; ++x) {
      const double a = du.rho[t][x] - 0.75, b = cl.rho[t][x] - 0.75;
      sites.add_row({std::int64_t(x + 1), std::int64_t(t), a, b});
      mdu = std::max(mdu, std::abs(a));
      mcl = std::max(mcl, std::abs(b));
    }
    summary.add_row({std::int64_t(t), mdu, mcl});
  }
  return {{std::move(sites), std::move(summary)}, true, ""};
}

/// Per-depth check of beta^-1 <= 1 - 2 rho / 3 on a full-support run.
inline CommandResult cmd_appendix(const ExperimentConfig& cfg) {
  detail::require_config(cfg.initial == InitialKind::full, "appendix needs initial = full");
  if (cfg.engine == Engine::dense) {
    detail::require_config(cfg.boundary == Boundary::periodic && cfg.n <= 14,
                           "appendix with engine = dense needs boundary = periodic, n <= 14");
  } else {
    detail::require_config(cfg.engine == Engine::mps, "appendix needs engine = dense or mps");
  }
  const auto spec = cfg.spec();
  const auto s = detail::exact_series(cfg.engine, spec, SupportPattern::full(cfg.n),
                                      cfg.max_bond, cfg.cutoff, cfg.threads);
  auto table = detail::make_table("appendix", "bound", cfg,
                                  {"t", "rho_center", "beta_inv", "bound", "slack", "sigma2"});
  for (int t = 0; t <= cfg.depth; ++t) {
    const auto& r = s.rho[t];
    // Periodic runs are translation invariant up to layer parity: use the
    // site average. Open runs use the centre site.
    double rho = 0.0;
    if (cfg.boundary == Boundary::periodic) {
      for (double v : r) rho += v;
      rho /= cfg.n;
    } else {
      rho = r[cfg.n / 2];
    }
    const double beta_inv = std::exp(s.log_weight[t] / cfg.n);
    const auto ab = appendix_bounds(rho, beta_inv);
    table.add_row({std::int64_t(t), rho, beta_inv, 1.0 - 2.0 * rho / 3.0, ab.slack, ab.sigma2});
  }
  return {{std::move(table)}, true, ""};
}

inline GateMatrix named_gate(const std::string& name) {
  if (name == "identity") return gates::identity();
  if (name == "swap") return gates::swap();
  if (name == "iswap") return gates::iswap();
  if (name == "cnot") return gates::cnot();
  if (name == "cz") return gates::cz();
  throw ConfigError("unknown gate_name '" + name + "' (identity|swap|iswap|cnot|cz)");
}

inline CommandResult cmd_gate_analyze(const ExperimentConfig& cfg) {
  const int sources = int(!cfg.gate_file.empty()) + int(!cfg.gate_name.empty()) +
                      int(cfg.j.has_value());
  detail::require_config(sources == 1, "gate-analyze needs exactly one of gate_file, gate_name, j");
  detail::require_config(!cfg.alpha, "gate-analyze takes j, not alpha");
  GateMatrix g;
  if (!cfg.gate_file.empty()) {
    g = load_gate(cfg.gate_file);
  } else if (!cfg.gate_name.empty()) {
    g = named_gate(cfg.gate_name);
  } else {
    g = build_v(*cfg.j);
  }
  const auto r = analyze_gate(g);
  auto table = detail::make_table("gate-analyze", "gate", cfg, {"i1", "i2", "feasible", "alpha"});
  table.add_row({r.coords.i1, r.coords.i2, std::string(r.feasible ? "true" : "false"),
                 r.dual_unitary ? io::Cell(r.alpha) : io::Cell(std::string())});
  return {{std::move(table)}, true, ""};
}

/// Runs every applicable engine on one config and checks the agreement
/// matrix: dense/mps to 1e-10, dense/mc within 3 standard errors on >= 99%
/// of points, meanfield/mc within 0.02 for single-site dual-unitary runs.
inline CommandResult cmd_compare(const ExperimentConfig& cfg) {
  detail::require_config(cfg.samples.has_value(), "compare needs samples for the mc engine");
  detail::require_config(cfg.n <= kDenseMaxSites, "compare needs n <= 26 for the dense engine");
  const auto spec = cfg.spec();
  const auto p = cfg.pattern();
  const int n = cfg.n, depth = cfg.depth;
  const auto dense = detail::exact_series(Engine::dense, spec, p, 0, 0.0, cfg.threads);

  auto table = detail::make_table("compare", "checks", cfg,
                                  {"pair", "metric", "value", "threshold", "status"});
  bool ok = true;
  std::string failed;
  auto record = [&](const std::string& pair, const std::string& metric, double value,
                    double threshold) {
    const bool pass = value <= threshold;
    table.add_row({pair, metric, value, threshold, std::string(pass ? "pass" : "fail")});
    if (!pass) {
      ok = false;
      failed += (failed.empty() ? "" : ", ") + pair + " " + metric;
    }
  };
  auto skip = [&](const std::string& pair, const std::string& why) {
    table.add_row({pair, why, std::string(""), std::string(""), std::string("skipped")});
  };

  if (cfg.boundary == Boundary::open) {
    const auto m = detail::exact_series(Engine::mps, spec, p, cfg.max_bond, cfg.cutoff, 1);
    double drho = 0.0, dlw = 0.0;
    for (int t = 0; t <= depth; ++t) {
      for (int x = 0; x < n; ++x) drho = std::max(drho, std::abs(m.rho[t][x] - dense.rho[t][x]));
      dlw = std::max(dlw, std::abs(m.log_weight[t] - dense.log_weight[t]));
    }
    record("dense/mps", "max_abs_rho", drho, 1e-10);
    record("dense/mps", "max_abs_log_weight", dlw, 1e-10);
  } else {
    skip("dense/mps", "periodic boundary");
  }

  const auto f = estimate_occupation(spec, p, *cfg.samples, cfg.seed, cfg.threads);
  const auto w = estimate_pauli_weight_series(spec, p, *cfg.samples, cfg.seed, cfg.threads);
  int points = 0, misses = 0;
  auto check = [&](double est, double se, double exact) {
    ++points;
    const double d = std::abs(est - exact);
    if (se == 0.0 ? d > 1e-12 : d > 3.0 * se) ++misses;
  };
  for (int t = 0; t <= depth; ++t) {
    for (int x = 0; x < n; ++x) check(f.at(x, t), f.err(x, t), dense.rho[t][x]);
    check(w[t].mean, w[t].stderr_, std::exp(dense.log_weight[t]));
  }
  record("dense/mc", "fraction_outside_3se", double(misses) / points, 0.01);

  if (cfg.gate == GateKind::dual_unitary && cfg.initial == InitialKind::single) {
    std::vector<double> row0(p.bits().begin(), p.bits().end());
    const auto g = mf_evolve(row0, cfg.resolved_alpha(), depth, cfg.boundary);
    double d = 0.0;
    for (int t = 0; t <= depth; ++t)
      for (int x = 0; x < n; ++x) d = std::max(d, std::abs(g.at(x, t) - f.at(x, t)));
    record("meanfield/mc", "max_abs_rho", d, 0.02);
  } else {
    skip("meanfield/mc", "needs gate = dual_unitary and initial = single");
  }
  return {{std::move(table)}, ok, ok ? "" : "tolerance failure: " + failed};
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"evolve",   "beta-scan",    "opt-depth", "boundary",
                                              "appendix", "gate-analyze", "compare"};
  return names;
}

inline CommandResult run_command(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "evolve") return cmd_evolve(cfg);
  if (name == "beta-scan") return cmd_beta_scan(cfg);
  if (name == "opt-depth") return cmd_opt_depth(cfg);
  if (name == "boundary") return cmd_boundary(cfg);
  if (name == "appendix") return cmd_appendix(cfg);
  if (name == "gate-analyze") return cmd_gate_analyze(cfg);
  if (name == "compare") return cmd_compare(cfg);
  throw ConfigError("unknown command '" + name + "'");
}

/// Output prefix: `output` if set, else $PWDYN_OUTPUT_DIR (or the working
/// directory) joined with the command name.
inline std::filesystem::path output_prefix(const ExperimentConfig& cfg, const std::string& command) {
  if (!cfg.output.empty()) return cfg.output;
  std::string stem = command;
  std::replace(stem.begin(), stem.end(), '-', '_');
  const char* dir = std::getenv("PWDYN_OUTPUT_DIR");
  return std::filesystem::path(dir && *dir ? dir : ".") / stem;
}

/// Renders every table fully in memory, then writes each atomically to
/// <prefix>_<table>.<csv|json>. Returns the written paths.
inline std::vector<std::filesystem::path> write_result(const CommandResult& r,
                                                       const ExperimentConfig& cfg,
                                                       const std::string& command) {
  const auto prefix = output_prefix(cfg, command);
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  for (const auto& t : r.tables) {
    std::ostringstream os;
    std::filesystem::path path = prefix;
    path += "_" + t.name + (cfg.format == Format::csv ? ".csv" : ".json");
    if (cfg.format == Format::csv) {
      io::write_csv(os, t);
    } else {
      io::write_json(os, t);
    }
    files.emplace_back(path, os.str());
  }
  std::vector<std::filesystem::path> out;
  for (const auto& [path, content] : files) {
    io::atomic_write(path, content);
    out.push_back(path);
  }
  return out;
}

}  // namespace pwdyn
