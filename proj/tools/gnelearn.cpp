// Copyright 2026 The gnelearn Authors
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

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gnelearn/config.hpp"
#include "gnelearn/cournot.hpp"
#include "gnelearn/diagnostics.hpp"
#include "gnelearn/errors.hpp"
#include "gnelearn/experiment.hpp"
#include "gnelearn/geometry.hpp"
#include "gnelearn/learner.hpp"

namespace {

using namespace gnelearn;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kScheduleViolation = 3;
constexpr int kOracleRejected = 4;

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << v;
  return out.str();
}

std::string fmt(const Vector& v) {
  std::string out = "(";
  for (Eigen::Index k = 0; k < v.size(); ++k) out += (k ? ", " : "") + fmt(v[k]);
  return out + ")";
}

void print_certificate(const EquilibriumCertificate& c) {
  std::cout << "method:          " << c.method << " (" << c.iterations << " iterations)\n"
            << "a*:              " << fmt(c.primal.values()) << '\n'
            << "lambda*:         " << fmt(c.dual.values) << '\n'
            << "stationarity:    " << fmt(c.stationarity) << '\n'
            << "complementarity: " << fmt(c.complementarity) << '\n'
            << "feasibility:     " << fmt(c.feasibility) << '\n'
            << "accepted:        " << (c.accepted() ? "yes" : "no") << " (tol " << fmt(c.tol) << ")\n";
}

MixedQuery base_query(const ExperimentConfig& cfg, const GameSpec& game, long samples, std::uint64_t seed) {
  const LearnerState st = initial_state(game, cfg.mode, cfg.seed, {cfg.mu0, cfg.lambda0, std::nullopt});
  MixedQuery q;
  q.means = st.means.values();
  q.sigma.resize(game.players);
  for (int i = 0; i < game.players; ++i) q.sigma[i] = step_sizes(cfg.schedule, 0, i).sigma;
  q.dual = game.constraints > 0 ? Vector(st.dual.values) : Vector(0);
  q.samples = samples;
  q.seed = seed;
  return q;
}

int diagnose(const ExperimentConfig& cfg, const std::string& check, long samples, int seeds, long horizon) {
  const GameSpec game = build_game(cfg).game;
  if (check == "score" || check == "bias") {
    for (int i = 0; i < game.players; ++i) {
      MixedQuery q = base_query(cfg, game, samples, derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
      q.player = i;
      if (check == "score") {
        const ScoreGradientReport r = score_gradient_check(q, game);
        std::cout << "player " << i + 1 << ": estimate " << fmt(r.estimate) << " +- " << fmt(r.stderr_) << ", target "
                  << fmt(r.target) << " [" << r.target_kind << "] " << (r.pass ? "PASS" : "FAIL") << '\n';
        if (r.constraint_mean)
          std::cout << "  g(x) mean " << fmt(*r.constraint_mean) << " vs g(mu) " << fmt(*r.constraint_target) << ' '
                    << (r.dual_pass ? "PASS" : "FAIL") << '\n';
      } else {
        const BiasReport r = bias_term(q, game);
        std::cout << "player " << i + 1 << ": bias " << fmt(r.estimate) << " +- " << fmt(r.stderr_) << ", norm "
                  << fmt(r.norm) << (r.within_noise ? " (within noise)" : "") << '\n';
      }
    }
    return kOk;
  }
  if (check == "mono") {
    const VectorMap m = [&](const Vector& a) { return game_mapping(game, JointAction(game.players, game.dim, a)); };
    const MonotonicityReport r = monotonicity_classify(m, game.local_sets);
    std::cout << "game mapping:     " << to_string(r.verdict) << " (kappa " << fmt(r.kappa) << (r.affine ? ", affine" : "")
              << ")\n";
    if (game.constraints > 0) {
      const Eigen::Index nd = game.joint_dim();
      const VectorMap ext = [&](const Vector& z) {
        return extended_mapping(game, JointAction(game.players, game.dim, z.head(nd)), DualVector(Vector(z.tail(game.constraints))));
      };
      std::vector<ConvexSet> domain = game.local_sets;
      domain.push_back(ConvexSet::orthant(game.constraints));
      const MonotonicityReport e = monotonicity_classify(ext, domain);
      std::cout << "extended mapping: " << to_string(e.verdict) << " (kappa " << fmt(e.kappa)
                << (e.affine ? ", affine" : "") << ")\n";
    }
    return kOk;
  }
  if (check == "rate") {
    ExperimentOptions opts;
    opts.write_files = false;
    const EnsembleSummary ens = sweep_seeds(cfg, seeds, opts, true);
    if (!ens.certificate) throw ConfigError("rate check needs the oracle (oracle.enabled and gradient evaluators)");
    const RateFit fit = rate_fit(ens.records, ens.certificate->primal.values(), cfg.schedule);
    std::cout << "fitted slope " << fmt(fit.slope) << " over t in [" << fit.times.front() << ", " << fit.times.back()
              << "], theoretical " << fmt(fit.theoretical_slope) << ", tolerance " << fmt(fit.tolerance) << ": "
              << (fit.pass ? "PASS" : "FAIL") << '\n';
    return kOk;
  }
  if (check == "recursion") {
    for (double kappa : {1.1, 2.0, 5.0})
      for (double c : {1.2, 1.6, 2.0})
        for (double a0 : {0.1, 1.0, 10.0}) {
          const RecursionReport r = recursion_bound_check({a0, kappa, 1.0, c}, horizon);
          std::cout << "kappa=" << kappa << " c=" << c << " a0=" << a0 << ": " << (r.holds ? "holds" : "violated");
          if (!r.holds) std::cout << " (t in [" << r.first_violation << ", " << r.last_violation << "])";
          std::cout << ", beyond kappa " << (r.holds_beyond_kappa ? "holds" : "violated") << '\n';
        }
    return kOk;
  }
  throw ConfigError("unknown check '" + check + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Payoff-based learning of generalized Nash equilibria"};
  app.require_subcommand(1);

  std::string config_path;
  ExperimentOptions run_opts;
  std::uint64_t seed = 0;
  long iters = 0;
  std::string out_dir;
  int seed_count = 20;

  auto* run = app.add_subcommand("run", "Run the learner for one seed and write its trajectory");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  auto* run_seed = run->add_option("--seed", seed, "Learner seed (overrides learner.seed)");
  auto* run_iters = run->add_option("--iters", iters, "Iterations (overrides learner.iters)");
  auto* run_out = run->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  run->add_flag("--strict", run_opts.strict, "Refuse schedules that violate the step-size conditions");

  auto* oracle = app.add_subcommand("oracle", "Compute and certify the reference equilibrium");
  oracle->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  auto* validate = app.add_subcommand("validate", "Check a config, its schedule and the Slater condition");
  validate->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "Run several derived seeds and aggregate terminal statistics");
  sweep->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--seeds", seed_count, "Number of seeds")->required()->check(CLI::PositiveNumber);
  auto* sweep_out = sweep->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  sweep->add_flag("--strict", run_opts.strict, "Refuse schedules that violate the step-size conditions");

  int players = 3, horizon = 4;
  long cournot_iters = 300;
  std::string emit_path;
  auto* cournot = app.add_subcommand("cournot", "Write the Cournot case-study config");
  cournot->add_option("--players", players, "Number of producers")->check(CLI::Range(2, 1000));
  cournot->add_option("--horizon", horizon, "Time steps per producer")->check(CLI::Range(1, 100000));
  cournot->add_option("--seed", seed, "Master seed for the market parameters and the learner");
  cournot->add_option("--iters", cournot_iters, "Learner iterations")->check(CLI::PositiveNumber);
  cournot->add_option("--emit-config", emit_path, "Where to write the config")->required();

  std::string check;
  long samples = 100000, rec_horizon = 1000000;
  auto* diag = app.add_subcommand("diagnose", "Statistical and analytical checks on a configured game");
  diag->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  diag->add_option("--check", check, "Which check to run")
      ->required()
      ->check(CLI::IsMember({"score", "bias", "mono", "rate", "recursion"}));
  diag->add_option("--samples", samples, "Monte-Carlo samples for score and bias")->check(CLI::PositiveNumber);
  diag->add_option("--seeds", seed_count, "Ensemble size for the rate fit")->check(CLI::PositiveNumber);
  diag->add_option("--horizon", rec_horizon, "Horizon for the recursion check")->check(CLI::Range(2L, 100000000L));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (cournot->parsed()) {
      std::ofstream out(emit_path);
      if (!out) throw std::runtime_error("cannot write " + emit_path);
      out << cournot_config(players, horizon, seed, cournot_iters).dump(2) << '\n';
      std::cout << "wrote " << emit_path << '\n';
      return kOk;
    }

    const ExperimentConfig cfg = load_config(config_path);
    if (run->parsed() || sweep->parsed()) {
      if (*run_seed) run_opts.seed = seed;
      if (*run_iters) run_opts.iterations = iters;
      if (*run_out || *sweep_out) run_opts.output_dir = out_dir;
      run_opts.log = &std::cout;
      if (run->parsed()) {
        const ExperimentResult res = run_experiment(cfg, run_opts);
        std::cout << "trajectory: " << res.trajectory_path->string() << "\nsummary:    " << res.summary_path->string()
                  << '\n';
      } else {
        sweep_seeds(cfg, seed_count, run_opts);
      }
      return kOk;
    }
    if (oracle->parsed()) {
      const GameSpec game = build_game(cfg).game;
      const EquilibriumCertificate cert = compute_oracle(game, cfg);
      print_certificate(cert);
      return cert.accepted() ? kOk : kOracleRejected;
    }
    if (validate->parsed()) {
      const GameSpec game = build_game(cfg).game;
      std::cout << "config " << config_path << " ok (hash " << cfg.hash << ")\n"
                << "game: " << game.name << ", N=" << game.players << ", d=" << game.dim << ", n=" << game.constraints
                << ", mode " << to_string(cfg.mode) << '\n';
      const auto violations = validate_schedule(cfg.schedule, cfg.mode);
      if (violations.empty()) {
        std::cout << "schedule: ok\n";
      } else {
        std::cout << "schedule: violates";
        for (const auto& v : violations) std::cout << ' ' << v;
        std::cout << '\n';
      }
      if (game.constraints > 0) {
        const auto slater = slater_point(game.local_sets, game.constraint, game.constraint_jacobian);
        std::cout << "slater: " << (slater ? "strictly feasible point " + fmt(*slater) : std::string("no certificate found"))
                  << '\n';
      }
      return kOk;
    }
    if (diag->parsed()) return diagnose(cfg, check, samples, seed_count, rec_horizon);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ScheduleViolation& e) {
    std::cerr << "error: " << e.what() << " (strict mode)\n";
    return kScheduleViolation;
  } catch (const OracleRejected& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOracleRejected;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
