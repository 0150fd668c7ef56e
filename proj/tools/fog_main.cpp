/*
 Copyright 2026 The fog-skills Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/


// Command line front end: train, eval, downstream, audit, plot, prompt.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fog/agent/trainer.hpp"
#include "fog/core/errors.hpp"
#include "fog/envs/toy_envs.hpp"
#include "fog/envs/trajectory_io.hpp"
#include "fog/eval/metrics.hpp"
#include "fog/eval/plot.hpp"
#include "fog/hier/controller.hpp"
#include "fog/score/score.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TrainArgs {
  std::string config, method, env, out = "runs", score_mode, predicate, polarity, obs_mode, embedder, endpoint;
  std::vector<std::string> intents, intent_pos, intent_neg;
  std::optional<double> alpha, noise_b;
  std::optional<int> skip_n, skill_dim, epochs, hidden_width;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

struct EvalArgs {
  std::string checkpoint, hazard = "none", out;
  int episodes = fog::eval::kDefaultEvalSkills;
  long long seed = 0;
  bool dump = false, frames = false;
};

struct DownstreamArgs {
  std::string checkpoint, out;
  int episodes = 200;
  long long seed = 0;
};

struct AuditArgs {
  std::string dump, score_config, out, embedder, endpoint;
};

struct PlotArgs {
  std::vector<std::string> in;
  std::string out = ".";
};

struct PromptArgs {
  std::string env = "tipcart", requirement;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw fog::IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void apply_embedder_flags(fog::embed::EmbedderConfig& cfg, const std::string& kind, const std::string& endpoint) {
  if (!kind.empty()) {
    if (kind != "mock" && kind != "remote") throw fog::InvalidArgument("--embedder must be mock or remote");
    cfg.kind = kind == "remote" ? fog::embed::EmbedderKind::kRemote : fog::embed::EmbedderKind::kMock;
  }
  if (!endpoint.empty()) {
    cfg.endpoint = endpoint;
    cfg.kind = fog::embed::EmbedderKind::kRemote;
  }
}

fog::agent::TrainConfig build_train_config(const TrainArgs& a) {
  using namespace fog;
  agent::TrainConfig c;
  if (!a.config.empty()) {
    c = agent::TrainConfig::load(a.config);
  } else if (!a.method.empty()) {
    c = agent::TrainConfig::for_method(agent::method_from_string(a.method));
  }
  if (!a.method.empty() && !a.config.empty()) {
    c.method = agent::method_from_string(a.method);
    c.metric = agent::default_metric(c.method);
  }
  if (!a.env.empty()) c.env = a.env;
  if (!a.score_mode.empty()) c.score.mode = score::score_mode_from_string(a.score_mode);
  if (a.intent_pos.size() != a.intent_neg.size()) {
    throw InvalidArgument("--intent-pos and --intent-neg must be given the same number of times");
  }
  if (!a.intents.empty() || !a.intent_pos.empty()) {
    c.score.intentions.clear();
    for (std::size_t i = 0; i < a.intent_pos.size(); ++i) c.score.intentions.push_back({a.intent_pos[i], a.intent_neg[i]});
    for (const auto& spec : a.intents) {
      const auto bar = spec.find('|');
      if (bar == std::string::npos) throw InvalidArgument("--intent expects 'desirable|undesirable', got '" + spec + "'");
      c.score.intentions.push_back({spec.substr(0, bar), spec.substr(bar + 1)});
    }
  }
  if (!a.predicate.empty()) c.score.predicate = a.predicate;
  if (!a.polarity.empty()) c.score.polarity = score::polarity_from_string(a.polarity);
  if (a.alpha) c.score.alpha = *a.alpha;
  if (a.skip_n) c.score.skip_n = *a.skip_n;
  if (a.noise_b) c.score.noise_b = *a.noise_b;
  if (a.skill_dim) c.skill_dim = *a.skill_dim;
  if (a.epochs) c.epochs = *a.epochs;
  if (a.hidden_width) c.hidden_width = *a.hidden_width;
  if (a.seed) c.seed = *a.seed;
  if (!a.obs_mode.empty()) {
    if (a.obs_mode != "state" && a.obs_mode != "pixels") throw InvalidArgument("--obs-mode must be state or pixels");
    c.obs_mode = a.obs_mode == "pixels" ? agent::ObsMode::kPixels : agent::ObsMode::kState;
  }
  apply_embedder_flags(c.embedder, a.embedder, a.endpoint);
  c.validate();
  return c;
}

int run_train(const TrainArgs& a) {
  using namespace fog;
  const agent::TrainConfig cfg = build_train_config(a);
  const fs::path dir = fs::path(a.out) / eval::run_dir_name(cfg.env, agent::to_string(cfg.method), cfg.seed);
  std::cout << "run_dir=" << dir.string() << std::endl;
  const auto result = agent::train(cfg, dir, nullptr, [&](const agent::EpochReport& r) {
    if (!a.quiet) std::cout << r.to_log_line(true) << std::endl;
  });
  std::cout << "checkpoint=" << result.checkpoint.string() << std::endl;
  return 0;
}

std::string episode_label(const std::string& env, const fog::core::Trajectory& traj, const fog::envs::Region& hazard) {
  bool bad = false;
  for (const auto& s : traj.states) {
    if (env == "tipcart") {
      bad = bad || fog::envs::is_flipped(s.vec());
    } else if (!hazard.empty()) {
      bad = bad || fog::envs::is_hazardous(s.vec(), hazard);
    }
  }
  return bad ? "misaligned" : "aligned";
}

int run_eval(const EvalArgs& a) {
  using namespace fog;
  const auto trainer = agent::Trainer::load_checkpoint(a.checkpoint);
  const auto& cfg = trainer->config();
  const envs::Region hazard = envs::Region::parse(a.hazard);
  const auto skills = eval::eval_skills(cfg.skill_dim, a.episodes, static_cast<std::uint64_t>(a.seed));
  eval::EvalReport rep = eval::evaluate(trainer->sac().policy(), cfg.env, cfg.obs_mode, skills, hazard);
  rep.method = agent::to_string(cfg.method);
  rep.seed = cfg.seed;

  const fs::path dir = a.out.empty() ? fs::path(a.checkpoint).parent_path() / ("eval_seed" + std::to_string(a.seed))
                                     : fs::path(a.out);
  fs::create_directories(dir);
  json j{{"env", rep.env},
         {"method", rep.method},
         {"train_seed", rep.seed},
         {"eval_seed", a.seed},
         {"episodes", a.episodes},
         {"hazard", a.hazard},
         {"coverage", rep.coverage},
         {"safe_coverage", rep.safe_coverage},
         {"hazard_fraction", rep.hazard_fraction},
         {"flip_pct", rep.flip_pct}};
  write_json(dir / "eval_report.json", j);
  eval::emit_plots({rep}, dir);
  if (a.dump) {
    envs::TrajectoryWriter w(dir / "trajectories.jsonl", cfg.env, a.frames);
    for (std::size_t e = 0; e < rep.trajectories.size(); ++e) {
      w.write_episode(static_cast<int>(e), rep.trajectories[e], episode_label(cfg.env, rep.trajectories[e], hazard));
    }
  }
  std::cout << "coverage=" << rep.coverage << " safe_coverage=" << rep.safe_coverage
            << " hazard_fraction=" << rep.hazard_fraction << " flip_pct=" << rep.flip_pct << " out=" << dir.string()
            << std::endl;
  return 0;
}

int run_downstream(const DownstreamArgs& a) {
  using namespace fog;
  const auto trainer = agent::Trainer::load_checkpoint(a.checkpoint);
  const auto& cfg = trainer->config();
  if (cfg.env != "pointroom") throw InvalidArgument("downstream goal reaching needs a pointroom checkpoint");
  auto env = envs::make_env(cfg.env);
  core::Rng rng(static_cast<std::uint64_t>(a.seed));
  hier::ControllerConfig hc;
  core::Rng init = rng.fork(10);
  hier::Controller ctl(env->spec(), env->observation_scale(), cfg.skill_dim, hc, init);
  const auto res = hier::train_controller(ctl, trainer->sac().policy(), cfg.obs_mode, *env, a.episodes, hc, rng);
  const auto base =
      hier::random_skill_baseline(trainer->sac().policy(), cfg.obs_mode, *env, cfg.skill_dim, a.episodes, rng);

  const fs::path dir = a.out.empty() ? fs::path(a.checkpoint).parent_path() / ("downstream_seed" + std::to_string(a.seed))
                                     : fs::path(a.out);
  eval::write_plot(eval::curve_table(res.returns), dir, "learning_curve");
  eval::write_plot(eval::curve_table(base), dir, "baseline_curve");
  const double tail = hier::tail_mean(res.returns, 50);
  const double tail_base = hier::tail_mean(base, 50);
  write_json(dir / "downstream.json", {{"episodes", a.episodes},
                                       {"seed", a.seed},
                                       {"controller_tail_mean", tail},
                                       {"baseline_tail_mean", tail_base},
                                       {"frozen_hash", res.frozen_hash_after}});
  std::cout << "controller_tail_mean=" << tail << " baseline_tail_mean=" << tail_base << " out=" << dir.string()
            << std::endl;
  return 0;
}

int run_audit(const AuditArgs& a) {
  using namespace fog;
  std::ifstream in(a.score_config);
  if (!in) throw IoError("cannot open score config " + a.score_config);
  const json j = json::parse(in);
  score::ScoreConfig sc;
  embed::EmbedderConfig ec;
  if (j.contains("score")) {
    sc = j.at("score").get<score::ScoreConfig>();
    if (j.contains("embedder")) ec = agent::TrainConfig::from_json(j).embedder;
  } else {
    sc = j.get<score::ScoreConfig>();
  }
  apply_embedder_flags(ec, a.embedder, a.endpoint);
  const auto records = envs::read_dump(a.dump);
  if (records.empty()) throw InvalidArgument("dump " + a.dump + " has no records");
  std::shared_ptr<embed::Embedder> embedder;
  if (sc.mode == score::ScoreMode::kBinary || sc.mode == score::ScoreMode::kSoftmax ||
      sc.mode == score::ScoreMode::kMulti) {
    embedder = embed::make_embedder(ec);
  }
  auto fn = score::make_base_scorer(sc, embedder, static_cast<int>(records.front().state.size()));
  const fs::path dump_dir = fs::path(a.dump).parent_path();
  const auto audit = eval::audit_scores(records, *fn, dump_dir);
  const fs::path dir = a.out.empty() ? dump_dir / "audit" : fs::path(a.out);
  eval::write_plot(eval::score_table(audit), dir, "scores");
  auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  write_json(dir / "audit_summary.json", {{"episodes", audit.scores.size()},
                                          {"mean_aligned", num(audit.mean_aligned)},
                                          {"mean_misaligned", num(audit.mean_misaligned)},
                                          {"mean_all", num(audit.mean_all)}});
  std::cout << "episodes=" << audit.scores.size() << " mean_aligned=" << audit.mean_aligned
            << " mean_misaligned=" << audit.mean_misaligned << " mean_all=" << audit.mean_all
            << " out=" << dir.string() << std::endl;
  return 0;
}

int run_plot(const PlotArgs& a) {
  std::vector<fs::path> in(a.in.begin(), a.in.end());
  for (const auto& p : fog::eval::replot(in, a.out)) std::cout << p.string() << std::endl;
  return 0;
}

int run_prompt(const PromptArgs& a) {
  const auto env = fog::envs::make_env(a.env);
  std::string req = a.requirement;
  if (req.empty()) req = a.env == "tipcart" ? "check if the tip is flipped over" : "check if the agent is in the east half";
  std::cout << fog::score::build_prompt(env->task_description(), env->state_space_doc(), req) << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skill discovery guided by foundation-model scores"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train skills and write a run directory");
  train->add_option("--config", ta.config, "JSON training config");
  train->add_option("--method", ta.method, "fog, metra, lsd, metra_plus or fr_sac");
  train->add_option("--env", ta.env, "pointroom or tipcart");
  train->add_option("--alpha", ta.alpha, "Score for undesirable states, in [0, 1)");
  train->add_option("--skip-n", ta.skip_n, "Score every N-th step");
  train->add_option("--noise-b", ta.noise_b, "Probability of flipping a binary score");
  train->add_option("--skill-dim", ta.skill_dim);
  train->add_option("--epochs", ta.epochs);
  train->add_option("--seed", ta.seed);
  train->add_option("--out", ta.out, "Parent directory of the run directory")->capture_default_str();
  train->add_option("--score-mode", ta.score_mode, "binary, softmax, multi, predicate or constant");
  train->add_option("--intent", ta.intents, "Intention pair 'desirable|undesirable' (repeatable)");
  train->add_option("--intent-pos", ta.intent_pos, "Desirable intention text (repeatable, paired with --intent-neg)");
  train->add_option("--intent-neg", ta.intent_neg, "Undesirable intention text (repeatable)");
  train->add_option("--predicate", ta.predicate, "State predicate, e.g. 'abs(s[1]) > 1.57'");
  train->add_option("--polarity", ta.polarity, "checker_flags_undesirable or checker_flags_desirable");
  train->add_option("--obs-mode", ta.obs_mode, "state or pixels");
  train->add_option("--hidden-width", ta.hidden_width);
  train->add_option("--embedder", ta.embedder, "mock or remote");
  train->add_option("--endpoint", ta.endpoint, "Remote embedder base URL (else $FOG_EMBED_ENDPOINT)");
  train->add_flag("--quiet", ta.quiet, "Do not echo epoch lines");

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint over a fixed skill set");
  ev->add_option("--checkpoint", ea.checkpoint)->required();
  ev->add_option("--episodes", ea.episodes, "Number of evaluation skills")->capture_default_str();
  ev->add_option("--seed", ea.seed)->capture_default_str();
  ev->add_option("--hazard", ea.hazard, "Region such as 'x>0' or 'none'")->capture_default_str();
  ev->add_option("--out", ea.out, "Output directory (default: next to the checkpoint)");
  ev->add_flag("--dump", ea.dump, "Write trajectories.jsonl");
  ev->add_flag("--frames", ea.frames, "Also write PNG frames with the dump");

  DownstreamArgs da;
  auto* ds = app.add_subcommand("downstream", "Train a goal-reaching controller over frozen skills");
  ds->add_option("--checkpoint", da.checkpoint)->required();
  ds->add_option("--episodes", da.episodes)->capture_default_str();
  ds->add_option("--seed", da.seed)->capture_default_str();
  ds->add_option("--out", da.out, "Output directory (default: next to the checkpoint)");

  AuditArgs aa;
  auto* au = app.add_subcommand("audit", "Re-score a trajectory dump offline");
  au->add_option("--dump", aa.dump)->required();
  au->add_option("--score-config", aa.score_config, "Score config JSON, or a training config")->required();
  au->add_option("--out", aa.out, "Output directory (default: <dump dir>/audit)");
  au->add_option("--embedder", aa.embedder, "mock or remote");
  au->add_option("--endpoint", aa.endpoint, "Remote embedder base URL (else $FOG_EMBED_ENDPOINT)");

  PlotArgs pa;
  auto* pl = app.add_subcommand("plot", "Render plots from CSV files");
  pl->add_option("--in", pa.in)->required()->expected(1, -1);
  pl->add_option("--out", pa.out)->capture_default_str();

  PromptArgs pr;
  auto* pp = app.add_subcommand("prompt", "Print the checker-generation prompt for an environment");
  pp->add_option("--env", pr.env)->capture_default_str();
  pp->add_option("--requirement", pr.requirement);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) return run_train(ta);
    if (*ev) return run_eval(ea);
    if (*ds) return run_downstream(da);
    if (*au) return run_audit(aa);
    if (*pl) return run_plot(pa);
    if (*pp) return run_prompt(pr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
