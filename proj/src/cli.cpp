#include "adsight/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "adsight/domain.hpp"
#include "adsight/featurize.hpp"
#include "adsight/labeler.hpp"
#include "adsight/layout.hpp"
#include "adsight/model.hpp"
#include "adsight/raster.hpp"
#include "adsight/synth.hpp"
#include "adsight/train.hpp"

namespace adsight {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void note(bool verbose, const std::string& line) {
  if (verbose) std::cerr << "[adsight] " << line << '\n';
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Thresholds serialize +infinity (an empty category) as JSON null.
json thresholds_to_json(const NoticeThresholds& t) {
  json tft = json::array(), tfc = json::array();
  for (int c = 0; c < kNumLabelCategories; ++c) {
    if (std::isfinite(t.median_tft[c])) tft.push_back(t.median_tft[c]);
    else tft.push_back(nullptr);
    if (std::isfinite(t.median_tfc[c])) tfc.push_back(t.median_tfc[c]);
    else tfc.push_back(nullptr);
  }
  return json{{"median_tft", tft}, {"median_tfc", tfc}};
}

NoticeThresholds thresholds_from_json(const json& j) {
  NoticeThresholds t;
  const double inf = std::numeric_limits<double>::infinity();
  for (int c = 0; c < kNumLabelCategories; ++c) {
    const json& ft = j.at("median_tft").at(c);
    const json& fc = j.at("median_tfc").at(c);
    t.median_tft[c] = ft.is_null() ? inf : ft.get<double>();
    t.median_tfc[c] = fc.is_null() ? inf : fc.get<double>();
  }
  return t;
}

std::vector<AugmentedLayout> augment_all(const std::vector<Trial>& trials, int n_aux) {
  std::vector<AugmentedLayout> layouts;
  layouts.reserve(trials.size());
  for (const Trial& t : trials) {
    double aspect = t.page_width_px > 0
                        ? static_cast<double>(t.page_height_px) / t.page_width_px
                        : 1.0;
    layouts.push_back(place_auxiliary_slots(t.slots, n_aux, aspect));
  }
  return layouts;
}

json bool_array(const std::array<bool, kNumLabelCategories>& a) {
  json out = json::array();
  for (bool v : a) out.push_back(v);
  return out;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string out;
  std::string config_path;
  int n = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void cmd_synth(const SynthArgs& a, bool verbose) {
  SynthConfig cfg;
  if (!a.config_path.empty()) cfg = synth_config_from_json(read_text(a.config_path));
  if (a.n >= 0) cfg.n_trials = a.n;
  if (a.seed_set) cfg.seed = a.seed;
  cfg.validate();
  gen_dataset(cfg, a.out);
  note(verbose, "wrote " + std::to_string(cfg.n_trials) + " trials to " + a.out);
}

// ---------------------------------------------------------------------------
// label

struct LabelArgs {
  std::string data;
  std::string out;
  int n_aux = 3;
};

void cmd_label(const LabelArgs& a, bool verbose) {
  std::vector<Trial> trials = load_dataset(a.data);
  std::vector<AugmentedLayout> layouts = augment_all(trials, a.n_aux);
  NoticeThresholds th = compute_thresholds(trials, layouts);
  fs::create_directories(a.out);
  write_text(fs::path(a.out) / "thresholds.json", thresholds_to_json(th).dump(2) + "\n");

  std::string lines;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    AttentionTargets targets = attention_targets(trials[i], layouts[i], th);
    json slots = json::array();
    for (std::size_t s = 0; s < layouts[i].slots.size(); ++s) {
      const SlotBox& box = layouts[i].slots[s];
      slots.push_back(json{{"id", box.id},
                           {"category", category_name(box.category)},
                           {"tft", targets.per_slot[s].tft},
                           {"tfc", targets.per_slot[s].tfc}});
    }
    json rec{{"id", trials[i].id},
             {"present", bool_array(targets.labels.present)},
             {"noticed", bool_array(targets.labels.noticed)},
             {"slots", slots}};
    lines += rec.dump() + "\n";
  }
  write_text(fs::path(a.out) / "targets.jsonl", lines);
  note(verbose, "labeled " + std::to_string(trials.size()) + " trials");
}

// ---------------------------------------------------------------------------
// featurize

struct FeaturizeArgs {
  std::string data;
  std::string out;
  int n_aux = 3;
  std::string parameterization = "center";
};

void cmd_featurize(const FeaturizeArgs& a, bool verbose) {
  SlotParameterization param = parse_parameterization(a.parameterization);
  std::vector<Trial> trials = load_dataset(a.data);
  std::vector<AugmentedLayout> layouts = augment_all(trials, a.n_aux);
  fs::create_directories(a.out);

  std::string lines;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    FeatureSequence seq = cursor_features(trials[i], layouts[i]);
    SlotFeatureSeq slots = slot_features(layouts[i], param);
    json cursor = json::array();
    for (Eigen::Index r = 0; r < seq.rows.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < kNumCursorFeatures; ++c) row.push_back(seq.rows(r, c));
      cursor.push_back(row);
    }
    json coords = json::array();
    for (Eigen::Index r = 0; r < slots.coords.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < slots.coords.cols(); ++c) row.push_back(slots.coords(r, c));
      coords.push_back(row);
    }
    json types = json::array();
    for (Eigen::Index r = 0; r < slots.type_codes.size(); ++r)
      types.push_back(slots.type_codes(r));
    json rec{{"id", trials[i].id},
             {"cursor", cursor},
             {"slots", json{{"coords", coords},
                            {"types", types},
                            {"parameterization", parameterization_name(param)}}}};
    lines += rec.dump() + "\n";
  }
  write_text(fs::path(a.out) / "features.jsonl", lines);
  note(verbose, "featurized " + std::to_string(trials.size()) + " trials");
}

// ---------------------------------------------------------------------------
// render

struct RenderArgs {
  std::string data;
  std::string out;
  std::string mode = "heatmap";
  int size = 512;
  std::string trial_id;  // empty: all trials
};

void cmd_render(const RenderArgs& a, bool verbose) {
  std::vector<Trial> trials = load_dataset(a.data);
  fs::create_directories(a.out);
  int rendered = 0;
  for (const Trial& trial : trials) {
    if (!a.trial_id.empty() && trial.id != a.trial_id) continue;
    AugmentedLayout layout = make_layout(trial.slots);
    RasterImage img;
    if (a.mode == "heatmap") {
      img = render_heatmap(trial, layout, a.size);
    } else {
      img = render_trajectory(trial, layout, a.size, a.mode == "trajectory-grey");
    }
    write_png(fs::path(a.out) / (trial.id + ".png"), img);
    ++rendered;
  }
  if (!a.trial_id.empty() && rendered == 0) {
    throw std::runtime_error("trial id not found in dataset: " + a.trial_id);
  }
  note(verbose, "rendered " + std::to_string(rendered) + " images");
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string data;
  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 0;
};

json split_ids(const std::vector<Trial>& trials, const std::vector<int>& indices) {
  json ids = json::array();
  for (int i : indices) ids.push_back(trials[i].id);
  return ids;
}

void write_checkpoint_with_meta(const fs::path& ckpt_path, const ExperimentResult& res,
                                const TrainConfig& cfg, std::uint64_t seed,
                                const std::vector<Trial>& trials) {
  save_checkpoint(ckpt_path, res.outcome.params, cfg.model, seed);
  json meta{{"train_config", json::parse(train_config_to_json(cfg))},
            {"seed", seed},
            {"split",
             json{{"train_ids", split_ids(trials, res.split.train)},
                  {"test_ids", split_ids(trials, res.split.test)}}},
            {"thresholds", thresholds_to_json(res.thresholds)}};
  write_text(fs::path(ckpt_path.string() + ".meta.json"), meta.dump(2) + "\n");
}

void cmd_train(const TrainArgs& a, bool verbose) {
  TrainConfig cfg = train_config_from_json(read_text(a.config_path));
  if (a.seed_set) cfg.seeds = {a.seed};
  if (a.jobs > 0) cfg.jobs = a.jobs;
  cfg.validate();
  std::vector<Trial> trials = load_dataset(a.data);
  fs::create_directories(a.out);

  // runs.jsonl is the wall-clock log: one line per run, rewritten per
  // invocation so reruns differ only in the timing fields.
  std::ofstream runs(fs::path(a.out) / "runs.jsonl", std::ios::binary | std::ios::trunc);
  if (!runs) throw std::runtime_error("cannot write runs.jsonl under " + a.out);

  json per_seed = json::array();
  std::size_t best_pos = 0;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<ExperimentResult> results;
  results.reserve(cfg.seeds.size());
  for (std::size_t k = 0; k < cfg.seeds.size(); ++k) {
    std::uint64_t seed = cfg.seeds[k];
    note(verbose, "training seed " + std::to_string(seed));
    ExperimentResult res = run_experiment(trials, cfg, seed);
    runs << run_record_to_json(res.outcome.record) << '\n';
    write_checkpoint_with_meta(fs::path(a.out) / ("seed_" + std::to_string(seed) + ".ckpt"),
                               res, cfg, seed, trials);
    per_seed.push_back(json{{"seed", seed},
                            {"best_epoch", res.outcome.record.best_epoch},
                            {"best_val_loss", res.outcome.record.best_val_loss},
                            {"test", json::parse(metrics_to_json(res.test_metrics))}});
    if (res.outcome.record.best_val_loss < best_val) {
      best_val = res.outcome.record.best_val_loss;
      best_pos = k;
    }
    results.push_back(std::move(res));
  }
  runs.close();

  // The best seed (lowest validation loss) is re-saved under the stable name
  // `best` so downstream commands need no seed bookkeeping.
  write_checkpoint_with_meta(fs::path(a.out) / "best", results[best_pos], cfg,
                             cfg.seeds[best_pos], trials);
  json summary{{"config_hash", train_config_hash(cfg)},
               {"best_seed", cfg.seeds[best_pos]},
               {"per_seed", per_seed}};
  write_text(fs::path(a.out) / "metrics.json", summary.dump(2) + "\n");
  note(verbose, "best seed " + std::to_string(cfg.seeds[best_pos]));
}

// ---------------------------------------------------------------------------
// evaluate / predict

struct EvalArgs {
  std::string ckpt;
  std::string data;
  std::string out;
  std::string split = "test";
};

json load_meta(const std::string& ckpt) {
  fs::path meta_path(ckpt + ".meta.json");
  if (!fs::exists(meta_path)) {
    throw std::runtime_error("missing checkpoint metadata: " + meta_path.string());
  }
  return json::parse(read_text(meta_path));
}

std::vector<int> resolve_split(const json& meta, const std::vector<Trial>& trials,
                               const std::string& split) {
  std::vector<int> indices;
  if (split == "all") {
    indices.resize(trials.size());
    for (std::size_t i = 0; i < trials.size(); ++i) indices[i] = static_cast<int>(i);
    return indices;
  }
  std::map<std::string, int> by_id;
  for (std::size_t i = 0; i < trials.size(); ++i) by_id[trials[i].id] = static_cast<int>(i);
  const json& ids = meta.at("split").at(split == "train" ? "train_ids" : "test_ids");
  indices.reserve(ids.size());
  for (const json& id : ids) {
    auto it = by_id.find(id.get<std::string>());
    if (it == by_id.end()) {
      throw std::runtime_error("split id not in dataset: " + id.get<std::string>() +
                               " (use --split all for a different dataset)");
    }
    indices.push_back(it->second);
  }
  return indices;
}

void cmd_evaluate(const EvalArgs& a, bool verbose) {
  Checkpoint ck = load_checkpoint(a.ckpt);
  json meta = load_meta(a.ckpt);
  TrainConfig cfg = train_config_from_json(meta.at("train_config").dump());
  std::vector<Trial> trials = load_dataset(a.data);
  PreparedDataset prep = prepare_dataset(trials, ck.config, cfg.n_aux);
  apply_labels(prep, thresholds_from_json(meta.at("thresholds")));
  std::vector<int> indices = resolve_split(meta, trials, a.split);

  AdSightModel model = build_model(ck.config);
  MetricsReport report = evaluate(model, ck.params, prep, indices);
  fs::create_directories(a.out);
  write_text(fs::path(a.out) / "metrics.json", metrics_to_json(report) + "\n");
  note(verbose, "evaluated " + std::to_string(indices.size()) + " trials (" + a.split + ")");
}

struct PredictArgs {
  std::string ckpt;
  std::string data;
  std::string out;
};

void cmd_predict(const PredictArgs& a, bool verbose) {
  Checkpoint ck = load_checkpoint(a.ckpt);
  json meta = load_meta(a.ckpt);
  TrainConfig cfg = train_config_from_json(meta.at("train_config").dump());
  std::vector<Trial> trials = load_dataset(a.data);
  PreparedDataset prep = prepare_dataset(trials, ck.config, cfg.n_aux);

  AdSightModel model = build_model(ck.config);
  fs::create_directories(a.out);
  std::string lines;
  for (const PreparedTrial& trial : prep.trials) {
    Eigen::VectorXd scores = model_forward(model, ck.params, trial.features, trial.slots, nullptr);
    json score_arr = json::array();
    for (Eigen::Index s = 0; s < scores.size(); ++s) score_arr.push_back(scores(s));
    json rec{{"id", trial.id},
             {"task", task_name(ck.config.task)},
             {"scores", score_arr},
             {"n_standard", trial.n_standard}};
    if (ck.config.task == TaskKind::classify) {
      CategoryProbs probs = classify_postprocess(scores, trial.label_cats);
      json prob_arr = json::array(), present = json::array();
      for (int c = 0; c < kNumLabelCategories; ++c) {
        prob_arr.push_back(probs.probs[c]);
        present.push_back(probs.present[c]);
      }
      rec["probs"] = prob_arr;
      rec["present"] = present;
    }
    lines += rec.dump() + "\n";
  }
  write_text(fs::path(a.out) / "predictions.jsonl", lines);
  note(verbose, "wrote predictions for " + std::to_string(prep.trials.size()) + " trials");
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"attention analytics for multi-slot result pages", "adsight"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "progress notes on stderr");

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic trial dataset");
  synth_cmd->add_option("--n", synth.n, "number of trials (overrides config)");
  CLI::Option* synth_seed =
      synth_cmd->add_option("--seed", synth.seed, "generator seed (overrides config)")
          ->envname("ADSIGHT_SEED");
  synth_cmd->add_option("--config", synth.config_path, "generator config JSON");
  synth_cmd->add_option("--out", synth.out, "output dataset directory")->required();

  LabelArgs label;
  CLI::App* label_cmd = app.add_subcommand("label", "compute notice thresholds and targets");
  label_cmd->add_option("--data", label.data, "dataset directory")
      ->required();
  label_cmd->add_option("--n-aux", label.n_aux, "auxiliary main-column slots")
      ->check(CLI::Range(0, 4));
  label_cmd->add_option("--out", label.out, "output directory")->required();

  FeaturizeArgs feat;
  CLI::App* feat_cmd = app.add_subcommand("featurize", "extract model input features");
  feat_cmd->add_option("--data", feat.data, "dataset directory")
      ->required();
  feat_cmd->add_option("--n-aux", feat.n_aux, "auxiliary main-column slots")
      ->check(CLI::Range(0, 4));
  feat_cmd->add_option("--parameterization", feat.parameterization,
                       "slot coordinate parameterization")
      ->check(CLI::IsMember({"center", "extremes", "min_plus_size"}));
  feat_cmd->add_option("--out", feat.out, "output directory")->required();

  RenderArgs render;
  CLI::App* render_cmd = app.add_subcommand("render", "rasterize trials to PNG");
  render_cmd->add_option("--data", render.data, "dataset directory")
      ->required();
  render_cmd->add_option("--mode", render.mode, "image kind")
      ->check(CLI::IsMember({"heatmap", "trajectory", "trajectory-grey"}));
  render_cmd->add_option("--size", render.size, "image width in pixels")
      ->check(CLI::Range(kMinRasterSize, 4096));
  render_cmd->add_option("--trial", render.trial_id, "render a single trial id");
  render_cmd->add_option("--out", render.out, "output directory")->required();

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "run training experiments");
  train_cmd->add_option("--data", train.data, "dataset directory")
      ->required();
  train_cmd->add_option("--config", train.config_path, "training config JSON")
      ->required();
  CLI::Option* train_seed =
      train_cmd->add_option("--seed", train.seed, "single seed (replaces the config's list)")
          ->envname("ADSIGHT_SEED");
  train_cmd->add_option("--jobs", train.jobs, "worker thread cap")->check(CLI::Range(1, 256));
  train_cmd->add_option("--out", train.out, "output directory")->required();

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "score a checkpoint on a dataset");
  eval_cmd->add_option("--ckpt", eval.ckpt, "checkpoint path")
      ->required();
  eval_cmd->add_option("--data", eval.data, "dataset directory")
      ->required();
  eval_cmd->add_option("--split", eval.split, "which trials to score")
      ->check(CLI::IsMember({"train", "test", "all"}));
  eval_cmd->add_option("--out", eval.out, "output directory")->required();

  PredictArgs pred;
  CLI::App* pred_cmd = app.add_subcommand("predict", "write per-slot predictions");
  pred_cmd->add_option("--ckpt", pred.ckpt, "checkpoint path")
      ->required();
  pred_cmd->add_option("--data", pred.data, "dataset directory")
      ->required();
  pred_cmd->add_option("--out", pred.out, "output directory")->required();

  try {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("adsight");
    for (const std::string& s : args) argv.push_back(s.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    synth.seed_set = synth_seed->count() > 0;
    train.seed_set = train_seed->count() > 0;
    if (synth_cmd->parsed()) cmd_synth(synth, verbose);
    if (label_cmd->parsed()) cmd_label(label, verbose);
    if (feat_cmd->parsed()) cmd_featurize(feat, verbose);
    if (render_cmd->parsed()) cmd_render(render, verbose);
    if (train_cmd->parsed()) cmd_train(train, verbose);
    if (eval_cmd->parsed()) cmd_evaluate(eval, verbose);
    if (pred_cmd->parsed()) cmd_predict(pred, verbose);
  } catch (const std::exception& e) {
    std::cerr << "adsight: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace adsight
