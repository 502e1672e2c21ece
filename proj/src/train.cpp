#include "adsight/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <utility>

#include "json.hpp"

#include "adsight/objectives.hpp"

namespace adsight {
namespace {

using nlohmann::json;

// Seed-derivation tags so the outer split, the inner folds, and the per-epoch
// batch shuffles all draw from independent streams.
constexpr std::uint64_t kTagSplit = 0x73706c6974ULL;
constexpr std::uint64_t kTagInner = 0x696e6e6572ULL;
constexpr std::uint64_t kTagFold = 0x666f6c64ULL;
constexpr std::uint64_t kTagEpoch = 0x65706f6368ULL;
constexpr std::uint64_t kTagSearch = 0x736561726368ULL;

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Loss (and optionally parameter gradients) for a single prepared trial.
double trial_loss(const AdSightModel& model, const nn::ParamStore& params,
                  const PreparedTrial& trial, const LossConfig& loss, nn::GradStore* grads) {
  ModelCache cache;
  Eigen::VectorXd scores =
      model_forward(model, params, trial.features, trial.slots, grads ? &cache : nullptr);
  double value = 0.0;
  Eigen::VectorXd dscores;
  if (loss.kind == LossKind::bce) {
    CategoryProbs probs = classify_postprocess(scores, trial.label_cats);
    CategoryBceResult r = bce_category_loss(probs.probs, trial.present, trial.noticed, loss.alpha);
    value = r.value;
    if (grads) dscores = classify_grad_to_scores(probs, r.grad, trial.label_cats);
  } else {
    const Eigen::VectorXd& target =
        model.config.task == TaskKind::tfc ? trial.target_tfc : trial.target_tft;
    LossValue lv = loss.kind == LossKind::mse_aux
                       ? mse_aux_loss(scores, target, trial.label_cats, loss.alpha)
                       : listnet_loss(scores, target, trial.label_cats, loss.alpha);
    value = lv.value;
    if (grads) dscores = std::move(lv.grad);
  }
  if (grads) model_backward(model, params, cache, dscores, *grads);
  return value;
}

}  // namespace

const char* loss_name(LossKind k) {
  switch (k) {
    case LossKind::mse_aux:
      return "mse_aux";
    case LossKind::listnet:
      return "listnet";
    case LossKind::bce:
      return "bce";
  }
  throw std::invalid_argument("unknown loss kind");
}

LossKind parse_loss(const std::string& name) {
  if (name == "mse_aux") return LossKind::mse_aux;
  if (name == "listnet") return LossKind::listnet;
  if (name == "bce") return LossKind::bce;
  throw std::invalid_argument("unknown loss: " + name);
}

void LossConfig::validate() const {
  require(alpha >= 0.0 && alpha <= 1.0, "loss alpha must lie in [0, 1]");
}

void TrainConfig::validate() const {
  require(learning_rate > 0.0, "learning_rate must be positive");
  require(batch_size >= 1, "batch_size must be at least 1");
  require(max_epochs >= 1, "max_epochs must be at least 1");
  require(patience >= 1 && patience < max_epochs, "patience must lie in [1, max_epochs)");
  require(folds >= 2, "folds must be at least 2");
  require(!seeds.empty(), "seeds must not be empty");
  require(n_aux >= 0 && n_aux <= 4, "n_aux must lie in [0, 4]");
  require(holdout_fraction > 0.0 && holdout_fraction < 1.0,
          "holdout_fraction must lie in (0, 1)");
  require(jobs >= 1, "jobs must be at least 1");
  loss.validate();
  model.validate();
  require((loss.kind == LossKind::bce) == (model.task == TaskKind::classify),
          "bce loss pairs with the classify task and vice versa");
}

std::string train_config_to_json(const TrainConfig& c) {
  json j{{"learning_rate", c.learning_rate},
         {"batch_size", c.batch_size},
         {"max_epochs", c.max_epochs},
         {"patience", c.patience},
         {"folds", c.folds},
         {"seeds", c.seeds},
         {"loss", json{{"kind", loss_name(c.loss.kind)}, {"alpha", c.loss.alpha}}},
         {"model", json::parse(config_to_json(c.model))},
         {"n_aux", c.n_aux},
         {"holdout_fraction", c.holdout_fraction},
         {"jobs", c.jobs}};
  return j.dump(2);
}

TrainConfig train_config_from_json(const std::string& text) {
  json j = json::parse(text);
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.patience = j.at("patience").get<int>();
  c.folds = j.at("folds").get<int>();
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.loss.kind = parse_loss(j.at("loss").at("kind").get<std::string>());
  c.loss.alpha = j.at("loss").at("alpha").get<double>();
  c.model = config_from_json(j.at("model").dump());
  c.n_aux = j.at("n_aux").get<int>();
  c.holdout_fraction = j.at("holdout_fraction").get<double>();
  c.jobs = j.at("jobs").get<int>();
  c.validate();
  return c;
}

std::string train_config_hash(const TrainConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(train_config_to_json(config))));
  return buf;
}

std::vector<Trial> load_dataset(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> trial_dirs;
  if (std::filesystem::is_directory(dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.is_directory() && std::filesystem::exists(entry.path() / "trial.json"))
        trial_dirs.push_back(entry.path());
  }
  if (trial_dirs.empty())
    throw EmptyDataset("no trial directories under " + dir.string());
  std::sort(trial_dirs.begin(), trial_dirs.end());
  std::vector<Trial> trials;
  trials.reserve(trial_dirs.size());
  for (const auto& d : trial_dirs) trials.push_back(load_trial(d));
  return trials;
}

PreparedDataset prepare_dataset(std::vector<Trial> trials, const ModelConfig& model_config,
                                int n_aux) {
  model_config.validate();
  if (trials.empty()) throw EmptyDataset("prepare_dataset: no trials");
  PreparedDataset data;
  data.n_aux = n_aux;
  data.trials.reserve(trials.size());
  data.layouts.reserve(trials.size());
  for (const Trial& trial : trials) {
    double aspect = trial.page_width_px > 0
                        ? static_cast<double>(trial.page_height_px) / trial.page_width_px
                        : 1.0;
    AugmentedLayout layout = place_auxiliary_slots(trial.slots, n_aux, aspect);
    PreparedTrial p;
    p.id = trial.id;
    p.features = pad_truncate(cursor_features(trial, layout), model_config.max_seq_len);
    p.slots = slot_features(layout, model_config.parameterization);
    p.label_cats = label_categories(p.slots);
    const auto n_slots = static_cast<Eigen::Index>(layout.slots.size());
    p.target_tft.resize(n_slots);
    p.target_tfc.resize(n_slots);
    for (Eigen::Index s = 0; s < n_slots; ++s) {
      SlotStats stats = slot_fixation_stats(trial.fixations, layout.slots[s]);
      p.target_tft[s] = stats.tft;
      p.target_tfc[s] = stats.tfc;
      p.present[label_category(layout.slots[s].category)] = true;
      if (is_standard(layout.slots[s].category)) p.n_standard += 1;
    }
    data.trials.push_back(std::move(p));
    data.layouts.push_back(std::move(layout));
  }
  data.raw = std::move(trials);
  return data;
}

NoticeThresholds subset_thresholds(const PreparedDataset& data, const std::vector<int>& indices) {
  std::vector<Trial> sub;
  std::vector<AugmentedLayout> sub_layouts;
  sub.reserve(indices.size());
  sub_layouts.reserve(indices.size());
  for (int i : indices) {
    sub.push_back(data.raw.at(static_cast<std::size_t>(i)));
    sub_layouts.push_back(data.layouts.at(static_cast<std::size_t>(i)));
  }
  return compute_thresholds(sub, sub_layouts);
}

void apply_labels(PreparedDataset& data, const NoticeThresholds& thresholds) {
  for (std::size_t i = 0; i < data.trials.size(); ++i) {
    CategoryLabels labels = category_labels(data.raw[i], data.layouts[i], thresholds);
    data.trials[i].noticed = labels.noticed;
    data.trials[i].present = labels.present;
  }
}

SplitIndices split_holdout(int n, double test_fraction, std::uint64_t seed) {
  if (n <= 0) throw EmptyDataset("split_holdout: empty dataset");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);
  auto n_test = static_cast<int>(std::llround(test_fraction * n));
  n_test = n >= 2 ? std::clamp(n_test, 1, n - 1) : 0;
  SplitIndices split;
  split.test.assign(idx.begin(), idx.begin() + n_test);
  split.train.assign(idx.begin() + n_test, idx.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

std::vector<std::vector<int>> fold_split(const std::vector<int>& indices, int folds,
                                         std::uint64_t seed) {
  require(folds >= 2, "fold_split: folds must be at least 2");
  if (static_cast<std::size_t>(folds) > indices.size())
    throw std::invalid_argument("fold_split: more folds than trials");
  std::vector<int> shuffled = indices;
  Rng rng(seed);
  rng.shuffle(shuffled);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(folds));
  const std::size_t n = shuffled.size();
  for (int f = 0; f < folds; ++f) {
    std::size_t lo = n * static_cast<std::size_t>(f) / static_cast<std::size_t>(folds);
    std::size_t hi = n * (static_cast<std::size_t>(f) + 1) / static_cast<std::size_t>(folds);
    out[static_cast<std::size_t>(f)].assign(shuffled.begin() + static_cast<std::ptrdiff_t>(lo),
                                            shuffled.begin() + static_cast<std::ptrdiff_t>(hi));
    std::sort(out[static_cast<std::size_t>(f)].begin(), out[static_cast<std::size_t>(f)].end());
  }
  return out;
}

TrainOutcome train_model(const PreparedDataset& data, const std::vector<int>& train_idx,
                         const std::vector<int>& val_idx, const TrainConfig& config,
                         std::uint64_t seed) {
  config.validate();
  if (train_idx.empty()) throw EmptyDataset("train_model: empty training split");
  if (val_idx.empty()) throw EmptyDataset("train_model: empty validation split");
  const auto wall_start = std::chrono::steady_clock::now();

  AdSightModel model = build_model(config.model);
  nn::ParamStore params = init_params(config.model, seed);
  nn::ParamStore best = params;

  RunRecord record;
  record.config_hash = train_config_hash(config);
  record.seed = seed;
  record.best_val_loss = std::numeric_limits<double>::infinity();
  int best_epoch = -1;

  const std::size_t k_slots =
      config.jobs > 1 ? static_cast<std::size_t>(config.jobs) : std::size_t{1};
  std::vector<nn::GradStore> slot_grads;
  std::vector<double> slot_loss(k_slots, 0.0);
  for (std::size_t s = 0; s < k_slots; ++s) slot_grads.push_back(make_grads(params));

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::vector<int> order = train_idx;
    Rng shuffle_rng(mix_seed(mix_seed(seed, kTagEpoch), static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    double train_total = 0.0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t b_count =
          std::min(static_cast<std::size_t>(config.batch_size), order.size() - b0);
      nn::GradStore batch_grads = make_grads(params);
      // Per-example gradients are computed (possibly in parallel) chunk by
      // chunk, then always summed in example order: the reduction grouping is
      // identical for every job count, so results are bit-reproducible.
      for (std::size_t c0 = 0; c0 < b_count; c0 += k_slots) {
        const std::size_t c_count = std::min(k_slots, b_count - c0);
        auto run_one = [&](std::size_t s) {
          slot_grads[s].zero();
          slot_loss[s] = trial_loss(model, params,
                                    data.trials[static_cast<std::size_t>(order[b0 + c0 + s])],
                                    config.loss, &slot_grads[s]);
        };
        if (c_count == 1 || config.jobs <= 1) {
          for (std::size_t s = 0; s < c_count; ++s) run_one(s);
        } else {
          std::vector<std::thread> workers;
          workers.reserve(c_count);
          for (std::size_t s = 0; s < c_count; ++s) workers.emplace_back(run_one, s);
          for (auto& w : workers) w.join();
        }
        for (std::size_t s = 0; s < c_count; ++s) {
          batch_grads.accumulate(slot_grads[s]);
          train_total += slot_loss[s];
        }
      }
      batch_grads.scale(1.0 / static_cast<double>(b_count));
      nn::adam_step(params, batch_grads, config.learning_rate);
    }
    double train_loss = train_total / static_cast<double>(train_idx.size());

    double val_total = 0.0;
    for (int i : val_idx)
      val_total += trial_loss(model, params, data.trials[static_cast<std::size_t>(i)],
                              config.loss, nullptr);
    double val_loss = val_total / static_cast<double>(val_idx.size());

    record.epochs.push_back({train_loss, val_loss});
    if (val_loss < record.best_val_loss) {
      record.best_val_loss = val_loss;
      best_epoch = epoch;
      best = params;
    }
    if (epoch - best_epoch >= config.patience) break;
  }
  record.best_epoch = best_epoch;
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return {std::move(best), std::move(record)};
}

MetricsReport evaluate_scores(const Scorer& scorer, const PreparedDataset& data,
                              const std::vector<int>& indices, TaskKind task) {
  if (indices.empty()) throw EmptyDataset("evaluate: empty split");
  MetricsReport report;
  report.task = task;
  if (task != TaskKind::classify) {
    double mse_total = 0.0, ndcg_total = 0.0;
    int counted = 0;
    for (int i : indices) {
      const PreparedTrial& t = data.trials.at(static_cast<std::size_t>(i));
      if (t.n_standard == 0) continue;
      Eigen::VectorXd pred = scorer(t);
      const Eigen::VectorXd& target = task == TaskKind::tfc ? t.target_tfc : t.target_tft;
      auto ph = pred.head(t.n_standard);
      auto th = target.head(t.n_standard);
      mse_total += (ph - th).squaredNorm() / static_cast<double>(t.n_standard);
      ndcg_total += 100.0 * ndcg(ph, th);
      ++counted;
    }
    if (counted == 0) throw EmptyDataset("evaluate: no trials with standard slots");
    report.n_trials = counted;
    report.mse = mse_total / counted;
    report.ndcg_mean = ndcg_total / counted;
    return report;
  }

  std::array<std::vector<double>, kNumLabelCategories> probs;
  std::array<std::vector<bool>, kNumLabelCategories> labels;
  for (int i : indices) {
    const PreparedTrial& t = data.trials.at(static_cast<std::size_t>(i));
    CategoryProbs cp = classify_postprocess(scorer(t), t.label_cats);
    for (int c = 0; c < kNumLabelCategories; ++c) {
      if (!t.present[c]) continue;
      probs[c].push_back(cp.probs[c]);
      labels[c].push_back(t.noticed[c]);
    }
  }
  report.n_trials = static_cast<int>(indices.size());
  double auc_weight = 0.0, auc_sum = 0.0, f1_weight = 0.0, f1_sum = 0.0;
  for (int c = 0; c < kNumLabelCategories; ++c) {
    CategoryMetrics& m = report.per_category[static_cast<std::size_t>(c)];
    m.support = static_cast<int>(probs[c].size());
    if (m.support == 0) continue;
    m.f1 = 100.0 * f1_score(probs[c], labels[c]);
    f1_sum += m.support * m.f1;
    f1_weight += m.support;
    if (auto auc = auc_roc(probs[c], labels[c])) {
      m.auc = 100.0 * *auc;
      auc_sum += m.support * *m.auc;
      auc_weight += m.support;
    } else {
      report.one_class_categories += 1;
    }
  }
  if (f1_weight > 0.0) report.weighted_f1 = f1_sum / f1_weight;
  if (auc_weight > 0.0) report.weighted_auc = auc_sum / auc_weight;
  return report;
}

MetricsReport evaluate(const AdSightModel& model, const nn::ParamStore& params,
                       const PreparedDataset& data, const std::vector<int>& indices) {
  Scorer scorer = [&](const PreparedTrial& t) {
    return model_forward(model, params, t.features, t.slots, nullptr);
  };
  return evaluate_scores(scorer, data, indices, model.config.task);
}

std::string metrics_to_json(const MetricsReport& r) {
  json j{{"task", task_name(r.task)}, {"n_trials", r.n_trials}};
  if (r.mse) j["mse"] = *r.mse;
  if (r.ndcg_mean) j["ndcg"] = *r.ndcg_mean;
  if (r.task == TaskKind::classify) {
    json cats = json::array();
    for (int c = 0; c < kNumLabelCategories; ++c) {
      const CategoryMetrics& m = r.per_category[static_cast<std::size_t>(c)];
      json e{{"category", c}, {"support", m.support}, {"f1", m.f1}};
      e["auc"] = m.auc ? json(*m.auc) : json(nullptr);
      cats.push_back(std::move(e));
    }
    j["per_category"] = std::move(cats);
    j["one_class_categories"] = r.one_class_categories;
    if (r.weighted_auc) j["weighted_auc"] = *r.weighted_auc;
    if (r.weighted_f1) j["weighted_f1"] = *r.weighted_f1;
  }
  return j.dump(2);
}

MetricsReport metrics_from_json(const std::string& text) {
  json j = json::parse(text);
  MetricsReport r;
  r.task = parse_task(j.at("task").get<std::string>());
  r.n_trials = j.at("n_trials").get<int>();
  if (j.contains("mse")) r.mse = j.at("mse").get<double>();
  if (j.contains("ndcg")) r.ndcg_mean = j.at("ndcg").get<double>();
  if (j.contains("per_category")) {
    for (const json& e : j.at("per_category")) {
      auto c = static_cast<std::size_t>(e.at("category").get<int>());
      CategoryMetrics& m = r.per_category.at(c);
      m.support = e.at("support").get<int>();
      m.f1 = e.at("f1").get<double>();
      if (!e.at("auc").is_null()) m.auc = e.at("auc").get<double>();
    }
    r.one_class_categories = j.at("one_class_categories").get<int>();
    if (j.contains("weighted_auc")) r.weighted_auc = j.at("weighted_auc").get<double>();
    if (j.contains("weighted_f1")) r.weighted_f1 = j.at("weighted_f1").get<double>();
  }
  return r;
}

std::string run_record_to_json(const RunRecord& r) {
  json epochs = json::array();
  for (const EpochStats& e : r.epochs) epochs.push_back(json::array({e.train_loss, e.val_loss}));
  json j{{"config_hash", r.config_hash},
         {"seed", r.seed},
         {"epochs", std::move(epochs)},
         {"best_epoch", r.best_epoch},
         {"best_val_loss", r.best_val_loss},
         {"wall_seconds", r.wall_seconds},
         {"failed", r.failed},
         {"error", r.error}};
  return j.dump();
}

CvResult cross_validate(PreparedDataset& data, const std::vector<int>& indices,
                        const TrainConfig& config, std::uint64_t seed) {
  config.validate();
  auto folds = fold_split(indices, config.folds, mix_seed(seed, kTagFold));
  CvResult result;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<int> train_part;
    for (std::size_t g = 0; g < folds.size(); ++g)
      if (g != f) train_part.insert(train_part.end(), folds[g].begin(), folds[g].end());
    // Thresholds from this fold's training part only, then relabel before
    // training/validation so the held-out fold never leaks into them.
    apply_labels(data, subset_thresholds(data, train_part));
    TrainOutcome outcome = train_model(data, train_part, folds[f], config,
                                       mix_seed(mix_seed(seed, kTagFold), f));
    AdSightModel model = build_model(config.model);
    MetricsReport metrics = evaluate(model, outcome.params, data, folds[f]);
    result.folds.push_back({folds[f], std::move(outcome.record), std::move(metrics)});
  }
  double total = 0.0;
  for (const FoldResult& fr : result.folds) total += fr.record.best_val_loss;
  result.mean_val_loss = total / static_cast<double>(result.folds.size());
  double ss = 0.0;
  for (const FoldResult& fr : result.folds) {
    double d = fr.record.best_val_loss - result.mean_val_loss;
    ss += d * d;
  }
  result.std_val_loss =
      result.folds.size() > 1 ? std::sqrt(ss / static_cast<double>(result.folds.size() - 1)) : 0.0;
  return result;
}

std::vector<GridPoint> full_grid() {
  std::vector<GridPoint> grid;
  for (int latent : {16, 32, 64})
    for (double lr : {1e-3, 1e-4, 1e-5})
      for (int batch : {16, 32, 64})
        for (double alpha : {0.0, 0.33, 0.66, 1.0})
          for (int n_aux : {0, 1, 2, 3, 4}) grid.push_back({latent, lr, batch, alpha, n_aux});
  return grid;
}

std::vector<SearchEntry> hyper_search(const std::vector<Trial>& trials, const TrainConfig& base,
                                      int budget, std::uint64_t seed) {
  base.validate();
  if (trials.empty()) throw EmptyDataset("hyper_search: no trials");
  require(budget >= 1, "hyper_search: budget must be at least 1");
  const auto grid = full_grid();
  std::vector<int> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  if (static_cast<std::size_t>(budget) < grid.size()) {
    Rng rng(mix_seed(seed, kTagSearch));
    rng.shuffle(order);
    order.resize(static_cast<std::size_t>(budget));
  }
  std::vector<SearchEntry> entries;
  entries.reserve(order.size());
  for (int gi : order) {
    SearchEntry entry;
    entry.point = grid[static_cast<std::size_t>(gi)];
    entry.grid_index = gi;
    TrainConfig cand = base;
    cand.model.latent_size = entry.point.latent;
    cand.learning_rate = entry.point.learning_rate;
    cand.batch_size = entry.point.batch;
    cand.loss.alpha = entry.point.alpha;
    cand.n_aux = entry.point.n_aux;
    try {
      PreparedDataset prep = prepare_dataset(trials, cand.model, cand.n_aux);
      std::vector<int> all(trials.size());
      std::iota(all.begin(), all.end(), 0);
      entry.cv = cross_validate(prep, all, cand, mix_seed(seed, static_cast<std::uint64_t>(gi)));
      entry.mean_val_loss = entry.cv.mean_val_loss;
    } catch (const nn::NonFiniteGradient& ex) {
      entry.failed = true;
      entry.error = ex.what();
      entry.mean_val_loss = std::numeric_limits<double>::infinity();
    }
    entries.push_back(std::move(entry));
  }
  std::stable_sort(entries.begin(), entries.end(), [](const SearchEntry& a, const SearchEntry& b) {
    if (a.failed != b.failed) return !a.failed;
    return a.mean_val_loss < b.mean_val_loss;
  });
  return entries;
}

ExperimentResult run_experiment(const std::vector<Trial>& trials, const TrainConfig& config,
                                std::uint64_t seed) {
  config.validate();
  if (trials.empty()) throw EmptyDataset("run_experiment: no trials");
  ExperimentResult result;
  result.split = split_holdout(static_cast<int>(trials.size()), config.holdout_fraction,
                               mix_seed(seed, kTagSplit));
  PreparedDataset prep = prepare_dataset(trials, config.model, config.n_aux);
  auto inner = fold_split(result.split.train, config.folds, mix_seed(seed, kTagInner));
  std::vector<int> inner_train;
  for (std::size_t g = 1; g < inner.size(); ++g)
    inner_train.insert(inner_train.end(), inner[g].begin(), inner[g].end());
  std::sort(inner_train.begin(), inner_train.end());
  result.thresholds = subset_thresholds(prep, inner_train);
  apply_labels(prep, result.thresholds);
  result.outcome = train_model(prep, inner_train, inner[0], config, seed);
  AdSightModel model = build_model(config.model);
  result.test_metrics = evaluate(model, result.outcome.params, prep, result.split.test);
  return result;
}

}  // namespace adsight
