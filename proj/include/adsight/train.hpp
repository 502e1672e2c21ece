#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adsight/domain.hpp"
#include "adsight/featurize.hpp"
#include "adsight/labeler.hpp"
#include "adsight/model.hpp"
#include "adsight/nn/params.hpp"

namespace adsight {

enum class LossKind { mse_aux, listnet, bce };

const char* loss_name(LossKind k);
LossKind parse_loss(const std::string& name);

struct LossConfig {
  LossKind kind = LossKind::mse_aux;
  double alpha = 0.33;  // auxiliary-term weight

  void validate() const;  // throws std::invalid_argument
};

// Full training recipe. `n_aux` is the number of aux-main whitespace boxes
// added to each layout before featurization; `seeds` lists the replicate
// seeds a sweep runs (individual operations take an explicit seed).
struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int max_epochs = 100;
  int patience = 25;
  int folds = 3;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  LossConfig loss;
  ModelConfig model;
  int n_aux = 3;
  double holdout_fraction = 0.2;  // outer test split
  int jobs = 1;                   // worker threads for per-example gradients

  void validate() const;  // throws std::invalid_argument
};

std::string train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const std::string& text);
std::string train_config_hash(const TrainConfig& config);

class EmptyDataset : public std::runtime_error {
 public:
  explicit EmptyDataset(const std::string& what) : std::runtime_error(what) {}
};

// One trial ready for the model: padded cursor features over the augmented
// layout, per-slot metadata and targets, and the 5-way category labels.
// `noticed` is filled by apply_labels (it depends on labeler thresholds,
// which must come from a training split only).
struct PreparedTrial {
  std::string id;
  FeatureSequence features;
  SlotFeatureSeq slots;
  Eigen::VectorXi label_cats;
  Eigen::VectorXd target_tft;
  Eigen::VectorXd target_tfc;
  std::array<bool, kNumLabelCategories> present{};
  std::array<bool, kNumLabelCategories> noticed{};
  int n_standard = 0;  // standard slots form the slot-row prefix
};

struct PreparedDataset {
  std::vector<PreparedTrial> trials;
  std::vector<Trial> raw;  // kept for threshold computation / relabeling
  std::vector<AugmentedLayout> layouts;
  int n_aux = 0;
};

// Loads every subdirectory containing a trial.json, sorted by name. Throws
// EmptyDataset when none is found.
std::vector<Trial> load_dataset(const std::filesystem::path& dir);

// Augments each layout with n_aux aux-main boxes and featurizes every trial
// for the given model configuration. Notice labels are NOT set yet.
PreparedDataset prepare_dataset(std::vector<Trial> trials, const ModelConfig& model_config,
                                int n_aux);

// Labeler thresholds pooled over the given trial indices only.
NoticeThresholds subset_thresholds(const PreparedDataset& data, const std::vector<int>& indices);
// Recomputes every trial's notice labels under the given thresholds.
void apply_labels(PreparedDataset& data, const NoticeThresholds& thresholds);

struct SplitIndices {
  std::vector<int> train, test;
};

// Seed-shuffled outer holdout split (test gets round(fraction * n), clamped
// to leave at least one trial on each side when n >= 2).
SplitIndices split_holdout(int n, double test_fraction, std::uint64_t seed);

// Seed-shuffled partition into `folds` near-equal chunks; every index lands
// in exactly one fold.
std::vector<std::vector<int>> fold_split(const std::vector<int>& indices, int folds,
                                         std::uint64_t seed);

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct CategoryMetrics {
  int support = 0;               // trials where the category is present
  std::optional<double> auc;     // 0-100; empty when only one class appeared
  double f1 = 0.0;               // 0-100
};

// Evaluation report. Regression tasks fill mse/ndcg (NDCG scaled to 0-100);
// the classification task fills the per-category block plus support-weighted
// averages (categories whose AUC is undefined are excluded from the weighted
// AUC and counted in one_class_categories).
struct MetricsReport {
  TaskKind task = TaskKind::tft;
  int n_trials = 0;
  std::optional<double> mse;
  std::optional<double> ndcg_mean;
  std::array<CategoryMetrics, kNumLabelCategories> per_category{};
  std::optional<double> weighted_auc;
  std::optional<double> weighted_f1;
  int one_class_categories = 0;
};

std::string metrics_to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const std::string& text);

struct RunRecord {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<EpochStats> epochs;
  int best_epoch = -1;  // index into epochs
  double best_val_loss = 0.0;
  double wall_seconds = 0.0;
  bool failed = false;
  std::string error;
};

// One line of runs.jsonl (compact JSON, no trailing newline).
std::string run_record_to_json(const RunRecord& record);

struct TrainOutcome {
  nn::ParamStore params;  // best-validation checkpoint
  RunRecord record;
};

// Adam training with early stopping on the validation loss: stops after
// `patience` epochs without improvement (or at max_epochs) and returns the
// parameters from the best epoch. Batches are seed-shuffled each epoch;
// per-example gradients are summed in example order (and merely computed in
// parallel when jobs > 1), so results are bit-identical for any job count.
// Throws EmptyDataset on an empty split and propagates NonFiniteGradient.
TrainOutcome train_model(const PreparedDataset& data, const std::vector<int>& train_idx,
                         const std::vector<int>& val_idx, const TrainConfig& config,
                         std::uint64_t seed);

using Scorer = std::function<Eigen::VectorXd(const PreparedTrial&)>;

// Metrics from arbitrary per-slot scores (used for oracle/random probes).
MetricsReport evaluate_scores(const Scorer& scorer, const PreparedDataset& data,
                              const std::vector<int>& indices, TaskKind task);
// Metrics from a trained model.
MetricsReport evaluate(const AdSightModel& model, const nn::ParamStore& params,
                       const PreparedDataset& data, const std::vector<int>& indices);

struct FoldResult {
  std::vector<int> val_indices;
  RunRecord record;
  MetricsReport metrics;
};

struct CvResult {
  std::vector<FoldResult> folds;
  double mean_val_loss = 0.0;
  double std_val_loss = 0.0;  // sample standard deviation over folds
};

// K-fold cross-validation over the given indices. Thresholds are recomputed
// from each fold's training part before training, so no fold ever sees
// statistics derived from its own validation trials. The dataset's notice
// labels are rewritten per fold (and reflect the last fold on return).
CvResult cross_validate(PreparedDataset& data, const std::vector<int>& indices,
                        const TrainConfig& config, std::uint64_t seed);

struct GridPoint {
  int latent = 16;
  double learning_rate = 1e-3;
  int batch = 32;
  double alpha = 0.33;
  int n_aux = 3;
};

// The full hyperparameter grid: latent {16,32,64} x lr {1e-3,1e-4,1e-5} x
// batch {16,32,64} x alpha {0,0.33,0.66,1} x n_aux {0..4} = 540 points.
std::vector<GridPoint> full_grid();

struct SearchEntry {
  GridPoint point;
  int grid_index = 0;
  bool failed = false;
  std::string error;
  double mean_val_loss = 0.0;
  CvResult cv;
};

// Seeded random search without replacement (exhaustive when budget covers
// the grid). Every candidate is cross-validated on `trials`; entries are
// ranked by mean validation loss with failed runs last. A candidate's result
// depends only on (seed, its grid index), not on the budget.
std::vector<SearchEntry> hyper_search(const std::vector<Trial>& trials, const TrainConfig& base,
                                      int budget, std::uint64_t seed);

struct ExperimentResult {
  SplitIndices split;
  NoticeThresholds thresholds;
  TrainOutcome outcome;
  MetricsReport test_metrics;
};

// The standard protocol: outer holdout split, labeler thresholds from the
// inner training portion only, early-stopped training with an inner
// validation fold, evaluation on the untouched test portion.
ExperimentResult run_experiment(const std::vector<Trial>& trials, const TrainConfig& config,
                                std::uint64_t seed);

}  // namespace adsight
