#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "adsight/featurize.hpp"
#include "adsight/nn/layers.hpp"

namespace adsight {

enum class ReadoutKind { seq2seq, mlp_baseline };
enum class TaskKind { tft, tfc, classify };

const char* readout_name(ReadoutKind k);
ReadoutKind parse_readout(const std::string& name);
const char* task_name(TaskKind k);
TaskKind parse_task(const std::string& name);
const char* parameterization_name(SlotParameterization p);
SlotParameterization parse_parameterization(const std::string& name);

// Slot-type vocabulary: codes -1..5 shifted by +1 into table rows.
constexpr int kTypeVocab = 7;
constexpr int kBaselineOutputs = kMaxSlots;

struct ModelConfig {
  int latent_size = 16;
  int n_heads = 2;
  int ffn_width = 512;
  int n_encoder_layers = 2;
  int n_decoder_layers = 2;
  ReadoutKind readout = ReadoutKind::seq2seq;
  int baseline_hidden_layers = 2;  // h in {2, 3, 4}
  TaskKind task = TaskKind::tft;
  SlotParameterization parameterization = SlotParameterization::center;
  // Ablation switches for cursor-side features (position x, y always stays).
  bool use_time = true;       // dwell column
  bool use_seq_index = true;  // sequence-position column
  bool use_pos_type = true;   // embedded slot-type column
  int max_seq_len = kDefaultMaxSeqLen;  // baseline flatten length / truncation bound

  int cursor_input_width() const {
    return 2 + (use_time ? 1 : 0) + (use_seq_index ? 1 : 0) + (use_pos_type ? latent_size : 0);
  }
  int slot_coord_count() const {
    return parameterization == SlotParameterization::center ? 2 : 4;
  }
  int meta_concat_width() const { return (slot_coord_count() + 1) * latent_size; }

  // Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

std::string config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const std::string& text);
// FNV-1a over the canonical JSON form; identifies a configuration in
// checkpoints and run records.
std::string config_hash(const ModelConfig& config);

class TooManySlots : public std::runtime_error {
 public:
  explicit TooManySlots(const std::string& what) : std::runtime_error(what) {}
};

// Parameter-name bindings for every layer the config can need.
struct AdSightModel {
  ModelConfig config;
  nn::LinearLayer cur_mlp1, cur_mlp2;
  std::string cur_type_embed;
  nn::TransformerEncoder encoder;
  std::vector<nn::LinearLayer> meta_coord;
  std::string meta_type_embed;
  nn::LinearLayer meta_dense;
  nn::TransformerDecoder decoder;
  nn::LinearLayer readout_fc1, readout_fc2;
  std::vector<nn::LinearLayer> base_hidden;
  nn::LinearLayer base_out;
};

AdSightModel build_model(const ModelConfig& config);
// Creates and seeds every parameter the configured readout needs.
nn::ParamStore init_params(const ModelConfig& config, std::uint64_t seed);

struct CursorCache {
  Eigen::MatrixXd mlp_in;
  Eigen::MatrixXd h1;  // pre-ReLU hidden of the per-timestep MLP
  Eigen::VectorXi codes;
  std::vector<std::uint8_t> mask;
  nn::EncoderCache enc;
};

struct MetaCache {
  std::vector<Eigen::MatrixXd> coord_x;  // per-coordinate S x 1 inputs
  std::vector<Eigen::MatrixXd> coord_h;  // per-coordinate S x l pre-ReLU
  Eigen::VectorXi codes;
  Eigen::MatrixXd concat;
  Eigen::MatrixXd dense_h;  // S x l pre-ReLU
};

struct ModelCache {
  CursorCache cursor;
  MetaCache meta;
  nn::DecoderCache dec;
  Eigen::MatrixXd memory;
  Eigen::MatrixXd dec_out;
  Eigen::MatrixXd readout_h;    // S x l pre-ReLU
  Eigen::MatrixXd readout_pre;  // S x 1 before the output activation
  // Baseline path.
  Eigen::MatrixXd flat;                // 1 x (max_seq_len * l)
  std::vector<Eigen::MatrixXd> base_h;  // pre-ReLU hidden activations
  Eigen::MatrixXd base_pre;            // 1 x 14 before the output activation
  std::vector<int> neuron_order;       // slot index served by each kept neuron
  int l_eff = 0;
};

// Embeds the cursor stream (slot-type through the embedding table replacing
// the scalar type column, scalars straight through), applies the
// per-timestep MLP, then the masked transformer encoder.
Eigen::MatrixXd cursor_embedding(const AdSightModel& model, const nn::ParamStore& params,
                                 const FeatureSequence& features, CursorCache* cache);

// Per-slot metadata embedding: each continuous coordinate through its own
// linear + ReLU, the type code through the embedding table, concatenated and
// fused by a dense + ReLU to latent width.
Eigen::MatrixXd metadata_embedding(const AdSightModel& model, const nn::ParamStore& params,
                                   const SlotFeatureSeq& slots, MetaCache* cache);

// Full seq2seq pass: cursor embedding as encoder memory, metadata embedding
// as the decoder's (unordered, unmasked) target set, shared per-slot readout.
// Regression tasks apply ReLU to the outputs; classification leaves logits.
Eigen::VectorXd adsight_forward(const AdSightModel& model, const nn::ParamStore& params,
                                const FeatureSequence& features, const SlotFeatureSeq& slots,
                                ModelCache* cache);
void adsight_backward(const AdSightModel& model, const nn::ParamStore& params,
                      const ModelCache& cache, const Eigen::VectorXd& dscores,
                      nn::GradStore& grads);

// Baseline: shared cursor embedding, masked rows zeroed, flattened to a fixed
// max_seq_len * latent vector, plain MLP to 14 outputs. Real slots claim
// neurons in (category code, y center, x center) order; surplus neurons are
// dropped. Throws TooManySlots beyond kMaxSlots.
Eigen::VectorXd baseline_forward(const AdSightModel& model, const nn::ParamStore& params,
                                 const FeatureSequence& features, const SlotFeatureSeq& slots,
                                 ModelCache* cache);
void baseline_backward(const AdSightModel& model, const nn::ParamStore& params,
                       const ModelCache& cache, const Eigen::VectorXd& dscores,
                       nn::GradStore& grads);

// Dispatch on config.readout.
Eigen::VectorXd model_forward(const AdSightModel& model, const nn::ParamStore& params,
                              const FeatureSequence& features, const SlotFeatureSeq& slots,
                              ModelCache* cache);
void model_backward(const AdSightModel& model, const nn::ParamStore& params,
                    const ModelCache& cache, const Eigen::VectorXd& dscores,
                    nn::GradStore& grads);

// 5-way label category of each slot row (aux kinds pooled).
Eigen::VectorXi label_categories(const SlotFeatureSeq& slots);

// Classification post-processing: mean score per present category, sigmoid.
struct CategoryProbs {
  std::array<double, kNumLabelCategories> probs{};
  std::array<double, kNumLabelCategories> means{};
  std::array<bool, kNumLabelCategories> present{};
  std::array<int, kNumLabelCategories> counts{};
};
CategoryProbs classify_postprocess(const Eigen::VectorXd& scores,
                                   const Eigen::VectorXi& label_cats);
// Chain rule from d loss / d prob back to the per-slot scores.
Eigen::VectorXd classify_grad_to_scores(const CategoryProbs& probs,
                                        const std::array<double, kNumLabelCategories>& dprobs,
                                        const Eigen::VectorXi& label_cats);

// Flat binary checkpoint: little-endian uint64 header length, JSON header
// (dtype, seed, config, config hash, parameter table), then raw float64 data
// in header order.
void save_checkpoint(const std::filesystem::path& path, const nn::ParamStore& params,
                     const ModelConfig& config, std::uint64_t seed);
struct Checkpoint {
  nn::ParamStore params;
  ModelConfig config;
  std::uint64_t seed = 0;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace adsight
