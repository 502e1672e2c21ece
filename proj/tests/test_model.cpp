#include <array>
#include <cmath>
#include <filesystem>
#include <vector>

#include "adsight/model.hpp"
#include "adsight/nn/gradcheck.hpp"
#include "adsight/rng.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace adsight;

namespace {

// Plausible cursor features: positions in the unit square, dwell under a
// second, type codes cycling through the full -1..5 range, prefix mask.
FeatureSequence make_features(Rng& rng, int total, int valid) {
  FeatureSequence seq;
  seq.rows = Eigen::MatrixXd::Zero(total, kNumCursorFeatures);
  for (int i = 0; i < total; ++i) {
    seq.rows(i, kFeatX) = rng.uniform(0.0, 1.0);
    seq.rows(i, kFeatY) = rng.uniform(0.0, 1.0);
    seq.rows(i, kFeatDwell) = rng.uniform(0.0, 1.0);
    seq.rows(i, kFeatType) = static_cast<double>(i % 7 - 1);
    seq.rows(i, kFeatSeqIdx) = total > 1 ? static_cast<double>(i) / (total - 1) : 0.0;
  }
  seq.mask.assign(total, 0);
  for (int i = 0; i < valid; ++i) seq.mask[i] = 1;
  return seq;
}

// Center-parameterized slots with strictly increasing y centers so the
// baseline's neuron-assignment sort never sees a tie.
SlotFeatureSeq make_slots(Rng& rng, int s) {
  SlotFeatureSeq slots;
  slots.parameterization = SlotParameterization::center;
  slots.coords = Eigen::MatrixXd(s, 2);
  slots.type_codes = Eigen::VectorXi(s);
  for (int i = 0; i < s; ++i) {
    slots.coords(i, 0) = rng.uniform(0.1, 0.9);
    slots.coords(i, 1) = (i + 1.0) / (s + 1.0);
    slots.type_codes(i) = i % 6;
  }
  return slots;
}

ModelConfig small_config() {
  ModelConfig cfg;
  cfg.latent_size = 16;
  cfg.ffn_width = 64;
  cfg.max_seq_len = 16;
  return cfg;
}

// Parameters at a generic position. Behavioral and gradient properties must
// hold for arbitrary weights, not just freshly initialized ones (whose
// output layer starts at zero for trainability, which would make constant
// outputs and vanishing upstream gradients look like passes).
nn::ParamStore generic_params(const ModelConfig& cfg, std::uint64_t seed) {
  nn::ParamStore params = init_params(cfg, seed);
  Rng rng(mix_seed(seed, 0x67656eULL));
  for (auto& [name, e] : params.entries) {
    for (Eigen::Index j = 0; j < e.value.size(); ++j) {
      e.value.data()[j] += rng.uniform(-0.3, 0.3);
    }
  }
  return params;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("config: JSON round-trip preserves every field") {
    ModelConfig c;
    c.latent_size = 32;
    c.n_heads = 4;
    c.ffn_width = 128;
    c.n_encoder_layers = 1;
    c.n_decoder_layers = 3;
    c.readout = ReadoutKind::mlp_baseline;
    c.baseline_hidden_layers = 3;
    c.task = TaskKind::classify;
    c.parameterization = SlotParameterization::extremes;
    c.use_time = false;
    c.use_seq_index = false;
    c.use_pos_type = true;
    c.max_seq_len = 100;
    ModelConfig back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(back.readout == ReadoutKind::mlp_baseline);
    CHECK(back.parameterization == SlotParameterization::extremes);
    CHECK(back.cursor_input_width() == 2 + 32);
    CHECK(back.slot_coord_count() == 4);
  }

  TEST_CASE("config: hash is stable and sensitive") {
    ModelConfig a, b;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.latent_size = 32;
    CHECK(config_hash(a) != config_hash(b));
  }

  TEST_CASE("config: validate rejects inconsistent settings") {
    ModelConfig c;
    c.latent_size = 15;  // not divisible by 2 heads
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ModelConfig{};
    c.ffn_width = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ModelConfig{};
    c.max_seq_len = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ModelConfig{};
    c.baseline_hidden_layers = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }

  TEST_CASE("init_params: bitwise deterministic in the seed") {
    ModelConfig cfg = small_config();
    nn::ParamStore a = init_params(cfg, 42);
    nn::ParamStore b = init_params(cfg, 42);
    nn::ParamStore c = init_params(cfg, 43);
    REQUIRE(a.coord_count() == b.coord_count());
    double same_seed_diff = 0.0, other_seed_diff = 0.0;
    for (const auto& [name, e] : a.entries) {
      same_seed_diff = std::max(same_seed_diff, (e.value - b.value(name)).cwiseAbs().maxCoeff());
      other_seed_diff =
          std::max(other_seed_diff, (e.value - c.value(name)).cwiseAbs().maxCoeff());
    }
    CHECK(same_seed_diff == 0.0);
    CHECK(other_seed_diff > 0.0);
  }

  TEST_CASE("cursor embedding: type codes select shifted embedding rows") {
    ModelConfig cfg = small_config();
    AdSightModel model = build_model(cfg);
    nn::ParamStore params = init_params(cfg, 7);
    Rng rng(1);
    FeatureSequence seq = make_features(rng, 2, 2);
    seq.rows(0, kFeatType) = -1.0;  // outside every slot
    seq.rows(1, kFeatType) = 5.0;   // aux-right

    CursorCache cache;
    cursor_embedding(model, params, seq, &cache);
    const auto& table = params.value("cur.type_embed");
    const int l = cfg.latent_size;
    // mlp input layout: x, y, dwell, seq_index, then the embedded type.
    CHECK((cache.mlp_in.block(0, 4, 1, l) - table.row(0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((cache.mlp_in.block(1, 4, 1, l) - table.row(6)).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("metadata embedding: slot type codes shift into table rows") {
    ModelConfig cfg = small_config();
    AdSightModel model = build_model(cfg);
    nn::ParamStore params = init_params(cfg, 8);
    Rng rng(2);
    SlotFeatureSeq slots = make_slots(rng, 6);  // codes 0..5
    MetaCache cache;
    metadata_embedding(model, params, slots, &cache);
    for (int i = 0; i < 6; ++i) CHECK(cache.codes(i) == i + 1);
  }

  TEST_CASE("seq2seq forward: shapes, finiteness, regression non-negativity") {
    ModelConfig cfg = small_config();
    cfg.task = TaskKind::tft;
    AdSightModel model = build_model(cfg);
    nn::ParamStore params = generic_params(cfg, 11);
    Rng rng(3);
    FeatureSequence seq = make_features(rng, 12, 9);
    SlotFeatureSeq slots = make_slots(rng, 5);

    Eigen::VectorXd scores = adsight_forward(model, params, seq, slots, nullptr);
    REQUIRE(scores.size() == 5);
    CHECK(scores.allFinite());
    CHECK(scores.minCoeff() >= 0.0);  // ReLU output head on regression tasks

    // A single-sample cursor stream is still a valid input.
    FeatureSequence one = make_features(rng, 1, 1);
    Eigen::VectorXd s1 = adsight_forward(model, params, one, slots, nullptr);
    CHECK(s1.size() == 5);
    CHECK(s1.allFinite());
  }

  TEST_CASE("seq2seq: noise in masked padding rows never reaches the scores") {
    ModelConfig cfg = small_config();
    AdSightModel model = build_model(cfg);
    nn::ParamStore params = generic_params(cfg, 12);
    Rng rng(4);
    FeatureSequence seq = make_features(rng, 10, 7);
    SlotFeatureSeq slots = make_slots(rng, 4);

    Eigen::VectorXd base = adsight_forward(model, params, seq, slots, nullptr);
    FeatureSequence noisy = seq;
    for (int i = 7; i < 10; ++i) {
      for (int c = 0; c < kNumCursorFeatures; ++c) {
        if (c == kFeatType) continue;  // keep codes in the embedding range
        noisy.rows(i, c) += rng.uniform(-30.0, 30.0);
      }
    }
    Eigen::VectorXd out = adsight_forward(model, params, noisy, slots, nullptr);
    CHECK((out - base).cwiseAbs().maxCoeff() <= 1e-9);
  }

  TEST_CASE("seq2seq: permuting slot rows permutes scores identically") {
    ModelConfig cfg = small_config();
    AdSightModel model = build_model(cfg);
    nn::ParamStore params = generic_params(cfg, 13);
    Rng rng(5);
    FeatureSequence seq = make_features(rng, 14, 14);
    SlotFeatureSeq slots = make_slots(rng, 6);

    Eigen::VectorXd base = adsight_forward(model, params, seq, slots, nullptr);
    std::vector<int> perm = {4, 1, 5, 0, 3, 2};
    SlotFeatureSeq shuffled = slots;
    for (int i = 0; i < 6; ++i) {
      shuffled.coords.row(i) = slots.coords.row(perm[i]);
      shuffled.type_codes(i) = slots.type_codes(perm[i]);
    }
    Eigen::VectorXd out = adsight_forward(model, params, seq, shuffled, nullptr);
    for (int i = 0; i < 6; ++i) {
      CHECK(std::abs(out(i) - base(perm[i])) <= 1e-9);
    }
  }

  TEST_CASE("seq2seq: analytic gradients match finite differences") {
    ModelConfig cfg = small_config();
    cfg.task = TaskKind::classify;  // identity output head: no kink at the readout
    AdSightModel model = build_model(cfg);
    nn::ParamStore params = generic_params(cfg, 14);
    Rng rng(6);
    FeatureSequence seq = make_features(rng, 10, 8);
    SlotFeatureSeq slots = make_slots(rng, 4);
    Eigen::VectorXd C(4);
    C << 0.7, -1.1, 0.4, 1.3;

    auto loss = [&](const nn::ParamStore& p) {
      return adsight_forward(model, p, seq, slots, nullptr).dot(C);
    };
    ModelCache cache;
    adsight_forward(model, params, seq, slots, &cache);
    nn::GradStore grads = nn::make_grads(params);
    adsight_backward(model, params, cache, C, grads);
    auto result = nn::grad_check(params, loss, grads);
    INFO("worst: ", result.worst_coord);
    CHECK(result.max_rel_err <= 1e-4);
  }

  TEST_CASE("seq2seq: regression head gradients pass away from the kink") {
    ModelConfig cfg = small_config();
    cfg.task = TaskKind::tft;
    AdSightModel model = build_model(cfg);
    nn::ParamStore params = generic_params(cfg, 15);
    Rng rng(7);
    FeatureSequence seq = make_features(rng, 8, 8);
    SlotFeatureSeq slots = make_slots(rng, 3);
    Eigen::VectorXd C(3);
    C << 1.0, -0.5, 0.8;

    ModelCache cache;
    adsight_forward(model, params, seq, slots, &cache);
    // Central differences straddle the output ReLU's kink when a
    // pre-activation sits within the probe step of zero; this seed keeps
    // every one comfortably away from it.
    REQUIRE(cache.readout_pre.cwiseAbs().minCoeff() > 1e-3);

    auto loss = [&](const nn::ParamStore& p) {
      return adsight_forward(model, p, seq, slots, nullptr).dot(C);
    };
    nn::GradStore grads = nn::make_grads(params);
    adsight_backward(model, params, cache, C, grads);
    auto result = nn::grad_check(params, loss, grads);
    INFO("worst: ", result.worst_coord);
    CHECK(result.max_rel_err <= 1e-4);
  }

  TEST_CASE("baseline: output shape and the slot-count guard") {
    ModelConfig cfg = small_config();
    cfg.readout = ReadoutKind::mlp_baseline;
    AdSightModel model = build_model(cfg);
    CHECK(model.base_hidden.size() == 2);  // first maps flat -> l, second l -> l
    nn::ParamStore params = init_params(cfg, 21);
    Rng rng(8);
    FeatureSequence seq = make_features(rng, 12, 12);

    Eigen::VectorXd scores = baseline_forward(model, params, seq, make_slots(rng, 3), nullptr);
    CHECK(scores.size() == 3);
    CHECK(scores.allFinite());

    SlotFeatureSeq too_many = make_slots(rng, kMaxSlots + 1);
    CHECK_THROWS_AS(baseline_forward(model, params, seq, too_many, nullptr), TooManySlots);
  }

  TEST_CASE("baseline: neuron assignment follows the slot, not the row index") {
    ModelConfig cfg = small_config();
    cfg.readout = ReadoutKind::mlp_baseline;
    AdSightModel model = build_model(cfg);
    nn::ParamStore params = generic_params(cfg, 22);
    Rng rng(9);
    FeatureSequence seq = make_features(rng, 10, 10);
    SlotFeatureSeq slots = make_slots(rng, 5);

    Eigen::VectorXd base = baseline_forward(model, params, seq, slots, nullptr);
    std::vector<int> perm = {2, 4, 0, 1, 3};
    SlotFeatureSeq shuffled = slots;
    for (int i = 0; i < 5; ++i) {
      shuffled.coords.row(i) = slots.coords.row(perm[i]);
      shuffled.type_codes(i) = slots.type_codes(perm[i]);
    }
    Eigen::VectorXd out = baseline_forward(model, params, seq, shuffled, nullptr);
    // The sort key (category, y, x) has no ties here, so this is exact.
    for (int i = 0; i < 5; ++i) CHECK(out(i) == base(perm[i]));
  }

  TEST_CASE("baseline: garbage beyond the valid prefix is ignored exactly") {
    ModelConfig cfg = small_config();
    cfg.readout = ReadoutKind::mlp_baseline;
    AdSightModel model = build_model(cfg);
    nn::ParamStore params = generic_params(cfg, 23);
    Rng rng(10);
    SlotFeatureSeq slots = make_slots(rng, 4);

    FeatureSequence clean = make_features(rng, 16, 6);
    clean.rows.bottomRows(10).setZero();
    FeatureSequence noisy = clean;
    for (int i = 6; i < 16; ++i) {
      noisy.rows(i, kFeatX) = rng.uniform(-40.0, 40.0);
      noisy.rows(i, kFeatY) = rng.uniform(-40.0, 40.0);
      noisy.rows(i, kFeatDwell) = rng.uniform(-40.0, 40.0);
    }
    Eigen::VectorXd a = baseline_forward(model, params, clean, slots, nullptr);
    Eigen::VectorXd b = baseline_forward(model, params, noisy, slots, nullptr);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("baseline: analytic gradients match finite differences") {
    ModelConfig cfg = small_config();
    cfg.readout = ReadoutKind::mlp_baseline;
    cfg.task = TaskKind::classify;
    AdSightModel model = build_model(cfg);
    nn::ParamStore params = generic_params(cfg, 24);
    Rng rng(11);
    FeatureSequence seq = make_features(rng, 12, 12);
    SlotFeatureSeq slots = make_slots(rng, 4);
    Eigen::VectorXd C(4);
    C << -0.9, 0.6, 1.2, -0.3;

    auto loss = [&](const nn::ParamStore& p) {
      return baseline_forward(model, p, seq, slots, nullptr).dot(C);
    };
    ModelCache cache;
    baseline_forward(model, params, seq, slots, &cache);
    nn::GradStore grads = nn::make_grads(params);
    baseline_backward(model, params, cache, C, grads);
    auto result = nn::grad_check(params, loss, grads);
    INFO("worst: ", result.worst_coord);
    CHECK(result.max_rel_err <= 1e-4);
  }

  TEST_CASE("model_forward dispatches on the configured readout") {
    Rng rng(12);
    FeatureSequence seq = make_features(rng, 8, 8);
    SlotFeatureSeq slots = make_slots(rng, 3);

    ModelConfig cfg = small_config();
    AdSightModel s2s = build_model(cfg);
    nn::ParamStore p1 = init_params(cfg, 31);
    CHECK((model_forward(s2s, p1, seq, slots, nullptr) -
           adsight_forward(s2s, p1, seq, slots, nullptr))
              .cwiseAbs()
              .maxCoeff() == 0.0);

    cfg.readout = ReadoutKind::mlp_baseline;
    AdSightModel base = build_model(cfg);
    nn::ParamStore p2 = init_params(cfg, 31);
    CHECK((model_forward(base, p2, seq, slots, nullptr) -
           baseline_forward(base, p2, seq, slots, nullptr))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }

  TEST_CASE("label_categories pools aux kinds into the fifth category") {
    Rng rng(13);
    SlotFeatureSeq slots = make_slots(rng, 6);  // codes 0,1,2,3,4,5
    Eigen::VectorXi cats = label_categories(slots);
    CHECK(cats(0) == 0);
    CHECK(cats(3) == 3);
    CHECK(cats(4) == 4);
    CHECK(cats(5) == 4);  // both aux kinds share one label category
  }

  TEST_CASE("classify_postprocess: per-category means through a sigmoid") {
    Eigen::VectorXd scores(3);
    scores << 0.2, 0.8, 0.0;
    Eigen::VectorXi cats(3);
    cats << 0, 0, 2;
    CategoryProbs out = classify_postprocess(scores, cats);
    CHECK(out.present[0]);
    CHECK(out.counts[0] == 2);
    CHECK(out.means[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out.probs[0] == doctest::Approx(1.0 / (1.0 + std::exp(-0.5))).epsilon(1e-12));
    // A zero logit is exactly 0.5, which the strict > 0.5 rule calls "not noticed".
    CHECK(out.probs[2] == 0.5);
    CHECK_FALSE(out.probs[2] > 0.5);
    CHECK_FALSE(out.present[1]);
    CHECK(out.probs[1] == 0.0);
    CHECK(out.counts[3] == 0);
  }

  TEST_CASE("classify_grad_to_scores matches finite differences") {
    Rng rng(14);
    Eigen::VectorXd scores(6);
    for (int i = 0; i < 6; ++i) scores(i) = rng.uniform(-2.0, 2.0);
    Eigen::VectorXi cats(6);
    cats << 0, 0, 1, 2, 4, 4;
    std::array<double, kNumLabelCategories> w{0.3, -1.2, 0.8, 0.0, 1.7};

    auto loss = [&](const Eigen::VectorXd& s) {
      CategoryProbs p = classify_postprocess(s, cats);
      double total = 0.0;
      for (int c = 0; c < kNumLabelCategories; ++c) total += w[c] * p.probs[c];
      return total;
    };

    CategoryProbs probs = classify_postprocess(scores, cats);
    Eigen::VectorXd analytic = classify_grad_to_scores(probs, w, cats);
    const double h = 1e-6;
    for (int i = 0; i < 6; ++i) {
      Eigen::VectorXd up = scores, dn = scores;
      up(i) += h;
      dn(i) -= h;
      double numeric = (loss(up) - loss(dn)) / (2 * h);
      CHECK(analytic(i) == doctest::Approx(numeric).epsilon(1e-5));
    }
  }

  TEST_CASE("checkpoint: save/load round-trips parameters bitwise") {
    adsight::test::TempDir tmp("ckpt");
    ModelConfig cfg = small_config();
    cfg.task = TaskKind::tfc;
    nn::ParamStore params = init_params(cfg, 777);
    const auto path = tmp.path() / "model.ckpt";
    save_checkpoint(path, params, cfg, 777);

    Checkpoint back = load_checkpoint(path);
    CHECK(back.seed == 777);
    CHECK(config_to_json(back.config) == config_to_json(cfg));
    REQUIRE(back.params.coord_count() == params.coord_count());
    double max_diff = 0.0;
    for (const auto& [name, e] : params.entries) {
      max_diff = std::max(max_diff, (e.value - back.params.value(name)).cwiseAbs().maxCoeff());
    }
    CHECK(max_diff == 0.0);

    // Restored parameters drive the model to identical outputs.
    AdSightModel model = build_model(cfg);
    Rng rng(15);
    FeatureSequence seq = make_features(rng, 9, 9);
    SlotFeatureSeq slots = make_slots(rng, 4);
    Eigen::VectorXd a = model_forward(model, params, seq, slots, nullptr);
    Eigen::VectorXd b = model_forward(model, back.params, seq, slots, nullptr);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("checkpoint: truncated files are rejected") {
    adsight::test::TempDir tmp("ckpt_bad");
    ModelConfig cfg = small_config();
    nn::ParamStore params = init_params(cfg, 5);
    const auto path = tmp.path() / "model.ckpt";
    save_checkpoint(path, params, cfg, 5);

    // Chop off the last kilobyte of tensor data.
    const auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 1024);
    CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
  }
}
