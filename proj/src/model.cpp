#include "adsight/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "json.hpp"

namespace adsight {

using nlohmann::json;

const char* readout_name(ReadoutKind k) {
  return k == ReadoutKind::seq2seq ? "seq2seq" : "mlp_baseline";
}

ReadoutKind parse_readout(const std::string& name) {
  if (name == "seq2seq") return ReadoutKind::seq2seq;
  if (name == "mlp_baseline") return ReadoutKind::mlp_baseline;
  throw std::invalid_argument("unknown readout: " + name);
}

const char* task_name(TaskKind k) {
  switch (k) {
    case TaskKind::tft: return "tft";
    case TaskKind::tfc: return "tfc";
    case TaskKind::classify: return "classify";
  }
  return "?";
}

TaskKind parse_task(const std::string& name) {
  if (name == "tft") return TaskKind::tft;
  if (name == "tfc") return TaskKind::tfc;
  if (name == "classify") return TaskKind::classify;
  throw std::invalid_argument("unknown task: " + name);
}

const char* parameterization_name(SlotParameterization p) {
  switch (p) {
    case SlotParameterization::center: return "center";
    case SlotParameterization::extremes: return "extremes";
    case SlotParameterization::min_plus_size: return "min_plus_size";
  }
  return "?";
}

SlotParameterization parse_parameterization(const std::string& name) {
  if (name == "center") return SlotParameterization::center;
  if (name == "extremes") return SlotParameterization::extremes;
  if (name == "min_plus_size") return SlotParameterization::min_plus_size;
  throw std::invalid_argument("unknown parameterization: " + name);
}

void ModelConfig::validate() const {
  if (latent_size <= 0) throw std::invalid_argument("latent_size must be positive");
  if (n_heads <= 0 || latent_size % n_heads != 0) {
    throw std::invalid_argument("latent_size must be divisible by n_heads");
  }
  if (ffn_width <= 0) throw std::invalid_argument("ffn_width must be positive");
  if (n_encoder_layers <= 0 || n_decoder_layers <= 0) {
    throw std::invalid_argument("layer counts must be positive");
  }
  if (baseline_hidden_layers < 1) {
    throw std::invalid_argument("baseline needs at least one hidden layer");
  }
  if (max_seq_len < 1) throw std::invalid_argument("max_seq_len must be positive");
}

std::string config_to_json(const ModelConfig& c) {
  json j = {
      {"latent_size", c.latent_size},
      {"n_heads", c.n_heads},
      {"ffn_width", c.ffn_width},
      {"n_encoder_layers", c.n_encoder_layers},
      {"n_decoder_layers", c.n_decoder_layers},
      {"readout", readout_name(c.readout)},
      {"baseline_hidden_layers", c.baseline_hidden_layers},
      {"task", task_name(c.task)},
      {"parameterization", parameterization_name(c.parameterization)},
      {"use_time", c.use_time},
      {"use_seq_index", c.use_seq_index},
      {"use_pos_type", c.use_pos_type},
      {"max_seq_len", c.max_seq_len},
  };
  return j.dump();
}

ModelConfig config_from_json(const std::string& text) {
  json j = json::parse(text);
  ModelConfig c;
  c.latent_size = j.value("latent_size", c.latent_size);
  c.n_heads = j.value("n_heads", c.n_heads);
  c.ffn_width = j.value("ffn_width", c.ffn_width);
  c.n_encoder_layers = j.value("n_encoder_layers", c.n_encoder_layers);
  c.n_decoder_layers = j.value("n_decoder_layers", c.n_decoder_layers);
  if (j.contains("readout")) c.readout = parse_readout(j.at("readout").get<std::string>());
  c.baseline_hidden_layers = j.value("baseline_hidden_layers", c.baseline_hidden_layers);
  if (j.contains("task")) c.task = parse_task(j.at("task").get<std::string>());
  if (j.contains("parameterization")) {
    c.parameterization = parse_parameterization(j.at("parameterization").get<std::string>());
  }
  c.use_time = j.value("use_time", c.use_time);
  c.use_seq_index = j.value("use_seq_index", c.use_seq_index);
  c.use_pos_type = j.value("use_pos_type", c.use_pos_type);
  c.max_seq_len = j.value("max_seq_len", c.max_seq_len);
  c.validate();
  return c;
}

std::string config_hash(const ModelConfig& config) {
  const std::string text = config_to_json(config);  // nlohmann keeps keys sorted
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Builds the layer bindings; when store/rng are given the parameters are also
// created and initialized, so init_params and build_model can never disagree
// about names.
AdSightModel assemble(const ModelConfig& config, nn::ParamStore* store, Rng* rng) {
  config.validate();
  AdSightModel model;
  model.config = config;
  const int l = config.latent_size;

  auto make_linear = [&](const std::string& prefix, int in, int out) {
    return store ? nn::LinearLayer::create(*store, prefix, in, out, *rng)
                 : nn::LinearLayer::bind(prefix);
  };
  auto make_embed = [&](const std::string& name) {
    if (store) nn::init_embedding(store->add(name, kTypeVocab, l), *rng);
    return name;
  };

  model.cur_mlp1 = make_linear("cur.mlp1", config.cursor_input_width(), l);
  model.cur_mlp2 = make_linear("cur.mlp2", l, l);
  if (config.use_pos_type) model.cur_type_embed = make_embed("cur.type_embed");
  model.encoder = store ? nn::TransformerEncoder::create(*store, "enc", config.n_encoder_layers, l,
                                                         config.n_heads, config.ffn_width, *rng)
                        : nn::TransformerEncoder::bind("enc", config.n_encoder_layers, l,
                                                       config.n_heads);

  if (config.readout == ReadoutKind::seq2seq) {
    for (int j = 0; j < config.slot_coord_count(); ++j) {
      model.meta_coord.push_back(make_linear("meta.coord" + std::to_string(j), 1, l));
    }
    model.meta_type_embed = make_embed("meta.type_embed");
    model.meta_dense = make_linear("meta.dense", config.meta_concat_width(), l);
    model.decoder = store ? nn::TransformerDecoder::create(*store, "dec", config.n_decoder_layers,
                                                           l, config.n_heads, config.ffn_width,
                                                           *rng)
                          : nn::TransformerDecoder::bind("dec", config.n_decoder_layers, l,
                                                         config.n_heads);
    model.readout_fc1 = make_linear("readout.fc1", l, l);
    model.readout_fc2 = make_linear("readout.fc2", l, 1);
  } else {
    model.base_hidden.push_back(make_linear("base.fc0", config.max_seq_len * l, l));
    for (int j = 1; j < config.baseline_hidden_layers; ++j) {
      model.base_hidden.push_back(make_linear("base.fc" + std::to_string(j), l, l));
    }
    model.base_out = make_linear("base.out", l, kBaselineOutputs);
  }
  return model;
}

Eigen::VectorXi type_codes_from_features(const Eigen::MatrixXd& rows) {
  Eigen::VectorXi codes(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    codes(i) = static_cast<int>(std::lround(rows(i, kFeatType))) + 1;
  }
  return codes;
}

// Slot centers regardless of parameterization, for the baseline's fixed
// neuron assignment.
std::pair<double, double> slot_center(const SlotFeatureSeq& slots, int i) {
  const auto& c = slots.coords;
  switch (slots.parameterization) {
    case SlotParameterization::center:
      return {c(i, 0), c(i, 1)};
    case SlotParameterization::extremes:
      return {0.5 * (c(i, 0) + c(i, 1)), 0.5 * (c(i, 2) + c(i, 3))};
    case SlotParameterization::min_plus_size:
      return {c(i, 0) + 0.5 * c(i, 2), c(i, 1) + 0.5 * c(i, 3)};
  }
  return {0.0, 0.0};
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

AdSightModel build_model(const ModelConfig& config) { return assemble(config, nullptr, nullptr); }

nn::ParamStore init_params(const ModelConfig& config, std::uint64_t seed) {
  nn::ParamStore store;
  Rng rng(mix_seed(seed, 0x6d6f64656cULL));
  assemble(config, &store, &rng);
  // The output layer sits behind a ReLU on regression tasks, and a random
  // output weight can land every initial pre-activation in the dead
  // half-space (the gradient is then exactly zero and no seed recovers from
  // it). Starting the output layer at weight 0 / bias 0.1 puts every initial
  // prediction at the same small positive value, so the ReLU begins in its
  // linear region for every seed: the output layer's own gradient is nonzero
  // immediately, and the layers below unblock after the first update.
  for (const char* prefix : {"readout.fc2", "base.out"}) {
    auto it = store.entries.find(std::string(prefix) + ".w");
    if (it == store.entries.end()) continue;
    it->second.value.setZero();
    store.value(std::string(prefix) + ".b").setConstant(0.1);
  }
  return store;
}

Eigen::MatrixXd cursor_embedding(const AdSightModel& model, const nn::ParamStore& params,
                                 const FeatureSequence& features, CursorCache* cache) {
  const auto& cfg = model.config;
  const Eigen::Index n = features.rows.rows();
  const int l = cfg.latent_size;

  Eigen::MatrixXd mlp_in(n, cfg.cursor_input_width());
  int col = 0;
  mlp_in.col(col++) = features.rows.col(kFeatX);
  mlp_in.col(col++) = features.rows.col(kFeatY);
  if (cfg.use_time) mlp_in.col(col++) = features.rows.col(kFeatDwell);
  if (cfg.use_seq_index) mlp_in.col(col++) = features.rows.col(kFeatSeqIdx);
  Eigen::VectorXi codes;
  if (cfg.use_pos_type) {
    codes = type_codes_from_features(features.rows);
    mlp_in.middleCols(col, l) = nn::embed_forward(model.cur_type_embed, params, codes);
    col += l;
  }

  Eigen::MatrixXd h1 = nn::linear_forward(model.cur_mlp1, params, mlp_in);
  Eigen::MatrixXd latent = nn::linear_forward(model.cur_mlp2, params, nn::relu(h1));
  Eigen::MatrixXd memory = nn::encoder_forward(model.encoder, params, latent, features.mask,
                                               cache ? &cache->enc : nullptr);
  if (cache) {
    cache->mlp_in = std::move(mlp_in);
    cache->h1 = std::move(h1);
    cache->codes = std::move(codes);
    cache->mask = features.mask;
  }
  return memory;
}

namespace {

void cursor_embedding_backward(const AdSightModel& model, const nn::ParamStore& params,
                               const CursorCache& cache, const Eigen::MatrixXd& dmemory,
                               nn::GradStore& grads) {
  const auto& cfg = model.config;
  Eigen::MatrixXd dlatent = nn::encoder_backward(model.encoder, params, cache.enc, dmemory, grads);
  Eigen::MatrixXd da1 =
      nn::linear_backward(model.cur_mlp2, params, nn::relu(cache.h1), dlatent, grads);
  Eigen::MatrixXd dh1 = nn::relu_backward(cache.h1, da1);
  Eigen::MatrixXd dmlp_in = nn::linear_backward(model.cur_mlp1, params, cache.mlp_in, dh1, grads);
  if (cfg.use_pos_type) {
    nn::embed_backward(model.cur_type_embed, cache.codes,
                       dmlp_in.rightCols(cfg.latent_size), grads);
  }
}

}  // namespace

Eigen::MatrixXd metadata_embedding(const AdSightModel& model, const nn::ParamStore& params,
                                   const SlotFeatureSeq& slots, MetaCache* cache) {
  const auto& cfg = model.config;
  const Eigen::Index s = slots.coords.rows();
  const int l = cfg.latent_size;

  Eigen::MatrixXd concat(s, cfg.meta_concat_width());
  int col = 0;
  std::vector<Eigen::MatrixXd> coord_x, coord_h;
  for (int j = 0; j < cfg.slot_coord_count(); ++j) {
    Eigen::MatrixXd xj = slots.coords.col(j);
    Eigen::MatrixXd hj = nn::linear_forward(model.meta_coord[j], params, xj);
    concat.middleCols(col, l) = nn::relu(hj);
    col += l;
    coord_x.push_back(std::move(xj));
    coord_h.push_back(std::move(hj));
  }
  Eigen::VectorXi codes = slots.type_codes.array() + 1;  // shift into table rows
  concat.middleCols(col, l) = nn::embed_forward(model.meta_type_embed, params, codes);

  Eigen::MatrixXd dense_h = nn::linear_forward(model.meta_dense, params, concat);
  Eigen::MatrixXd out = nn::relu(dense_h);
  if (cache) {
    cache->coord_x = std::move(coord_x);
    cache->coord_h = std::move(coord_h);
    cache->codes = std::move(codes);
    cache->concat = std::move(concat);
    cache->dense_h = std::move(dense_h);
  }
  return out;
}

namespace {

void metadata_embedding_backward(const AdSightModel& model, const nn::ParamStore& params,
                                 const MetaCache& cache, const Eigen::MatrixXd& dout,
                                 nn::GradStore& grads) {
  const auto& cfg = model.config;
  const int l = cfg.latent_size;
  Eigen::MatrixXd ddense_h = nn::relu_backward(cache.dense_h, dout);
  Eigen::MatrixXd dconcat =
      nn::linear_backward(model.meta_dense, params, cache.concat, ddense_h, grads);
  int col = 0;
  for (int j = 0; j < cfg.slot_coord_count(); ++j) {
    Eigen::MatrixXd dhj = nn::relu_backward(cache.coord_h[j], dconcat.middleCols(col, l));
    nn::linear_backward(model.meta_coord[j], params, cache.coord_x[j], dhj, grads);
    col += l;
  }
  nn::embed_backward(model.meta_type_embed, cache.codes, dconcat.middleCols(col, l), grads);
}

}  // namespace

Eigen::VectorXd adsight_forward(const AdSightModel& model, const nn::ParamStore& params,
                                const FeatureSequence& features, const SlotFeatureSeq& slots,
                                ModelCache* cache) {
  const auto& cfg = model.config;
  Eigen::MatrixXd memory = cursor_embedding(model, params, features, cache ? &cache->cursor : nullptr);
  Eigen::MatrixXd tgt = metadata_embedding(model, params, slots, cache ? &cache->meta : nullptr);
  Eigen::MatrixXd dec_out = nn::decoder_forward(model.decoder, params, tgt, memory, features.mask,
                                                cache ? &cache->dec : nullptr);
  Eigen::MatrixXd h = nn::linear_forward(model.readout_fc1, params, dec_out);
  Eigen::MatrixXd pre = nn::linear_forward(model.readout_fc2, params, nn::relu(h));
  Eigen::MatrixXd out = cfg.task == TaskKind::classify ? pre : nn::relu(pre);
  if (cache) {
    cache->memory = std::move(memory);
    cache->dec_out = std::move(dec_out);
    cache->readout_h = std::move(h);
    cache->readout_pre = std::move(pre);
  }
  return out.col(0);
}

void adsight_backward(const AdSightModel& model, const nn::ParamStore& params,
                      const ModelCache& cache, const Eigen::VectorXd& dscores,
                      nn::GradStore& grads) {
  const auto& cfg = model.config;
  Eigen::MatrixXd dout = dscores;
  Eigen::MatrixXd dpre =
      cfg.task == TaskKind::classify ? dout : nn::relu_backward(cache.readout_pre, dout);
  Eigen::MatrixXd da =
      nn::linear_backward(model.readout_fc2, params, nn::relu(cache.readout_h), dpre, grads);
  Eigen::MatrixXd dh = nn::relu_backward(cache.readout_h, da);
  Eigen::MatrixXd ddec_out = nn::linear_backward(model.readout_fc1, params, cache.dec_out, dh, grads);
  auto [dtgt, dmemory] = nn::decoder_backward(model.decoder, params, cache.dec, ddec_out, grads);
  metadata_embedding_backward(model, params, cache.meta, dtgt, grads);
  cursor_embedding_backward(model, params, cache.cursor, dmemory, grads);
}

Eigen::VectorXd baseline_forward(const AdSightModel& model, const nn::ParamStore& params,
                                 const FeatureSequence& features, const SlotFeatureSeq& slots,
                                 ModelCache* cache) {
  const auto& cfg = model.config;
  const int s = static_cast<int>(slots.coords.rows());
  if (s > kMaxSlots) {
    throw TooManySlots("baseline supports at most " + std::to_string(kMaxSlots) + " slots, got " +
                       std::to_string(s));
  }
  const int l = cfg.latent_size;

  // The encoder output at padded rows is zeroed before flattening, so padded
  // rows can never influence the result; computing on the valid prefix alone
  // is exactly equivalent and much cheaper.
  const int l_eff = std::min(features.valid_count(), cfg.max_seq_len);
  FeatureSequence prefix;
  prefix.rows = features.rows.topRows(l_eff);
  prefix.mask.assign(l_eff, 1);
  Eigen::MatrixXd memory =
      cursor_embedding(model, params, prefix, cache ? &cache->cursor : nullptr);

  Eigen::MatrixXd flat = Eigen::MatrixXd::Zero(1, cfg.max_seq_len * l);
  for (int i = 0; i < l_eff; ++i) flat.block(0, i * l, 1, l) = memory.row(i);

  Eigen::MatrixXd cur = flat;
  std::vector<Eigen::MatrixXd> base_h;
  for (const auto& fc : model.base_hidden) {
    Eigen::MatrixXd h = nn::linear_forward(fc, params, cur);
    cur = nn::relu(h);
    base_h.push_back(std::move(h));
  }
  Eigen::MatrixXd pre = nn::linear_forward(model.base_out, params, cur);
  Eigen::MatrixXd activated = cfg.task == TaskKind::classify ? pre : nn::relu(pre);

  // Fixed output-neuron assignment: slots sorted by (category code, y center,
  // x center) claim neurons 0..s-1; the rest are dropped.
  std::vector<int> order(s);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (slots.type_codes(a) != slots.type_codes(b)) {
      return slots.type_codes(a) < slots.type_codes(b);
    }
    auto [ax, ay] = slot_center(slots, a);
    auto [bx, by] = slot_center(slots, b);
    if (ay != by) return ay < by;
    if (ax != bx) return ax < bx;
    return a < b;
  });

  Eigen::VectorXd scores(s);
  for (int j = 0; j < s; ++j) scores(order[j]) = activated(0, j);

  if (cache) {
    cache->memory = std::move(memory);
    cache->flat = std::move(flat);
    cache->base_h = std::move(base_h);
    cache->base_pre = std::move(pre);
    cache->neuron_order = std::move(order);
    cache->l_eff = l_eff;
  }
  return scores;
}

void baseline_backward(const AdSightModel& model, const nn::ParamStore& params,
                       const ModelCache& cache, const Eigen::VectorXd& dscores,
                       nn::GradStore& grads) {
  const auto& cfg = model.config;
  const int l = cfg.latent_size;
  const int s = static_cast<int>(dscores.size());

  Eigen::MatrixXd dact = Eigen::MatrixXd::Zero(1, kBaselineOutputs);
  for (int j = 0; j < s; ++j) dact(0, j) = dscores(cache.neuron_order[j]);
  Eigen::MatrixXd dpre =
      cfg.task == TaskKind::classify ? dact : nn::relu_backward(cache.base_pre, dact);

  Eigen::MatrixXd d = nn::linear_backward(
      model.base_out, params,
      cache.base_h.empty() ? cache.flat : nn::relu(cache.base_h.back()), dpre, grads);
  for (std::size_t j = cache.base_h.size(); j-- > 0;) {
    d = nn::relu_backward(cache.base_h[j], d);
    const Eigen::MatrixXd& input = j == 0 ? cache.flat : nn::relu(cache.base_h[j - 1]);
    d = nn::linear_backward(model.base_hidden[j], params, input, d, grads);
  }

  Eigen::MatrixXd dmemory(cache.l_eff, l);
  for (int i = 0; i < cache.l_eff; ++i) dmemory.row(i) = d.block(0, i * l, 1, l);
  cursor_embedding_backward(model, params, cache.cursor, dmemory, grads);
}

Eigen::VectorXd model_forward(const AdSightModel& model, const nn::ParamStore& params,
                              const FeatureSequence& features, const SlotFeatureSeq& slots,
                              ModelCache* cache) {
  return model.config.readout == ReadoutKind::seq2seq
             ? adsight_forward(model, params, features, slots, cache)
             : baseline_forward(model, params, features, slots, cache);
}

void model_backward(const AdSightModel& model, const nn::ParamStore& params,
                    const ModelCache& cache, const Eigen::VectorXd& dscores,
                    nn::GradStore& grads) {
  if (model.config.readout == ReadoutKind::seq2seq) {
    adsight_backward(model, params, cache, dscores, grads);
  } else {
    baseline_backward(model, params, cache, dscores, grads);
  }
}

Eigen::VectorXi label_categories(const SlotFeatureSeq& slots) {
  Eigen::VectorXi cats(slots.type_codes.size());
  for (Eigen::Index i = 0; i < cats.size(); ++i) {
    cats(i) = slots.type_codes(i) < kNumStandardCategories ? slots.type_codes(i)
                                                           : kAuxLabelCategory;
  }
  return cats;
}

CategoryProbs classify_postprocess(const Eigen::VectorXd& scores,
                                   const Eigen::VectorXi& label_cats) {
  CategoryProbs out;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const int c = label_cats(i);
    out.means[c] += scores(i);
    out.counts[c] += 1;
    out.present[c] = true;
  }
  for (int c = 0; c < kNumLabelCategories; ++c) {
    if (!out.present[c]) continue;
    out.means[c] /= out.counts[c];
    out.probs[c] = stable_sigmoid(out.means[c]);
  }
  return out;
}

Eigen::VectorXd classify_grad_to_scores(const CategoryProbs& probs,
                                        const std::array<double, kNumLabelCategories>& dprobs,
                                        const Eigen::VectorXi& label_cats) {
  Eigen::VectorXd dscores(label_cats.size());
  for (Eigen::Index i = 0; i < label_cats.size(); ++i) {
    const int c = label_cats(i);
    const double dsig = probs.probs[c] * (1.0 - probs.probs[c]);
    dscores(i) = dprobs[c] * dsig / probs.counts[c];
  }
  return dscores;
}

void save_checkpoint(const std::filesystem::path& path, const nn::ParamStore& params,
                     const ModelConfig& config, std::uint64_t seed) {
  json header;
  header["dtype"] = "f64";
  header["seed"] = seed;
  header["config"] = json::parse(config_to_json(config));
  header["config_hash"] = config_hash(config);
  json table = json::array();
  for (const auto& [name, e] : params.entries) {
    table.push_back({{"name", name},
                     {"rows", static_cast<int>(e.value.rows())},
                     {"cols", static_cast<int>(e.value.cols())}});
  }
  header["params"] = table;

  const std::string head = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  const std::uint64_t head_len = head.size();
  out.write(reinterpret_cast<const char*>(&head_len), sizeof(head_len));
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  for (const auto& [name, e] : params.entries) {
    // Row-major traversal: explicit so the on-disk order never depends on
    // Eigen's internal layout.
    for (Eigen::Index r = 0; r < e.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < e.value.cols(); ++c) {
        const double v = e.value(r, c);
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
      }
    }
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path.string());
  std::uint64_t head_len = 0;
  in.read(reinterpret_cast<char*>(&head_len), sizeof(head_len));
  std::string head(head_len, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head_len));
  if (!in) throw std::runtime_error("truncated checkpoint header: " + path.string());
  json header = json::parse(head);

  Checkpoint ckpt;
  ckpt.seed = header.at("seed").get<std::uint64_t>();
  ckpt.config = config_from_json(header.at("config").dump());
  if (header.at("dtype").get<std::string>() != "f64") {
    throw std::runtime_error("unsupported checkpoint dtype");
  }
  for (const auto& entry : header.at("params")) {
    const auto name = entry.at("name").get<std::string>();
    const int rows = entry.at("rows").get<int>();
    const int cols = entry.at("cols").get<int>();
    auto& value = ckpt.params.add(name, rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        double v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        value(r, c) = v;
      }
    }
  }
  if (!in) throw std::runtime_error("truncated checkpoint data: " + path.string());
  return ckpt;
}

}  // namespace adsight
