#include "adsight/nn/layers.hpp"

#include <cmath>

namespace adsight::nn {

namespace {

void check(bool ok, const std::string& what) {
  if (!ok) throw ShapeMismatch(what);
}

}  // namespace

LinearLayer LinearLayer::create(ParamStore& params, const std::string& prefix, int in, int out,
                                Rng& rng) {
  LinearLayer layer = bind(prefix);
  init_glorot(params.add(layer.w, in, out), rng);
  params.add(layer.b, out, 1);  // biases start at zero
  return layer;
}

LinearLayer LinearLayer::bind(const std::string& prefix) {
  return LinearLayer{prefix + ".w", prefix + ".b"};
}

Eigen::MatrixXd linear_forward(const LinearLayer& layer, const ParamStore& params,
                               const Eigen::MatrixXd& x) {
  const auto& w = params.value(layer.w);
  const auto& b = params.value(layer.b);
  check(x.cols() == w.rows(), "linear " + layer.w + ": input width " + std::to_string(x.cols()) +
                                  " vs " + std::to_string(w.rows()));
  Eigen::MatrixXd y;
  y.noalias() = x * w;
  y.rowwise() += b.col(0).transpose();
  return y;
}

Eigen::MatrixXd linear_backward(const LinearLayer& layer, const ParamStore& params,
                                const Eigen::MatrixXd& x, const Eigen::MatrixXd& dy,
                                GradStore& grads) {
  const auto& w = params.value(layer.w);
  grads.at(layer.w).noalias() += x.transpose() * dy;
  grads.at(layer.b).col(0) += dy.colwise().sum().transpose();
  Eigen::MatrixXd dx;
  dx.noalias() = dy * w.transpose();
  return dx;
}

Eigen::MatrixXd embed_forward(const std::string& table, const ParamStore& params,
                              const Eigen::VectorXi& codes) {
  const auto& t = params.value(table);
  Eigen::MatrixXd out(codes.size(), t.cols());
  for (Eigen::Index i = 0; i < codes.size(); ++i) {
    if (codes(i) < 0 || codes(i) >= t.rows()) {
      throw CodeOutOfRange("embed " + table + ": code " + std::to_string(codes(i)) +
                           " outside [0, " + std::to_string(t.rows()) + ")");
    }
    out.row(i) = t.row(codes(i));
  }
  return out;
}

void embed_backward(const std::string& table, const Eigen::VectorXi& codes,
                    const Eigen::MatrixXd& dy, GradStore& grads) {
  auto& g = grads.at(table);
  for (Eigen::Index i = 0; i < codes.size(); ++i) g.row(codes(i)) += dy.row(i);
}

LayerNormLayer LayerNormLayer::create(ParamStore& params, const std::string& prefix, int dim) {
  LayerNormLayer layer = bind(prefix);
  params.add(layer.gamma, dim, 1).setOnes();
  params.add(layer.beta, dim, 1);
  return layer;
}

LayerNormLayer LayerNormLayer::bind(const std::string& prefix) {
  return LayerNormLayer{prefix + ".gamma", prefix + ".beta"};
}

Eigen::MatrixXd layernorm_forward(const LayerNormLayer& layer, const ParamStore& params,
                                  const Eigen::MatrixXd& x, LayerNormCache* cache) {
  const auto& gamma = params.value(layer.gamma);
  const auto& beta = params.value(layer.beta);
  check(x.cols() == gamma.rows(), "layernorm " + layer.gamma + ": width mismatch");

  const Eigen::Index n = x.rows(), d = x.cols();
  Eigen::MatrixXd xhat(n, d);
  Eigen::VectorXd inv_std(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mean = x.row(r).mean();
    const double var = (x.row(r).array() - mean).square().sum() / static_cast<double>(d);
    const double is = 1.0 / std::sqrt(var + kLayerNormEps);
    xhat.row(r) = (x.row(r).array() - mean) * is;
    inv_std(r) = is;
  }
  Eigen::MatrixXd y = ((xhat.array().rowwise() * gamma.col(0).transpose().array()).rowwise() +
                       beta.col(0).transpose().array())
                          .matrix();
  if (cache) {
    cache->xhat = xhat;
    cache->inv_std = inv_std;
  }
  return y;
}

Eigen::MatrixXd layernorm_backward(const LayerNormLayer& layer, const ParamStore& params,
                                   const LayerNormCache& cache, const Eigen::MatrixXd& dy,
                                   GradStore& grads) {
  const auto& gamma = params.value(layer.gamma);
  const Eigen::Index n = dy.rows(), d = dy.cols();

  grads.at(layer.gamma).col(0) += dy.cwiseProduct(cache.xhat).colwise().sum().transpose();
  grads.at(layer.beta).col(0) += dy.colwise().sum().transpose();

  Eigen::MatrixXd dx(n, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    Eigen::ArrayXd dyh = dy.row(r).transpose().array() * gamma.col(0).array();
    const double m1 = dyh.mean();
    const double m2 = (dyh * cache.xhat.row(r).transpose().array()).mean();
    dx.row(r) =
        (cache.inv_std(r) * (dyh - m1 - cache.xhat.row(r).transpose().array() * m2)).transpose();
  }
  return dx;
}

AttentionLayer AttentionLayer::create(ParamStore& params, const std::string& prefix, int dim,
                                      int n_heads, Rng& rng) {
  check(dim % n_heads == 0, "attention " + prefix + ": dim not divisible by heads");
  AttentionLayer layer;
  layer.n_heads = n_heads;
  layer.dim = dim;
  layer.q = LinearLayer::create(params, prefix + ".q", dim, dim, rng);
  layer.k = LinearLayer::create(params, prefix + ".k", dim, dim, rng);
  layer.v = LinearLayer::create(params, prefix + ".v", dim, dim, rng);
  layer.o = LinearLayer::create(params, prefix + ".o", dim, dim, rng);
  return layer;
}

AttentionLayer AttentionLayer::bind(const std::string& prefix, int dim, int n_heads) {
  AttentionLayer layer;
  layer.n_heads = n_heads;
  layer.dim = dim;
  layer.q = LinearLayer::bind(prefix + ".q");
  layer.k = LinearLayer::bind(prefix + ".k");
  layer.v = LinearLayer::bind(prefix + ".v");
  layer.o = LinearLayer::bind(prefix + ".o");
  return layer;
}

Eigen::MatrixXd attention_forward(const AttentionLayer& layer, const ParamStore& params,
                                  const Eigen::MatrixXd& queries_in, const Eigen::MatrixXd& keys_in,
                                  const std::vector<std::uint8_t>& key_mask,
                                  AttentionCache* cache) {
  check(key_mask.empty() || static_cast<Eigen::Index>(key_mask.size()) == keys_in.rows(),
        "attention: key mask length mismatch");

  const Eigen::MatrixXd Q = linear_forward(layer.q, params, queries_in);
  const Eigen::MatrixXd K = linear_forward(layer.k, params, keys_in);
  const Eigen::MatrixXd V = linear_forward(layer.v, params, keys_in);

  const int d_head = layer.dim / layer.n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_head));
  const Eigen::Index n_q = Q.rows(), n_k = K.rows();

  Eigen::MatrixXd context(n_q, layer.dim);
  std::vector<Eigen::MatrixXd> attn(layer.n_heads);

  for (int h = 0; h < layer.n_heads; ++h) {
    auto Qh = Q.middleCols(h * d_head, d_head);
    auto Kh = K.middleCols(h * d_head, d_head);
    auto Vh = V.middleCols(h * d_head, d_head);

    Eigen::MatrixXd scores;
    scores.noalias() = Qh * Kh.transpose();
    scores *= scale;

    // Masked softmax per query row: max-subtraction and normalization run
    // over the valid keys only; fully masked rows yield zero attention.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_q, n_k);
    for (Eigen::Index r = 0; r < n_q; ++r) {
      double mx = -std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < n_k; ++c) {
        if (key_mask.empty() || key_mask[c]) mx = std::max(mx, scores(r, c));
      }
      if (!std::isfinite(mx)) continue;  // no valid keys
      double denom = 0.0;
      for (Eigen::Index c = 0; c < n_k; ++c) {
        if (key_mask.empty() || key_mask[c]) {
          A(r, c) = std::exp(scores(r, c) - mx);
          denom += A(r, c);
        }
      }
      A.row(r) /= denom;
    }
    context.middleCols(h * d_head, d_head).noalias() = A * Vh;
    attn[h] = std::move(A);
  }

  Eigen::MatrixXd out = linear_forward(layer.o, params, context);
  if (cache) {
    cache->q_in = queries_in;
    cache->kv_in = keys_in;
    cache->Q = Q;
    cache->K = K;
    cache->V = V;
    cache->attn = std::move(attn);
    cache->context = context;
    cache->key_mask = key_mask;
  }
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> attention_backward(const AttentionLayer& layer,
                                                               const ParamStore& params,
                                                               const AttentionCache& cache,
                                                               const Eigen::MatrixXd& dy,
                                                               GradStore& grads) {
  const int d_head = layer.dim / layer.n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_head));

  Eigen::MatrixXd dcontext = linear_backward(layer.o, params, cache.context, dy, grads);

  Eigen::MatrixXd dQ(cache.Q.rows(), layer.dim), dK(cache.K.rows(), layer.dim),
      dV(cache.V.rows(), layer.dim);

  for (int h = 0; h < layer.n_heads; ++h) {
    const auto& A = cache.attn[h];
    auto Qh = cache.Q.middleCols(h * d_head, d_head);
    auto Kh = cache.K.middleCols(h * d_head, d_head);
    auto Vh = cache.V.middleCols(h * d_head, d_head);
    auto dctx = dcontext.middleCols(h * d_head, d_head);

    dV.middleCols(h * d_head, d_head).noalias() = A.transpose() * dctx;

    Eigen::MatrixXd dA;
    dA.noalias() = dctx * Vh.transpose();

    // Softmax backward; rows of A over masked keys are zero, which zeroes the
    // corresponding dS entries automatically.
    Eigen::VectorXd rowdot = (dA.cwiseProduct(A)).rowwise().sum();
    Eigen::MatrixXd dS = A.cwiseProduct(dA.colwise() - rowdot);
    dS *= scale;

    dQ.middleCols(h * d_head, d_head).noalias() = dS * Kh;
    dK.middleCols(h * d_head, d_head).noalias() = dS.transpose() * Qh;
  }

  Eigen::MatrixXd dq_in = linear_backward(layer.q, params, cache.q_in, dQ, grads);
  Eigen::MatrixXd dkv_in = linear_backward(layer.k, params, cache.kv_in, dK, grads);
  dkv_in += linear_backward(layer.v, params, cache.kv_in, dV, grads);
  return {std::move(dq_in), std::move(dkv_in)};
}

FfnLayer FfnLayer::create(ParamStore& params, const std::string& prefix, int dim, int width,
                          Rng& rng) {
  FfnLayer layer;
  layer.fc1 = LinearLayer::create(params, prefix + ".fc1", dim, width, rng);
  layer.fc2 = LinearLayer::create(params, prefix + ".fc2", width, dim, rng);
  return layer;
}

FfnLayer FfnLayer::bind(const std::string& prefix) {
  return FfnLayer{LinearLayer::bind(prefix + ".fc1"), LinearLayer::bind(prefix + ".fc2")};
}

Eigen::MatrixXd ffn_forward(const FfnLayer& layer, const ParamStore& params,
                            const Eigen::MatrixXd& x, FfnCache* cache) {
  Eigen::MatrixXd h = linear_forward(layer.fc1, params, x);
  Eigen::MatrixXd y = linear_forward(layer.fc2, params, relu(h));
  if (cache) {
    cache->x = x;
    cache->h = std::move(h);
  }
  return y;
}

Eigen::MatrixXd ffn_backward(const FfnLayer& layer, const ParamStore& params, const FfnCache& cache,
                             const Eigen::MatrixXd& dy, GradStore& grads) {
  Eigen::MatrixXd dh = linear_backward(layer.fc2, params, relu(cache.h), dy, grads);
  dh = relu_backward(cache.h, dh);
  return linear_backward(layer.fc1, params, cache.x, dh, grads);
}

TransformerEncoder TransformerEncoder::create(ParamStore& params, const std::string& prefix,
                                              int n_layers, int dim, int n_heads, int ffn_width,
                                              Rng& rng) {
  TransformerEncoder enc;
  for (int i = 0; i < n_layers; ++i) {
    const std::string p = prefix + std::to_string(i);
    EncoderLayer layer;
    layer.self_attn = AttentionLayer::create(params, p + ".attn", dim, n_heads, rng);
    layer.ln1 = LayerNormLayer::create(params, p + ".ln1", dim);
    layer.ffn = FfnLayer::create(params, p + ".ffn", dim, ffn_width, rng);
    layer.ln2 = LayerNormLayer::create(params, p + ".ln2", dim);
    enc.layers.push_back(std::move(layer));
  }
  return enc;
}

TransformerEncoder TransformerEncoder::bind(const std::string& prefix, int n_layers, int dim,
                                            int n_heads) {
  TransformerEncoder enc;
  for (int i = 0; i < n_layers; ++i) {
    const std::string p = prefix + std::to_string(i);
    EncoderLayer layer;
    layer.self_attn = AttentionLayer::bind(p + ".attn", dim, n_heads);
    layer.ln1 = LayerNormLayer::bind(p + ".ln1");
    layer.ffn = FfnLayer::bind(p + ".ffn");
    layer.ln2 = LayerNormLayer::bind(p + ".ln2");
    enc.layers.push_back(std::move(layer));
  }
  return enc;
}

Eigen::MatrixXd encoder_forward(const TransformerEncoder& enc, const ParamStore& params,
                                const Eigen::MatrixXd& x, const std::vector<std::uint8_t>& mask,
                                EncoderCache* cache) {
  if (cache) cache->layers.resize(enc.layers.size());
  Eigen::MatrixXd cur = x;
  for (std::size_t i = 0; i < enc.layers.size(); ++i) {
    const auto& layer = enc.layers[i];
    EncoderLayerCache* lc = cache ? &cache->layers[i] : nullptr;
    if (lc) lc->x_in = cur;
    Eigen::MatrixXd attn = attention_forward(layer.self_attn, params, cur, cur, mask,
                                             lc ? &lc->attn : nullptr);
    Eigen::MatrixXd mid =
        layernorm_forward(layer.ln1, params, cur + attn, lc ? &lc->ln1 : nullptr);
    if (lc) lc->x_mid = mid;
    Eigen::MatrixXd f = ffn_forward(layer.ffn, params, mid, lc ? &lc->ffn : nullptr);
    cur = layernorm_forward(layer.ln2, params, mid + f, lc ? &lc->ln2 : nullptr);
  }
  return cur;
}

Eigen::MatrixXd encoder_backward(const TransformerEncoder& enc, const ParamStore& params,
                                 const EncoderCache& cache, const Eigen::MatrixXd& dy,
                                 GradStore& grads) {
  Eigen::MatrixXd d = dy;
  for (std::size_t i = enc.layers.size(); i-- > 0;) {
    const auto& layer = enc.layers[i];
    const auto& lc = cache.layers[i];
    Eigen::MatrixXd d_sum2 = layernorm_backward(layer.ln2, params, lc.ln2, d, grads);
    Eigen::MatrixXd d_mid = d_sum2 + ffn_backward(layer.ffn, params, lc.ffn, d_sum2, grads);
    Eigen::MatrixXd d_sum1 = layernorm_backward(layer.ln1, params, lc.ln1, d_mid, grads);
    auto [dq, dkv] = attention_backward(layer.self_attn, params, lc.attn, d_sum1, grads);
    d = d_sum1 + dq + dkv;
  }
  return d;
}

TransformerDecoder TransformerDecoder::create(ParamStore& params, const std::string& prefix,
                                              int n_layers, int dim, int n_heads, int ffn_width,
                                              Rng& rng) {
  TransformerDecoder dec;
  for (int i = 0; i < n_layers; ++i) {
    const std::string p = prefix + std::to_string(i);
    DecoderLayer layer;
    layer.self_attn = AttentionLayer::create(params, p + ".self", dim, n_heads, rng);
    layer.ln1 = LayerNormLayer::create(params, p + ".ln1", dim);
    layer.cross_attn = AttentionLayer::create(params, p + ".cross", dim, n_heads, rng);
    layer.ln2 = LayerNormLayer::create(params, p + ".ln2", dim);
    layer.ffn = FfnLayer::create(params, p + ".ffn", dim, ffn_width, rng);
    layer.ln3 = LayerNormLayer::create(params, p + ".ln3", dim);
    dec.layers.push_back(std::move(layer));
  }
  return dec;
}

TransformerDecoder TransformerDecoder::bind(const std::string& prefix, int n_layers, int dim,
                                            int n_heads) {
  TransformerDecoder dec;
  for (int i = 0; i < n_layers; ++i) {
    const std::string p = prefix + std::to_string(i);
    DecoderLayer layer;
    layer.self_attn = AttentionLayer::bind(p + ".self", dim, n_heads);
    layer.ln1 = LayerNormLayer::bind(p + ".ln1");
    layer.cross_attn = AttentionLayer::bind(p + ".cross", dim, n_heads);
    layer.ln2 = LayerNormLayer::bind(p + ".ln2");
    layer.ffn = FfnLayer::bind(p + ".ffn");
    layer.ln3 = LayerNormLayer::bind(p + ".ln3");
    dec.layers.push_back(std::move(layer));
  }
  return dec;
}

Eigen::MatrixXd decoder_forward(const TransformerDecoder& dec, const ParamStore& params,
                                const Eigen::MatrixXd& targets, const Eigen::MatrixXd& memory,
                                const std::vector<std::uint8_t>& memory_mask, DecoderCache* cache) {
  if (cache) cache->layers.resize(dec.layers.size());
  static const std::vector<std::uint8_t> kNoMask;
  Eigen::MatrixXd cur = targets;
  for (std::size_t i = 0; i < dec.layers.size(); ++i) {
    const auto& layer = dec.layers[i];
    DecoderLayerCache* lc = cache ? &cache->layers[i] : nullptr;
    if (lc) lc->y_in = cur;
    Eigen::MatrixXd self = attention_forward(layer.self_attn, params, cur, cur, kNoMask,
                                             lc ? &lc->self_attn : nullptr);
    Eigen::MatrixXd y1 = layernorm_forward(layer.ln1, params, cur + self, lc ? &lc->ln1 : nullptr);
    if (lc) lc->y1 = y1;
    Eigen::MatrixXd cross = attention_forward(layer.cross_attn, params, y1, memory, memory_mask,
                                              lc ? &lc->cross_attn : nullptr);
    Eigen::MatrixXd y2 = layernorm_forward(layer.ln2, params, y1 + cross, lc ? &lc->ln2 : nullptr);
    if (lc) lc->y2 = y2;
    Eigen::MatrixXd f = ffn_forward(layer.ffn, params, y2, lc ? &lc->ffn : nullptr);
    cur = layernorm_forward(layer.ln3, params, y2 + f, lc ? &lc->ln3 : nullptr);
  }
  return cur;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> decoder_backward(const TransformerDecoder& dec,
                                                             const ParamStore& params,
                                                             const DecoderCache& cache,
                                                             const Eigen::MatrixXd& dy,
                                                             GradStore& grads) {
  Eigen::MatrixXd d = dy;
  Eigen::MatrixXd dmemory;
  for (std::size_t i = dec.layers.size(); i-- > 0;) {
    const auto& layer = dec.layers[i];
    const auto& lc = cache.layers[i];
    Eigen::MatrixXd d_sum3 = layernorm_backward(layer.ln3, params, lc.ln3, d, grads);
    Eigen::MatrixXd d_y2 = d_sum3 + ffn_backward(layer.ffn, params, lc.ffn, d_sum3, grads);
    Eigen::MatrixXd d_sum2 = layernorm_backward(layer.ln2, params, lc.ln2, d_y2, grads);
    auto [d_y1_cross, d_mem] =
        attention_backward(layer.cross_attn, params, lc.cross_attn, d_sum2, grads);
    if (dmemory.size() == 0) {
      dmemory = d_mem;
    } else {
      dmemory += d_mem;
    }
    Eigen::MatrixXd d_y1 = d_sum2 + d_y1_cross;
    Eigen::MatrixXd d_sum1 = layernorm_backward(layer.ln1, params, lc.ln1, d_y1, grads);
    auto [dq, dkv] = attention_backward(layer.self_attn, params, lc.self_attn, d_sum1, grads);
    d = d_sum1 + dq + dkv;
  }
  return {std::move(d), std::move(dmemory)};
}

}  // namespace adsight::nn
