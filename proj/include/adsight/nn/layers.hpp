#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "adsight/nn/params.hpp"

namespace adsight::nn {

// Layers are thin bindings from a role to parameter names inside a ParamStore;
// forward/backward are free functions so composition stays explicit and every
// cached tensor is visible to the gradient checker.

struct LinearLayer {
  std::string w;  // (in x out)
  std::string b;  // (out x 1)

  static LinearLayer create(ParamStore& params, const std::string& prefix, int in, int out,
                            Rng& rng);
  static LinearLayer bind(const std::string& prefix);
};

// y = x W + 1 b^T for row-major batches x: (n x in).
Eigen::MatrixXd linear_forward(const LinearLayer& layer, const ParamStore& params,
                               const Eigen::MatrixXd& x);

// Accumulates dW, db into grads and returns dx.
Eigen::MatrixXd linear_backward(const LinearLayer& layer, const ParamStore& params,
                                const Eigen::MatrixXd& x, const Eigen::MatrixXd& dy,
                                GradStore& grads);

inline Eigen::MatrixXd relu(const Eigen::MatrixXd& x) { return x.cwiseMax(0.0); }

// dx = dy masked by the sign of the pre-activation x.
inline Eigen::MatrixXd relu_backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dy) {
  return ((x.array() > 0.0).cast<double>() * dy.array()).matrix();
}

// Row gather from an embedding table (V x dim); codes outside [0, V) throw.
Eigen::MatrixXd embed_forward(const std::string& table, const ParamStore& params,
                              const Eigen::VectorXi& codes);
void embed_backward(const std::string& table, const Eigen::VectorXi& codes,
                    const Eigen::MatrixXd& dy, GradStore& grads);

struct LayerNormLayer {
  std::string gamma;  // (dim x 1)
  std::string beta;   // (dim x 1)

  static LayerNormLayer create(ParamStore& params, const std::string& prefix, int dim);
  static LayerNormLayer bind(const std::string& prefix);
};

constexpr double kLayerNormEps = 1e-5;

struct LayerNormCache {
  Eigen::MatrixXd xhat;
  Eigen::VectorXd inv_std;
};

Eigen::MatrixXd layernorm_forward(const LayerNormLayer& layer, const ParamStore& params,
                                  const Eigen::MatrixXd& x, LayerNormCache* cache);
Eigen::MatrixXd layernorm_backward(const LayerNormLayer& layer, const ParamStore& params,
                                   const LayerNormCache& cache, const Eigen::MatrixXd& dy,
                                   GradStore& grads);

// Multi-head scaled dot-product attention with a key validity mask. Query
// rows whose valid key set is empty produce a zero attention output.
struct AttentionLayer {
  LinearLayer q, k, v, o;
  int n_heads = 1;
  int dim = 0;

  static AttentionLayer create(ParamStore& params, const std::string& prefix, int dim, int n_heads,
                               Rng& rng);
  static AttentionLayer bind(const std::string& prefix, int dim, int n_heads);
};

struct AttentionCache {
  Eigen::MatrixXd q_in, kv_in;
  Eigen::MatrixXd Q, K, V;
  std::vector<Eigen::MatrixXd> attn;  // per head, (n_q x n_k); masked columns are zero
  Eigen::MatrixXd context;            // pre-output-projection
  std::vector<std::uint8_t> key_mask;
};

// key_mask may be empty, meaning every key is valid.
Eigen::MatrixXd attention_forward(const AttentionLayer& layer, const ParamStore& params,
                                  const Eigen::MatrixXd& queries_in, const Eigen::MatrixXd& keys_in,
                                  const std::vector<std::uint8_t>& key_mask,
                                  AttentionCache* cache);

// Returns (d queries_in, d keys_in); for self-attention the caller adds both.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> attention_backward(const AttentionLayer& layer,
                                                               const ParamStore& params,
                                                               const AttentionCache& cache,
                                                               const Eigen::MatrixXd& dy,
                                                               GradStore& grads);

struct FfnLayer {
  LinearLayer fc1, fc2;

  static FfnLayer create(ParamStore& params, const std::string& prefix, int dim, int width,
                         Rng& rng);
  static FfnLayer bind(const std::string& prefix);
};

struct FfnCache {
  Eigen::MatrixXd x;
  Eigen::MatrixXd h;  // pre-ReLU hidden
};

Eigen::MatrixXd ffn_forward(const FfnLayer& layer, const ParamStore& params,
                            const Eigen::MatrixXd& x, FfnCache* cache);
Eigen::MatrixXd ffn_backward(const FfnLayer& layer, const ParamStore& params, const FfnCache& cache,
                             const Eigen::MatrixXd& dy, GradStore& grads);

// Post-norm encoder layer: x = LN1(x + attn(x)); x = LN2(x + ffn(x)).
struct EncoderLayer {
  AttentionLayer self_attn;
  LayerNormLayer ln1;
  FfnLayer ffn;
  LayerNormLayer ln2;
};

struct EncoderLayerCache {
  Eigen::MatrixXd x_in, x_mid;
  AttentionCache attn;
  LayerNormCache ln1, ln2;
  FfnCache ffn;
};

struct TransformerEncoder {
  std::vector<EncoderLayer> layers;

  static TransformerEncoder create(ParamStore& params, const std::string& prefix, int n_layers,
                                   int dim, int n_heads, int ffn_width, Rng& rng);
  static TransformerEncoder bind(const std::string& prefix, int n_layers, int dim, int n_heads);
};

struct EncoderCache {
  std::vector<EncoderLayerCache> layers;
};

Eigen::MatrixXd encoder_forward(const TransformerEncoder& enc, const ParamStore& params,
                                const Eigen::MatrixXd& x, const std::vector<std::uint8_t>& mask,
                                EncoderCache* cache);
Eigen::MatrixXd encoder_backward(const TransformerEncoder& enc, const ParamStore& params,
                                 const EncoderCache& cache, const Eigen::MatrixXd& dy,
                                 GradStore& grads);

// Post-norm decoder layer without causal masking (slots are an unordered
// set): y = LN1(y + self(y)); y = LN2(y + cross(y, memory)); y = LN3(y + ffn(y)).
struct DecoderLayer {
  AttentionLayer self_attn;
  LayerNormLayer ln1;
  AttentionLayer cross_attn;
  LayerNormLayer ln2;
  FfnLayer ffn;
  LayerNormLayer ln3;
};

struct DecoderLayerCache {
  Eigen::MatrixXd y_in, y1, y2;
  AttentionCache self_attn, cross_attn;
  LayerNormCache ln1, ln2, ln3;
  FfnCache ffn;
};

struct TransformerDecoder {
  std::vector<DecoderLayer> layers;

  static TransformerDecoder create(ParamStore& params, const std::string& prefix, int n_layers,
                                   int dim, int n_heads, int ffn_width, Rng& rng);
  static TransformerDecoder bind(const std::string& prefix, int n_layers, int dim, int n_heads);
};

struct DecoderCache {
  std::vector<DecoderLayerCache> layers;
};

Eigen::MatrixXd decoder_forward(const TransformerDecoder& dec, const ParamStore& params,
                                const Eigen::MatrixXd& targets, const Eigen::MatrixXd& memory,
                                const std::vector<std::uint8_t>& memory_mask, DecoderCache* cache);

// Returns (d targets, d memory).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> decoder_backward(const TransformerDecoder& dec,
                                                             const ParamStore& params,
                                                             const DecoderCache& cache,
                                                             const Eigen::MatrixXd& dy,
                                                             GradStore& grads);

}  // namespace adsight::nn
