#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "adsight/rng.hpp"

namespace adsight::nn {

class ShapeMismatch : public std::runtime_error {
 public:
  explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

class CodeOutOfRange : public std::out_of_range {
 public:
  explicit CodeOutOfRange(const std::string& what) : std::out_of_range(what) {}
};

class NonFiniteGradient : public std::runtime_error {
 public:
  explicit NonFiniteGradient(const std::string& what) : std::runtime_error(what) {}
};

// Named parameter tensors plus their Adam moment buffers. Vectors are stored
// as n x 1 matrices. The map keeps names sorted, which fixes iteration order
// for serialization and gradient checking.
struct ParamStore {
  struct Entry {
    Eigen::MatrixXd value;
    Eigen::MatrixXd m;  // Adam first moment
    Eigen::MatrixXd v;  // Adam second moment
  };

  std::map<std::string, Entry> entries;
  std::int64_t step = 0;  // shared Adam step count

  Eigen::MatrixXd& add(const std::string& name, int rows, int cols) {
    auto [it, inserted] = entries.try_emplace(name);
    if (!inserted) throw std::invalid_argument("duplicate parameter: " + name);
    it->second.value = Eigen::MatrixXd::Zero(rows, cols);
    it->second.m = Eigen::MatrixXd::Zero(rows, cols);
    it->second.v = Eigen::MatrixXd::Zero(rows, cols);
    return it->second.value;
  }

  Eigen::MatrixXd& value(const std::string& name) {
    auto it = entries.find(name);
    if (it == entries.end()) throw std::out_of_range("unknown parameter: " + name);
    return it->second.value;
  }

  const Eigen::MatrixXd& value(const std::string& name) const {
    auto it = entries.find(name);
    if (it == entries.end()) throw std::out_of_range("unknown parameter: " + name);
    return it->second.value;
  }

  std::size_t coord_count() const {
    std::size_t n = 0;
    for (const auto& [name, e] : entries) n += static_cast<std::size_t>(e.value.size());
    return n;
  }
};

// Gradients matching a ParamStore's shapes.
struct GradStore {
  std::map<std::string, Eigen::MatrixXd> grads;

  Eigen::MatrixXd& at(const std::string& name) {
    auto it = grads.find(name);
    if (it == grads.end()) throw std::out_of_range("unknown gradient: " + name);
    return it->second;
  }

  const Eigen::MatrixXd& at(const std::string& name) const {
    auto it = grads.find(name);
    if (it == grads.end()) throw std::out_of_range("unknown gradient: " + name);
    return it->second;
  }

  void zero() {
    for (auto& [name, g] : grads) g.setZero();
  }

  // Elementwise add another gradient set (used for ordered batch reduction).
  void accumulate(const GradStore& other) {
    for (const auto& [name, g] : other.grads) at(name) += g;
  }

  void scale(double s) {
    for (auto& [name, g] : grads) g *= s;
  }
};

inline GradStore make_grads(const ParamStore& params) {
  GradStore out;
  for (const auto& [name, e] : params.entries) {
    out.grads.emplace(name, Eigen::MatrixXd::Zero(e.value.rows(), e.value.cols()));
  }
  return out;
}

// Glorot-uniform fill for weight matrices laid out (fan_in x fan_out).
// Row-major fill order keeps initialization independent of Eigen internals.
inline void init_glorot(Eigen::MatrixXd& w, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
  }
}

// Embedding tables draw from N(0, 0.02).
inline void init_embedding(Eigen::MatrixXd& table, Rng& rng) {
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.cols(); ++c) table(r, c) = rng.normal(0.0, 0.02);
  }
}

// One Adam update over every parameter; the step count is shared so bias
// correction stays consistent across tensors. Any non-finite gradient
// coordinate rejects the whole step (store untouched).
void adam_step(ParamStore& params, const GradStore& grads, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

}  // namespace adsight::nn
