#include "adsight/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace adsight {

namespace {

// Indices of slots on the standard side (cats 0..3) and the auxiliary side.
void split_by_side(const Eigen::VectorXi& label_cats, std::vector<int>& standard,
                   std::vector<int>& aux) {
  for (int i = 0; i < label_cats.size(); ++i) {
    (label_cats(i) < kNumStandardCategories ? standard : aux).push_back(i);
  }
}

Eigen::VectorXd softmax(const Eigen::VectorXd& v) {
  Eigen::VectorXd e = (v.array() - v.maxCoeff()).exp();
  return e / e.sum();
}

}  // namespace

LossValue mse_aux_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target,
                       const Eigen::VectorXi& label_cats, double alpha) {
  LossValue out;
  out.grad = Eigen::VectorXd::Zero(pred.size());

  std::array<std::vector<int>, kNumLabelCategories> by_cat;
  for (int i = 0; i < label_cats.size(); ++i) by_cat[label_cats(i)].push_back(i);

  for (int c = 0; c < kNumLabelCategories; ++c) {
    const auto& idx = by_cat[c];
    if (idx.empty()) continue;
    const double weight = c == kAuxLabelCategory ? alpha : 1.0;
    if (weight == 0.0) continue;  // alpha = 0 must leave aux slots untouched
    const double inv_n = 1.0 / static_cast<double>(idx.size());
    for (int i : idx) {
      const double diff = pred(i) - target(i);
      out.value += weight * inv_n * diff * diff;
      out.grad(i) = weight * inv_n * 2.0 * diff;
    }
  }
  return out;
}

LossValue listnet_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target,
                       const Eigen::VectorXi& label_cats, double alpha) {
  LossValue out;
  out.grad = Eigen::VectorXd::Zero(pred.size());

  std::vector<int> standard, aux;
  split_by_side(label_cats, standard, aux);

  auto add_list = [&](const std::vector<int>& idx, double weight) {
    if (idx.size() < 2 || weight == 0.0) return;  // single-slot lists carry no order
    Eigen::VectorXd p_list(idx.size()), t_list(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      p_list(k) = pred(idx[k]);
      t_list(k) = target(idx[k]);
    }
    Eigen::VectorXd p = softmax(p_list);
    Eigen::VectorXd q = softmax(t_list);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      out.value -= weight * q(k) * std::log(p(k));
      out.grad(idx[k]) += weight * (p(k) - q(k));
    }
  };

  add_list(standard, 1.0);
  add_list(aux, alpha);
  return out;
}

CategoryBceResult bce_category_loss(const std::array<double, kNumLabelCategories>& probs,
                                    const std::array<bool, kNumLabelCategories>& present,
                                    const std::array<bool, kNumLabelCategories>& noticed,
                                    double alpha) {
  constexpr double kEps = 1e-7;
  CategoryBceResult out;
  for (int c = 0; c < kNumLabelCategories; ++c) {
    if (!present[c]) continue;
    const double weight = c == kAuxLabelCategory ? alpha : 1.0;
    if (weight == 0.0) continue;
    const double p = std::clamp(probs[c], kEps, 1.0 - kEps);
    const double y = noticed[c] ? 1.0 : 0.0;
    out.value += -weight * (y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    if (probs[c] > kEps && probs[c] < 1.0 - kEps) {
      out.grad[c] = weight * (p - y) / (p * (1.0 - p));
    }
  }
  return out;
}

double ndcg(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
  const int n = static_cast<int>(pred.size());
  if (n == 0) return 1.0;
  if (target.maxCoeff() <= 0.0 && target.minCoeff() >= 0.0) return 1.0;  // nothing to rank

  auto dcg_of_order = [&](const std::vector<int>& order) {
    double dcg = 0.0;
    for (int rank = 0; rank < n; ++rank) {
      dcg += target(order[rank]) / std::log2(static_cast<double>(rank) + 2.0);
    }
    return dcg;
  };

  std::vector<int> by_pred(n), ideal(n);
  std::iota(by_pred.begin(), by_pred.end(), 0);
  std::iota(ideal.begin(), ideal.end(), 0);
  std::stable_sort(by_pred.begin(), by_pred.end(),
                   [&](int a, int b) { return pred(a) > pred(b); });
  std::stable_sort(ideal.begin(), ideal.end(),
                   [&](int a, int b) { return target(a) > target(b); });

  return dcg_of_order(by_pred) / dcg_of_order(ideal);
}

std::optional<double> auc_roc(const std::vector<double>& scores, const std::vector<bool>& labels) {
  double n_pos = 0, n_neg = 0, wins = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / (n_pos * n_neg);
}

double f1_score(const std::vector<double>& probs, const std::vector<bool>& labels,
                double threshold) {
  int tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool pred = probs[i] > threshold;
    if (pred && labels[i]) {
      ++tp;
    } else if (pred && !labels[i]) {
      ++fp;
    } else if (!pred && labels[i]) {
      ++fn;
    }
  }
  if (tp + fp == 0) return fn == 0 ? 1.0 : 0.0;
  if (tp == 0) return 0.0;
  return 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
}

}  // namespace adsight
