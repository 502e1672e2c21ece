#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

#include "adsight/domain.hpp"

namespace adsight {

// Loss value plus its gradient with respect to the predictions.
struct LossValue {
  double value = 0.0;
  Eigen::VectorXd grad;
};

// Sum of per-category MSE over the standard categories present in the trial,
// plus alpha times the MSE over the pooled auxiliary slots. label_cats gives
// each slot's 5-way label category. alpha = 0 produces exactly zero gradient
// on auxiliary slots.
LossValue mse_aux_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target,
                       const Eigen::VectorXi& label_cats, double alpha);

// ListNet top-one cross entropy between softmax(target) and softmax(pred),
// evaluated over the standard slots as one list plus alpha times the same
// over the auxiliary slots. Lists with fewer than two slots contribute zero.
LossValue listnet_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target,
                       const Eigen::VectorXi& label_cats, double alpha);

// Binary cross entropy summed over the present standard categories plus alpha
// times the auxiliary term. Probabilities are clamped to [1e-7, 1 - 1e-7].
// grad (same 5-way axis) is d loss / d prob; absent categories get zero.
struct CategoryBceResult {
  double value = 0.0;
  std::array<double, kNumLabelCategories> grad{};
};
CategoryBceResult bce_category_loss(const std::array<double, kNumLabelCategories>& probs,
                                    const std::array<bool, kNumLabelCategories>& present,
                                    const std::array<bool, kNumLabelCategories>& noticed,
                                    double alpha);

// NDCG with raw targets as gains, discount log2(rank + 1), no truncation.
// Ties in predicted score resolve by ascending slot index; an all-zero target
// vector scores 1. Returns a value in [0, 1].
double ndcg(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);

// Pairwise rank statistic (equivalent to the Mann-Whitney U construction);
// ties count half. Returns nullopt when only one class is present.
std::optional<double> auc_roc(const std::vector<double>& scores, const std::vector<bool>& labels);

// F1 with the strict p > threshold decision rule. With no predicted positives:
// 0 when positives exist, 1 when there are none to find.
double f1_score(const std::vector<double>& probs, const std::vector<bool>& labels,
                double threshold = 0.5);

}  // namespace adsight
