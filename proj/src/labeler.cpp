#include "adsight/labeler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adsight {

namespace {

bool qualifies(const FixationEvent& f, const SlotBox& slot) {
  return f.d >= kMinFixationSeconds && slot.contains(f.x, f.y);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::infinity();
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SlotStats slot_fixation_stats(const std::vector<FixationEvent>& fixations, const SlotBox& slot) {
  SlotStats stats;
  for (const auto& f : fixations) {
    if (!qualifies(f, slot)) continue;
    stats.tft += f.d;
    stats.tfc += 1;
  }
  return stats;
}

std::vector<FixationCluster> cluster_fixations(const std::vector<FixationEvent>& fixations,
                                               const SlotBox& slot) {
  std::vector<int> pool;
  for (int i = 0; i < static_cast<int>(fixations.size()); ++i) {
    if (qualifies(fixations[i], slot)) pool.push_back(i);
  }

  const double radius = 0.5 * std::min(slot.width(), slot.height());
  std::vector<FixationCluster> clusters;
  std::vector<bool> assigned(pool.size(), false);
  std::size_t remaining = pool.size();

  while (remaining > 0) {
    // Seed: longest unassigned fixation, ties broken by earliest t.
    int seed_pos = -1;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (assigned[i]) continue;
      if (seed_pos < 0) {
        seed_pos = static_cast<int>(i);
        continue;
      }
      const auto& cand = fixations[pool[i]];
      const auto& best = fixations[pool[seed_pos]];
      if (cand.d > best.d || (cand.d == best.d && cand.t < best.t)) {
        seed_pos = static_cast<int>(i);
      }
    }

    const auto& seed = fixations[pool[seed_pos]];
    FixationCluster cluster;
    cluster.seed_index = pool[seed_pos];
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (assigned[i]) continue;
      const auto& f = fixations[pool[i]];
      if (std::hypot(f.x - seed.x, f.y - seed.y) <= radius) {
        assigned[i] = true;
        --remaining;
        cluster.members.push_back(pool[i]);
        cluster.tft += f.d;
        cluster.tfc += 1;
      }
    }
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

NoticeThresholds compute_thresholds(const std::vector<Trial>& trials,
                                    const std::vector<AugmentedLayout>& layouts) {
  std::array<std::vector<double>, kNumLabelCategories> tfts;
  std::array<std::vector<double>, kNumLabelCategories> tfcs;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    for (const auto& slot : layouts[i].slots) {
      int cat = label_category(slot.category);
      for (const auto& cluster : cluster_fixations(trials[i].fixations, slot)) {
        tfts[cat].push_back(cluster.tft);
        tfcs[cat].push_back(static_cast<double>(cluster.tfc));
      }
    }
  }
  NoticeThresholds thresholds;
  for (int c = 0; c < kNumLabelCategories; ++c) {
    thresholds.median_tft[c] = median(tfts[c]);
    thresholds.median_tfc[c] = median(tfcs[c]);
  }
  return thresholds;
}

CategoryLabels category_labels(const Trial& trial, const AugmentedLayout& layout,
                               const NoticeThresholds& thresholds) {
  CategoryLabels labels;
  for (const auto& slot : layout.slots) {
    int cat = label_category(slot.category);
    labels.present[cat] = true;
    for (const auto& cluster : cluster_fixations(trial.fixations, slot)) {
      if (cluster.tft > thresholds.median_tft[cat] && cluster.tfc > thresholds.median_tfc[cat]) {
        labels.noticed[cat] = true;
      }
    }
  }
  return labels;
}

AttentionTargets attention_targets(const Trial& trial, const AugmentedLayout& layout,
                                   const NoticeThresholds& thresholds) {
  AttentionTargets targets;
  targets.per_slot.reserve(layout.slots.size());
  for (const auto& slot : layout.slots) {
    targets.per_slot.push_back(slot_fixation_stats(trial.fixations, slot));
  }
  targets.labels = category_labels(trial, layout, thresholds);
  return targets;
}

}  // namespace adsight
