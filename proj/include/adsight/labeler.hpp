#pragma once

#include <array>
#include <vector>

#include "adsight/domain.hpp"
#include "adsight/layout.hpp"

namespace adsight {

// Fixations shorter than this are treated as saccade noise and ignored.
constexpr double kMinFixationSeconds = 0.1;

// Per-slot attention statistics: total fixation time (seconds) and count.
struct SlotStats {
  double tft = 0.0;
  int tfc = 0;
};

// Sums duration/count over qualifying fixations (d >= kMinFixationSeconds)
// whose position lies in the slot (half-open box test).
SlotStats slot_fixation_stats(const std::vector<FixationEvent>& fixations, const SlotBox& slot);

struct FixationCluster {
  std::vector<int> members;  // indices into the trial's fixation list
  int seed_index = -1;       // the member that seeded the cluster
  double tft = 0.0;
  int tfc = 0;
};

// Greedy spatial clustering of a slot's qualifying fixations: repeatedly take
// the longest unassigned fixation as seed (ties by earliest t) and absorb
// every unassigned fixation within radius r = 0.5 * min(slot width, height)
// of the seed. Every qualifying in-slot fixation lands in exactly one
// cluster, so cluster sums conserve slot_fixation_stats exactly.
std::vector<FixationCluster> cluster_fixations(const std::vector<FixationEvent>& fixations,
                                               const SlotBox& slot);

// Notice thresholds on the 5-way label axis (4 standard categories plus the
// pooled auxiliary bucket). Categories that produced no clusters in the
// threshold set get +infinity (nothing can be noticed there).
struct NoticeThresholds {
  std::array<double, kNumLabelCategories> median_tft{};
  std::array<double, kNumLabelCategories> median_tfc{};
};

// Pools cluster statistics across a trial set and takes per-category medians
// (mean of the middle two for even counts).
NoticeThresholds compute_thresholds(const std::vector<Trial>& trials,
                                    const std::vector<AugmentedLayout>& layouts);

struct CategoryLabels {
  std::array<bool, kNumLabelCategories> noticed{};
  std::array<bool, kNumLabelCategories> present{};
};

// A category counts as noticed when at least one cluster in one of its slots
// strictly exceeds both of that category's median thresholds.
CategoryLabels category_labels(const Trial& trial, const AugmentedLayout& layout,
                               const NoticeThresholds& thresholds);

// Full per-trial target bundle: per-slot stats aligned with layout.slots plus
// the category notice labels.
struct AttentionTargets {
  std::vector<SlotStats> per_slot;
  CategoryLabels labels;
};

AttentionTargets attention_targets(const Trial& trial, const AugmentedLayout& layout,
                                   const NoticeThresholds& thresholds);

}  // namespace adsight
