#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "adsight/domain.hpp"
#include "adsight/layout.hpp"

namespace adsight {

constexpr double kDwellClipSeconds = 10.0;
constexpr int kDefaultMaxSeqLen = 250;

// Per-timestep cursor features, one row per sample:
//   (x, y, dwell_seconds, slot_type_code, seq_index)
// mask[i] marks row i as real (vs padding added later by pad_truncate).
struct FeatureSequence {
  Eigen::MatrixXd rows;             // L x 5
  std::vector<std::uint8_t> mask;   // length L

  int valid_count() const {
    int n = 0;
    for (auto m : mask) n += m ? 1 : 0;
    return n;
  }
};

enum : int {
  kFeatX = 0,
  kFeatY = 1,
  kFeatDwell = 2,
  kFeatType = 3,
  kFeatSeqIdx = 4,
  kNumCursorFeatures = 5,
};

// Builds the feature matrix from a trial's cursor stream. Dwell is the
// forward time difference clipped at kDwellClipSeconds (0 for the final
// sample); slot_type_code comes from point_slot_type on the given layout;
// seq_index is i/(L-1) over the full, untruncated stream.
FeatureSequence cursor_features(const Trial& trial, const AugmentedLayout& layout);

// Fixes the sequence length: longer sequences keep their head, shorter ones
// are padded with all-zero rows. The mask is the all-true prefix.
FeatureSequence pad_truncate(const FeatureSequence& seq, int max_len = kDefaultMaxSeqLen);

enum class SlotParameterization { center, extremes, min_plus_size };

// Per-slot metadata rows, aligned with the layout's slot order.
struct SlotFeatureSeq {
  Eigen::MatrixXd coords;          // S x k (k = 2 or 4 depending on parameterization)
  Eigen::VectorXi type_codes;      // S, category codes 0..5
  SlotParameterization parameterization = SlotParameterization::center;
};

SlotFeatureSeq slot_features(const AugmentedLayout& layout,
                             SlotParameterization parameterization = SlotParameterization::center);

}  // namespace adsight
