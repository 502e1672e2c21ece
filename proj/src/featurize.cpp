#include "adsight/featurize.hpp"

#include <algorithm>

namespace adsight {

FeatureSequence cursor_features(const Trial& trial, const AugmentedLayout& layout) {
  const auto& cursor = trial.cursor;
  const int n = static_cast<int>(cursor.size());
  FeatureSequence seq;
  seq.rows.resize(n, kNumCursorFeatures);
  seq.mask.assign(n, 1);
  for (int i = 0; i < n; ++i) {
    const auto& c = cursor[i];
    double dwell = 0.0;
    if (i + 1 < n) dwell = std::min(cursor[i + 1].t - c.t, kDwellClipSeconds);
    seq.rows(i, kFeatX) = c.x;
    seq.rows(i, kFeatY) = c.y;
    seq.rows(i, kFeatDwell) = dwell;
    seq.rows(i, kFeatType) = point_slot_type(layout, c.x, c.y);
    seq.rows(i, kFeatSeqIdx) = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
  }
  return seq;
}

FeatureSequence pad_truncate(const FeatureSequence& seq, int max_len) {
  const int n = static_cast<int>(seq.rows.rows());
  const int kept = std::min(n, max_len);
  FeatureSequence out;
  out.rows = Eigen::MatrixXd::Zero(max_len, seq.rows.cols());
  out.rows.topRows(kept) = seq.rows.topRows(kept);
  out.mask.assign(max_len, 0);
  std::fill(out.mask.begin(), out.mask.begin() + kept, 1);
  return out;
}

SlotFeatureSeq slot_features(const AugmentedLayout& layout, SlotParameterization parameterization) {
  const int n = static_cast<int>(layout.slots.size());
  SlotFeatureSeq out;
  out.parameterization = parameterization;
  out.type_codes.resize(n);
  const int k = parameterization == SlotParameterization::center ? 2 : 4;
  out.coords.resize(n, k);
  for (int i = 0; i < n; ++i) {
    const auto& s = layout.slots[i];
    out.type_codes(i) = category_code(s.category);
    switch (parameterization) {
      case SlotParameterization::center:
        out.coords(i, 0) = s.x_center();
        out.coords(i, 1) = s.y_center();
        break;
      case SlotParameterization::extremes:
        out.coords(i, 0) = s.x_min;
        out.coords(i, 1) = s.x_max;
        out.coords(i, 2) = s.y_min;
        out.coords(i, 3) = s.y_max;
        break;
      case SlotParameterization::min_plus_size:
        out.coords(i, 0) = s.x_min;
        out.coords(i, 1) = s.y_min;
        out.coords(i, 2) = s.width();
        out.coords(i, 3) = s.height();
        break;
    }
  }
  return out;
}

}  // namespace adsight
