#pragma once

#include <vector>

#include "adsight/domain.hpp"

namespace adsight {

// A slot list plus bookkeeping from auxiliary augmentation. `slots` keeps the
// standard slots first (in their original order) followed by aux-main boxes
// top to bottom, then aux-right boxes.
struct AugmentedLayout {
  std::vector<SlotBox> slots;
  int n_aux_main = 0;          // count of aux-main boxes actually placed
  bool augmented = false;      // true once place_auxiliary_slots has run
  bool gap_collapsed = false;  // aux-main boxes were requested but the gap had no height
};

// Wraps standard slots without augmentation (point_slot_type works either way).
AugmentedLayout make_layout(const std::vector<SlotBox>& slots);

// Adds whitespace slots around the standard ones:
//   * n_aux_main equal-height boxes partition the vertical gap between the
//     bottom edge of the last direct-top/organic-top slot and the top edge of
//     the first organic-bottom slot, spanning the main column's horizontal
//     extent (fallback [0, 0.7] when no main-column slot exists). A missing
//     boundary slot extends the gap to the page edge on that side.
//   * With no direct-right slot: two aux-right boxes in the right 30% of the
//     page at quarter-page height, centered at y = 0.375 and 0.625. With one:
//     a single aux-right box directly below it, same width and height,
//     clipped to the page.
// A non-positive gap sets gap_collapsed and yields zero aux-main boxes; this
// is a warning, not an error. Throws std::invalid_argument on non-standard
// input categories or negative n_aux_main, std::length_error when the result
// would exceed kMaxSlots.
AugmentedLayout place_auxiliary_slots(const std::vector<SlotBox>& slots, int n_aux_main,
                                      double page_aspect);

// Category code of the slot containing (x, y), or -1 for free space. Boxes
// are half-open; standard slots take precedence over auxiliary ones, and the
// smallest-area box wins within the same precedence class.
int point_slot_type(const AugmentedLayout& layout, double x, double y);

}  // namespace adsight
