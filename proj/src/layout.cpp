#include "adsight/layout.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace adsight {

AugmentedLayout make_layout(const std::vector<SlotBox>& slots) {
  AugmentedLayout layout;
  layout.slots = slots;
  return layout;
}

AugmentedLayout place_auxiliary_slots(const std::vector<SlotBox>& slots, int n_aux_main,
                                      double page_aspect) {
  (void)page_aspect;  // geometry is page-normalized; kept for interface stability
  if (n_aux_main < 0) throw std::invalid_argument("n_aux_main must be non-negative");
  for (const auto& s : slots) {
    if (!is_standard(s.category)) {
      throw std::invalid_argument("place_auxiliary_slots: input already augmented");
    }
  }

  AugmentedLayout layout;
  layout.slots = slots;
  layout.augmented = true;

  int next_id = 0;
  for (const auto& s : slots) next_id = std::max(next_id, s.id + 1);

  // Main-column horizontal extent: union over every slot that lives in the
  // main column (everything except direct-right).
  double main_x_min = std::numeric_limits<double>::infinity();
  double main_x_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : slots) {
    if (s.category == SlotCategory::direct_right) continue;
    main_x_min = std::min(main_x_min, s.x_min);
    main_x_max = std::max(main_x_max, s.x_max);
  }
  if (!(main_x_min < main_x_max)) {
    main_x_min = 0.0;
    main_x_max = 0.7;
  }

  // Vertical gap between top-block slots and the organic-bottom block; a
  // missing boundary extends to the page edge on that side.
  double gap_top = 0.0;
  double gap_bottom = 1.0;
  for (const auto& s : slots) {
    if (s.category == SlotCategory::direct_top || s.category == SlotCategory::organic_top) {
      gap_top = std::max(gap_top, s.y_max);
    }
    if (s.category == SlotCategory::organic_bottom) {
      gap_bottom = std::min(gap_bottom, s.y_min);
    }
  }

  if (n_aux_main > 0) {
    double gap = gap_bottom - gap_top;
    if (gap <= 0) {
      layout.gap_collapsed = true;
    } else {
      layout.n_aux_main = n_aux_main;
      for (int i = 0; i < n_aux_main; ++i) {
        SlotBox box;
        box.id = next_id++;
        box.category = SlotCategory::aux_main;
        box.x_min = main_x_min;
        box.x_max = main_x_max;
        // Shared edges computed from the same expression so adjacent boxes
        // tile the gap exactly.
        box.y_min = gap_top + gap * i / n_aux_main;
        box.y_max = gap_top + gap * (i + 1) / n_aux_main;
        layout.slots.push_back(box);
      }
    }
  }

  // Right-area aux boxes.
  const SlotBox* direct_right = nullptr;
  for (const auto& s : slots) {
    if (s.category != SlotCategory::direct_right) continue;
    if (!direct_right || s.y_max > direct_right->y_max) direct_right = &s;
  }
  if (direct_right) {
    SlotBox box;
    box.id = next_id++;
    box.category = SlotCategory::aux_right;
    box.x_min = direct_right->x_min;
    box.x_max = direct_right->x_max;
    box.y_min = direct_right->y_max;
    box.y_max = std::min(1.0, direct_right->y_max + direct_right->height());
    if (box.y_max > box.y_min) layout.slots.push_back(box);
  } else {
    for (int i = 0; i < 2; ++i) {
      SlotBox box;
      box.id = next_id++;
      box.category = SlotCategory::aux_right;
      box.x_min = 0.7;
      box.x_max = 1.0;
      box.y_min = 0.25 + 0.25 * i;
      box.y_max = 0.5 + 0.25 * i;
      layout.slots.push_back(box);
    }
  }

  if (layout.slots.size() > kMaxSlots) {
    throw std::length_error("augmented layout exceeds 14 slots");
  }
  return layout;
}

int point_slot_type(const AugmentedLayout& layout, double x, double y) {
  const SlotBox* best = nullptr;
  for (const auto& s : layout.slots) {
    if (!s.contains(x, y)) continue;
    if (!best) {
      best = &s;
      continue;
    }
    bool best_std = is_standard(best->category);
    bool cand_std = is_standard(s.category);
    if (cand_std != best_std) {
      if (cand_std) best = &s;  // standard beats auxiliary
      continue;
    }
    if (s.area() < best->area()) best = &s;  // smaller box wins ties in class
  }
  return best ? category_code(best->category) : -1;
}

}  // namespace adsight
