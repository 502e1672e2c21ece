#include <cmath>
#include <stdexcept>
#include <vector>

#include "adsight/layout.hpp"
#include "adsight/rng.hpp"
#include "doctest.h"

using namespace adsight;

namespace {

SlotBox box(int id, SlotCategory cat, double x_min, double y_min, double x_max, double y_max) {
  SlotBox b;
  b.id = id;
  b.category = cat;
  b.x_min = x_min;
  b.y_min = y_min;
  b.x_max = x_max;
  b.y_max = y_max;
  return b;
}

// Brute-force reference for point_slot_type: scan every box, apply the same
// precedence/area rules by exhaustive comparison instead of the production
// code path.
int oracle_point_type(const AugmentedLayout& layout, double x, double y) {
  int best = -1;
  bool best_standard = false;
  double best_area = 0;
  for (const auto& s : layout.slots) {
    if (!s.contains(x, y)) continue;
    bool std_cat = is_standard(s.category);
    bool wins = best == -1 || (std_cat && !best_standard) ||
                (std_cat == best_standard && s.area() < best_area);
    if (wins) {
      best = category_code(s.category);
      best_standard = std_cat;
      best_area = s.area();
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("layout") {
  TEST_CASE("aux-main boxes partition the inter-slot gap into N equal slices") {
    // Top slot ends at y = 0.3, bottom slot starts at y = 0.9, N = 3.
    std::vector<SlotBox> slots = {
        box(1, SlotCategory::organic_top, 0.1, 0.1, 0.7, 0.3),
        box(2, SlotCategory::organic_bottom, 0.1, 0.9, 0.7, 0.97),
    };
    auto layout = place_auxiliary_slots(slots, 3, 0.5);
    CHECK(layout.n_aux_main == 3);
    CHECK_FALSE(layout.gap_collapsed);

    std::vector<const SlotBox*> aux;
    for (const auto& s : layout.slots) {
      if (s.category == SlotCategory::aux_main) aux.push_back(&s);
    }
    REQUIRE(aux.size() == 3);
    CHECK(aux[0]->y_min == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(aux[0]->y_max == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(aux[1]->y_min == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(aux[1]->y_max == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(aux[2]->y_min == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(aux[2]->y_max == doctest::Approx(0.9).epsilon(1e-12));
    // Consecutive boxes share edges exactly (no gaps, no overlap).
    CHECK(aux[0]->y_max == aux[1]->y_min);
    CHECK(aux[1]->y_max == aux[2]->y_min);
    // Horizontal extent spans the main-column slots.
    CHECK(aux[0]->x_min == doctest::Approx(0.1));
    CHECK(aux[0]->x_max == doctest::Approx(0.7));
  }

  TEST_CASE("no boundary slots: the partition spans the whole page height") {
    std::vector<SlotBox> slots = {box(1, SlotCategory::direct_right, 0.75, 0.1, 0.95, 0.3)};
    auto layout = place_auxiliary_slots(slots, 2, 0.5);
    std::vector<const SlotBox*> aux;
    for (const auto& s : layout.slots) {
      if (s.category == SlotCategory::aux_main) aux.push_back(&s);
    }
    REQUIRE(aux.size() == 2);
    CHECK(aux[0]->y_min == doctest::Approx(0.0));
    CHECK(aux[0]->y_max == doctest::Approx(0.5));
    CHECK(aux[1]->y_min == doctest::Approx(0.5));
    CHECK(aux[1]->y_max == doctest::Approx(1.0));
    // No main-column slot exists, so the fallback extent is the left 70%.
    CHECK(aux[0]->x_min == doctest::Approx(0.0));
    CHECK(aux[0]->x_max == doctest::Approx(0.7));
  }

  TEST_CASE("missing boundary on one side extends the gap to the page edge") {
    std::vector<SlotBox> slots = {box(1, SlotCategory::organic_top, 0.1, 0.1, 0.7, 0.4)};
    auto layout = place_auxiliary_slots(slots, 1, 0.5);
    const SlotBox* aux = nullptr;
    for (const auto& s : layout.slots) {
      if (s.category == SlotCategory::aux_main) aux = &s;
    }
    REQUIRE(aux != nullptr);
    CHECK(aux->y_min == doctest::Approx(0.4));
    CHECK(aux->y_max == doctest::Approx(1.0));
  }

  TEST_CASE("no direct-right slot produces exactly two aux-right boxes") {
    std::vector<SlotBox> slots = {box(1, SlotCategory::organic_top, 0.1, 0.1, 0.7, 0.3)};
    auto layout = place_auxiliary_slots(slots, 0, 0.5);
    std::vector<const SlotBox*> right;
    for (const auto& s : layout.slots) {
      if (s.category == SlotCategory::aux_right) right.push_back(&s);
    }
    REQUIRE(right.size() == 2);
    CHECK(right[0]->x_min == doctest::Approx(0.7));
    CHECK(right[0]->x_max == doctest::Approx(1.0));
    CHECK(right[0]->y_min == doctest::Approx(0.25));
    CHECK(right[0]->y_max == doctest::Approx(0.50));
    CHECK(right[1]->y_min == doctest::Approx(0.50));
    CHECK(right[1]->y_max == doctest::Approx(0.75));
  }

  TEST_CASE("one direct-right slot gets a single aux-right box below it") {
    std::vector<SlotBox> slots = {box(1, SlotCategory::direct_right, 0.75, 0.1, 0.95, 0.3)};
    auto layout = place_auxiliary_slots(slots, 0, 0.5);
    std::vector<const SlotBox*> right;
    for (const auto& s : layout.slots) {
      if (s.category == SlotCategory::aux_right) right.push_back(&s);
    }
    REQUIRE(right.size() == 1);
    CHECK(right[0]->x_min == doctest::Approx(0.75));
    CHECK(right[0]->x_max == doctest::Approx(0.95));
    CHECK(right[0]->y_min == doctest::Approx(0.3));
    CHECK(right[0]->y_max == doctest::Approx(0.5));  // same height, fits on the page
  }

  TEST_CASE("aux-right below a deep direct-right slot clips to the page bottom") {
    std::vector<SlotBox> slots = {box(1, SlotCategory::direct_right, 0.75, 0.5, 0.95, 0.9)};
    auto layout = place_auxiliary_slots(slots, 0, 0.5);
    for (const auto& s : layout.slots) {
      if (s.category == SlotCategory::aux_right) {
        CHECK(s.y_min == doctest::Approx(0.9));
        CHECK(s.y_max == doctest::Approx(1.0));
      }
    }
  }

  TEST_CASE("collapsed gap sets the warning flag and emits zero aux-main boxes") {
    std::vector<SlotBox> slots = {
        box(1, SlotCategory::organic_top, 0.1, 0.1, 0.7, 0.6),
        box(2, SlotCategory::organic_bottom, 0.1, 0.5, 0.7, 0.9),  // overlaps: gap < 0
    };
    auto layout = place_auxiliary_slots(slots, 3, 0.5);
    CHECK(layout.gap_collapsed);
    CHECK(layout.n_aux_main == 0);
    for (const auto& s : layout.slots) CHECK(s.category != SlotCategory::aux_main);
  }

  TEST_CASE("augmentation rejects aux input and over-capacity results") {
    std::vector<SlotBox> with_aux = {box(1, SlotCategory::aux_main, 0.1, 0.1, 0.7, 0.3)};
    CHECK_THROWS_AS(place_auxiliary_slots(with_aux, 1, 0.5), std::invalid_argument);

    auto layout = place_auxiliary_slots({box(1, SlotCategory::organic_top, 0.1, 0.1, 0.7, 0.3)},
                                        2, 0.5);
    CHECK_THROWS_AS(place_auxiliary_slots(layout.slots, 2, 0.5), std::invalid_argument);

    std::vector<SlotBox> many;
    for (int i = 0; i < 12; ++i) {
      many.push_back(box(i, SlotCategory::organic_top, 0.1, 0.02 + 0.06 * i, 0.7,
                         0.06 + 0.06 * i));
    }
    // 12 standard + 2 aux-right + 1 aux-main = 15 > 14.
    CHECK_THROWS_AS(place_auxiliary_slots(many, 1, 0.5), std::length_error);
  }

  TEST_CASE("point categorization: spec fixtures") {
    auto layout = make_layout({box(1, SlotCategory::direct_top, 0.1, 0.05, 0.9, 0.20)});
    CHECK(point_slot_type(layout, 0.5, 0.10) == 0);
    CHECK(point_slot_type(layout, 0.5, 0.95) == -1);
  }

  TEST_CASE("standard slots take precedence over overlapping aux slots") {
    std::vector<SlotBox> slots = {
        box(1, SlotCategory::organic_top, 0.1, 0.1, 0.7, 0.5),
        box(2, SlotCategory::organic_bottom, 0.1, 0.9, 0.7, 0.97),
    };
    auto layout = place_auxiliary_slots(slots, 2, 0.5);
    // Force an overlap by probing a point inside the organic-top box after
    // shifting an aux-main box over it.
    for (auto& s : layout.slots) {
      if (s.category == SlotCategory::aux_main) s.y_min = 0.3;
    }
    CHECK(point_slot_type(layout, 0.4, 0.4) == 2);
  }

  TEST_CASE("smallest-area box wins within the same precedence class") {
    auto layout = make_layout({
        box(1, SlotCategory::organic_top, 0.0, 0.0, 1.0, 1.0),
        box(2, SlotCategory::direct_top, 0.4, 0.4, 0.6, 0.6),
    });
    CHECK(point_slot_type(layout, 0.5, 0.5) == 0);   // small direct-top wins
    CHECK(point_slot_type(layout, 0.1, 0.1) == 2);
  }

  TEST_CASE("point_slot_type agrees with a brute-force scan on random layouts") {
    Rng rng(20260819);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<SlotBox> slots;
      slots.push_back(box(1, SlotCategory::organic_top, 0.05, 0.05, 0.65, 0.25));
      if (rng.bernoulli(0.5)) {
        slots.push_back(box(2, SlotCategory::organic_bottom, 0.05, 0.8, 0.65, 0.95));
      }
      if (rng.bernoulli(0.31)) {
        slots.push_back(box(3, SlotCategory::direct_right, 0.72, 0.05, 0.98, 0.3));
      }
      auto layout = place_auxiliary_slots(slots, static_cast<int>(rng.randint(0, 4)), 0.5);
      for (int p = 0; p < 200; ++p) {
        double x = rng.uniform();
        double y = rng.uniform();
        CHECK(point_slot_type(layout, x, y) == oracle_point_type(layout, x, y));
      }
    }
  }

  TEST_CASE("aux-main equal heights and exact gap coverage on random layouts") {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
      double top_end = rng.uniform(0.1, 0.5);
      double bottom_start = rng.uniform(top_end + 0.05, 0.95);
      std::vector<SlotBox> slots = {
          box(1, SlotCategory::organic_top, 0.1, 0.02, 0.7, top_end),
          box(2, SlotCategory::organic_bottom, 0.1, bottom_start, 0.7, 0.97),
      };
      int n = 1 + static_cast<int>(rng.randint(0, 4));
      auto layout = place_auxiliary_slots(slots, n, 0.5);
      std::vector<const SlotBox*> aux;
      for (const auto& s : layout.slots) {
        if (s.category == SlotCategory::aux_main) aux.push_back(&s);
      }
      REQUIRE(static_cast<int>(aux.size()) == n);
      double expect_h = (bottom_start - top_end) / n;
      for (int i = 0; i < n; ++i) {
        CHECK(std::abs(aux[i]->height() - expect_h) <= 1e-9);
        if (i > 0) CHECK(aux[i]->y_min == aux[i - 1]->y_max);
      }
      CHECK(aux.front()->y_min == doctest::Approx(top_end).epsilon(1e-12));
      CHECK(aux.back()->y_max == doctest::Approx(bottom_start).epsilon(1e-12));
    }
  }
}
