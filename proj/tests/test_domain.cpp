#include <cmath>
#include <filesystem>
#include <string>

#include "adsight/domain.hpp"
#include "doctest.h"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace adsight;
using test::TempDir;
using test::write_text;

namespace {

// Writes a minimal hand-rolled trial directory so load-side behavior can be
// probed with byte-level control over the files.
void write_raw_trial(const fs::path& dir, const std::string& mouse_body,
                     const std::string& fixations_body) {
  fs::create_directories(dir);
  write_text(dir / "trial.json",
             R"({"id": "raw", "page_width_px": 1000, "page_height_px": 1000})");
  write_text(dir / "slots.json",
             R"([{"id": 1, "category": "direct-top",
                  "x_min_px": 100, "y_min_px": 50, "x_max_px": 900, "y_max_px": 200}])");
  write_text(dir / "mouse.csv", "t_ms,x_px,y_px,event\n" + mouse_body);
  write_text(dir / "fixations.csv", "t_ms,x_px,y_px,d_ms\n" + fixations_body);
}

}  // namespace

TEST_SUITE("domain") {
  TEST_CASE("category and event names round-trip") {
    for (int c = 0; c <= 5; ++c) {
      auto cat = static_cast<SlotCategory>(c);
      CHECK(parse_category(category_name(cat)) == cat);
    }
    CHECK_THROWS_AS(parse_category("banner"), TrialError);
    for (auto e : {CursorEvent::move, CursorEvent::click, CursorEvent::hover}) {
      CHECK(parse_event(event_name(e)) == e);
    }
  }

  TEST_CASE("label_category pools both aux kinds") {
    CHECK(label_category(SlotCategory::direct_top) == 0);
    CHECK(label_category(SlotCategory::organic_bottom) == 3);
    CHECK(label_category(SlotCategory::aux_main) == kAuxLabelCategory);
    CHECK(label_category(SlotCategory::aux_right) == kAuxLabelCategory);
  }

  TEST_CASE("SlotBox::contains is half-open") {
    SlotBox b;
    b.x_min = 0.2;
    b.y_min = 0.3;
    b.x_max = 0.6;
    b.y_max = 0.7;
    CHECK(b.contains(0.2, 0.3));      // min edges included
    CHECK_FALSE(b.contains(0.6, 0.5));  // x_max excluded
    CHECK_FALSE(b.contains(0.4, 0.7));  // y_max excluded
    CHECK(b.contains(0.59999, 0.69999));
  }

  TEST_CASE("write/load round trip preserves every field to 1e-9") {
    TempDir tmp("roundtrip");
    Trial t = test::small_trial();
    write_trial(t, tmp.path());
    Trial back = load_trial(tmp.path());

    CHECK(back.id == t.id);
    CHECK(back.page_width_px == t.page_width_px);
    CHECK(back.page_height_px == t.page_height_px);
    REQUIRE(back.slots.size() == t.slots.size());
    for (std::size_t i = 0; i < t.slots.size(); ++i) {
      CHECK(back.slots[i].id == t.slots[i].id);
      CHECK(back.slots[i].category == t.slots[i].category);
      CHECK(back.slots[i].x_min == doctest::Approx(t.slots[i].x_min).epsilon(1e-9));
      CHECK(back.slots[i].y_max == doctest::Approx(t.slots[i].y_max).epsilon(1e-9));
    }
    REQUIRE(back.cursor.size() == t.cursor.size());
    for (std::size_t i = 0; i < t.cursor.size(); ++i) {
      CHECK(back.cursor[i].t == doctest::Approx(t.cursor[i].t).epsilon(1e-9));
      CHECK(back.cursor[i].x == doctest::Approx(t.cursor[i].x).epsilon(1e-9));
      CHECK(back.cursor[i].y == doctest::Approx(t.cursor[i].y).epsilon(1e-9));
      CHECK(back.cursor[i].event == t.cursor[i].event);
    }
    REQUIRE(back.fixations.size() == t.fixations.size());
    for (std::size_t i = 0; i < t.fixations.size(); ++i) {
      CHECK(back.fixations[i].t == doctest::Approx(t.fixations[i].t).epsilon(1e-9));
      CHECK(back.fixations[i].d == doctest::Approx(t.fixations[i].d).epsilon(1e-9));
    }
    CHECK(validate_trial(back).empty());
  }

  TEST_CASE("consecutive duplicate cursor positions are dropped at load") {
    TempDir tmp("dedup");
    write_raw_trial(tmp.path(),
                    "0,500,100,move\n"
                    "100,500,100,move\n"   // same (x, y) -> dropped
                    "200,510,120,move\n",
                    "0,500,100,300\n");
    Trial t = load_trial(tmp.path());
    CHECK(t.cursor.size() == 2);
    CHECK(validate_trial(t).empty());
  }

  TEST_CASE("negative fixation duration is a malformed record") {
    TempDir tmp("badfix");
    write_raw_trial(tmp.path(), "0,500,100,move\n100,510,120,move\n", "0,500,100,-5\n");
    CHECK_THROWS_WITH_AS(load_trial(tmp.path()),
                         doctest::Contains("non-positive duration"), TrialError);
    try {
      load_trial(tmp.path());
    } catch (const TrialError& e) {
      CHECK(e.kind() == TrialError::Kind::malformed_record);
    }
  }

  TEST_CASE("missing file reports which file") {
    TempDir tmp("missing");
    write_raw_trial(tmp.path(), "0,500,100,move\n100,510,120,move\n", "0,500,100,300\n");
    fs::remove(tmp.path() / "fixations.csv");
    try {
      load_trial(tmp.path());
      FAIL("expected TrialError");
    } catch (const TrialError& e) {
      CHECK(e.kind() == TrialError::Kind::missing_file);
      CHECK(std::string(e.what()).find("fixations.csv") != std::string::npos);
    }
  }

  TEST_CASE("fewer than two cursor samples is EmptyCursor") {
    TempDir tmp("short");
    write_raw_trial(tmp.path(), "0,500,100,move\n", "0,500,100,300\n");
    try {
      load_trial(tmp.path());
      FAIL("expected TrialError");
    } catch (const TrialError& e) {
      CHECK(e.kind() == TrialError::Kind::empty_cursor);
    }

    // Two rows that collapse into one by deduplication hit the same error.
    TempDir tmp2("collapse");
    write_raw_trial(tmp2.path(), "0,500,100,move\n100,500,100,move\n", "0,500,100,300\n");
    CHECK_THROWS_AS(load_trial(tmp2.path()), TrialError);
  }

  TEST_CASE("non-numeric field is a malformed record") {
    TempDir tmp("nonnum");
    write_raw_trial(tmp.path(), "0,abc,100,move\n100,510,120,move\n", "0,500,100,300\n");
    CHECK_THROWS_AS(load_trial(tmp.path()), TrialError);
  }

  TEST_CASE("validate_trial flags each violated invariant") {
    Trial t = test::small_trial();
    CHECK(validate_trial(t).empty());

    SUBCASE("degenerate box") {
      t.slots[0].x_max = t.slots[0].x_min;
      auto v = validate_trial(t);
      REQUIRE(v.size() == 1);
      CHECK(v[0].find("degenerate box") != std::string::npos);
    }
    SUBCASE("non-monotone cursor time") {
      t.cursor[2].t = t.cursor[1].t;
      auto v = validate_trial(t);
      REQUIRE(v.size() == 1);
      CHECK(v[0].find("t not strictly increasing") != std::string::npos);
    }
    SUBCASE("aux category before augmentation") {
      t.slots[0].category = SlotCategory::aux_main;
      auto v = validate_trial(t);
      REQUIRE(v.size() == 1);
      CHECK(v[0].find("non-standard category") != std::string::npos);
    }
    SUBCASE("duplicate slot id") {
      t.slots[1].id = t.slots[0].id;
      CHECK(validate_trial(t).size() == 1);
    }
    SUBCASE("too many slots") {
      SlotBox s = t.slots[0];
      t.slots.clear();
      for (int i = 0; i < 15; ++i) {
        s.id = i;
        t.slots.push_back(s);
      }
      auto v = validate_trial(t);
      CHECK(!v.empty());
      CHECK(v[0].find("more than 14 slots") != std::string::npos);
    }
    SUBCASE("cursor coordinates outside the page") {
      t.cursor[0].x = 1.5;
      CHECK(validate_trial(t).size() == 1);
    }
  }
}
