#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace adsight {

// Slot categories. The first four are the "standard" categories that appear in
// recorded trials; the auxiliary ones only exist after layout augmentation.
enum class SlotCategory {
  direct_top = 0,
  direct_right = 1,
  organic_top = 2,
  organic_bottom = 3,
  aux_main = 4,
  aux_right = 5,
};

constexpr int kNumStandardCategories = 4;
// Category axis used by labels/metrics: the four standard categories plus one
// pooled auxiliary bucket.
constexpr int kNumLabelCategories = 5;
constexpr int kAuxLabelCategory = 4;
constexpr int kMaxSlots = 14;

inline int category_code(SlotCategory c) { return static_cast<int>(c); }
inline bool is_standard(SlotCategory c) { return category_code(c) < kNumStandardCategories; }
// Collapse a category onto the 5-way label axis (both aux kinds pool together).
inline int label_category(SlotCategory c) {
  return is_standard(c) ? category_code(c) : kAuxLabelCategory;
}

const char* category_name(SlotCategory c);
// Parses a category name as it appears in slots.json; throws on unknown names.
SlotCategory parse_category(const std::string& name);

// Axis-aligned slot box in page-normalized coordinates. Boxes are half-open:
// they contain their min edges and exclude their max edges.
struct SlotBox {
  int id = 0;
  SlotCategory category = SlotCategory::organic_top;
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double x_center() const { return 0.5 * (x_min + x_max); }
  double y_center() const { return 0.5 * (y_min + y_max); }
  bool contains(double x, double y) const {
    return x >= x_min && x < x_max && y >= y_min && y < y_max;
  }
};

enum class CursorEvent { move = 0, click = 1, hover = 2 };

const char* event_name(CursorEvent e);
CursorEvent parse_event(const std::string& name);

// One cursor sample; seconds and page-normalized coordinates in memory.
struct CursorSample {
  double t = 0;
  double x = 0, y = 0;
  CursorEvent event = CursorEvent::move;
};

// One gaze fixation; d is the fixation duration in seconds.
struct FixationEvent {
  double t = 0;
  double x = 0, y = 0;
  double d = 0;
};

struct Trial {
  std::string id;
  int page_width_px = 0;
  int page_height_px = 0;
  std::vector<SlotBox> slots;          // standard categories only
  std::vector<CursorSample> cursor;    // strictly increasing t, deduplicated
  std::vector<FixationEvent> fixations;
};

// Errors raised by trial IO. `kind` lets callers distinguish a missing file
// from a file that parses but violates the record format.
class TrialError : public std::runtime_error {
 public:
  enum class Kind { missing_file, malformed_record, empty_cursor };
  TrialError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Reads the four-file trial directory (slots.json, mouse.csv, fixations.csv,
// trial.json), normalizing pixels by page dimensions and milliseconds to
// seconds. Consecutive cursor rows with identical (x, y) are dropped.
Trial load_trial(const std::filesystem::path& dir);

// Inverse of load_trial; writes the directory format with enough precision
// that a write/load round trip preserves every numeric field to 1e-9.
void write_trial(const Trial& trial, const std::filesystem::path& dir);

// Returns a list of invariant violations (empty when the trial is valid):
// box geometry, category restrictions, slot count, time ordering, duplicate
// cursor rows, coordinate ranges, fixation durations.
std::vector<std::string> validate_trial(const Trial& trial);

}  // namespace adsight
