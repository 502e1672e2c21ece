#include "adsight/domain.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace adsight {

using nlohmann::json;
namespace fs = std::filesystem;

const char* category_name(SlotCategory c) {
  switch (c) {
    case SlotCategory::direct_top: return "direct-top";
    case SlotCategory::direct_right: return "direct-right";
    case SlotCategory::organic_top: return "organic-top";
    case SlotCategory::organic_bottom: return "organic-bottom";
    case SlotCategory::aux_main: return "aux-main";
    case SlotCategory::aux_right: return "aux-right";
  }
  return "?";
}

SlotCategory parse_category(const std::string& name) {
  for (int c = 0; c <= 5; ++c) {
    auto cat = static_cast<SlotCategory>(c);
    if (name == category_name(cat)) return cat;
  }
  throw TrialError(TrialError::Kind::malformed_record, "unknown slot category: " + name);
}

const char* event_name(CursorEvent e) {
  switch (e) {
    case CursorEvent::move: return "move";
    case CursorEvent::click: return "click";
    case CursorEvent::hover: return "hover";
  }
  return "?";
}

CursorEvent parse_event(const std::string& name) {
  if (name == "move") return CursorEvent::move;
  if (name == "click") return CursorEvent::click;
  if (name == "hover") return CursorEvent::hover;
  throw TrialError(TrialError::Kind::malformed_record, "unknown cursor event: " + name);
}

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw TrialError(TrialError::Kind::malformed_record, what);
}

std::string read_file(const fs::path& path) {
  if (!fs::exists(path)) {
    throw TrialError(TrialError::Kind::missing_file, "missing file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw TrialError(TrialError::Kind::missing_file, "unreadable file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    malformed(path.string() + ": " + e.what());
  }
}

double parse_double(const std::string& s, const std::string& where) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || end != begin + s.size() || !std::isfinite(v)) {
    malformed(where + ": not a finite number: '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& header) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) malformed(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) malformed(path.string() + ": bad header '" + line + "'");
  std::vector<std::vector<std::string>> rows;
  std::size_t n_cols = split_csv_line(header).size();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != n_cols) malformed(path.string() + ": wrong field count: '" + line + "'");
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Trial load_trial(const fs::path& dir) {
  Trial trial;

  json meta = parse_json(dir / "trial.json");
  if (!meta.is_object() || !meta.contains("id") || !meta.contains("page_width_px") ||
      !meta.contains("page_height_px")) {
    malformed("trial.json: expected {id, page_width_px, page_height_px}");
  }
  trial.id = meta.at("id").get<std::string>();
  trial.page_width_px = meta.at("page_width_px").get<int>();
  trial.page_height_px = meta.at("page_height_px").get<int>();
  if (trial.page_width_px <= 0 || trial.page_height_px <= 0) {
    malformed("trial.json: non-positive page dimensions");
  }
  const double w = trial.page_width_px;
  const double h = trial.page_height_px;

  json slots = parse_json(dir / "slots.json");
  if (!slots.is_array()) malformed("slots.json: expected an array");
  for (const auto& s : slots) {
    SlotBox box;
    try {
      box.id = s.at("id").get<int>();
      box.category = parse_category(s.at("category").get<std::string>());
      box.x_min = s.at("x_min_px").get<double>() / w;
      box.y_min = s.at("y_min_px").get<double>() / h;
      box.x_max = s.at("x_max_px").get<double>() / w;
      box.y_max = s.at("y_max_px").get<double>() / h;
    } catch (const json::exception& e) {
      malformed(std::string("slots.json: ") + e.what());
    }
    trial.slots.push_back(box);
  }

  auto mouse_rows = read_csv(dir / "mouse.csv", "t_ms,x_px,y_px,event");
  for (const auto& row : mouse_rows) {
    CursorSample sample;
    sample.t = parse_double(row[0], "mouse.csv t_ms") / 1000.0;
    sample.x = std::clamp(parse_double(row[1], "mouse.csv x_px") / w, 0.0, 1.0);
    sample.y = std::clamp(parse_double(row[2], "mouse.csv y_px") / h, 0.0, 1.0);
    sample.event = parse_event(row[3]);
    // Consecutive rows that repeat the previous position carry no movement
    // information; drop them here so downstream code can assume motion.
    if (!trial.cursor.empty() && trial.cursor.back().x == sample.x &&
        trial.cursor.back().y == sample.y) {
      continue;
    }
    if (!trial.cursor.empty() && sample.t <= trial.cursor.back().t) {
      malformed("mouse.csv: t_ms not strictly increasing");
    }
    trial.cursor.push_back(sample);
  }
  if (trial.cursor.size() < 2) {
    throw TrialError(TrialError::Kind::empty_cursor, "mouse.csv: fewer than 2 cursor samples");
  }

  auto fix_rows = read_csv(dir / "fixations.csv", "t_ms,x_px,y_px,d_ms");
  for (const auto& row : fix_rows) {
    FixationEvent fx;
    fx.t = parse_double(row[0], "fixations.csv t_ms") / 1000.0;
    fx.x = std::clamp(parse_double(row[1], "fixations.csv x_px") / w, 0.0, 1.0);
    fx.y = std::clamp(parse_double(row[2], "fixations.csv y_px") / h, 0.0, 1.0);
    fx.d = parse_double(row[3], "fixations.csv d_ms") / 1000.0;
    if (fx.d <= 0) malformed("fixations.csv: non-positive duration");
    if (!trial.fixations.empty() && fx.t <= trial.fixations.back().t) {
      malformed("fixations.csv: t_ms not strictly increasing");
    }
    trial.fixations.push_back(fx);
  }

  return trial;
}

void write_trial(const Trial& trial, const fs::path& dir) {
  fs::create_directories(dir);
  const double w = trial.page_width_px;
  const double h = trial.page_height_px;

  json meta = {{"id", trial.id},
               {"page_width_px", trial.page_width_px},
               {"page_height_px", trial.page_height_px}};
  std::ofstream(dir / "trial.json") << meta.dump(2) << "\n";

  json slots = json::array();
  for (const auto& s : trial.slots) {
    slots.push_back({{"id", s.id},
                     {"category", category_name(s.category)},
                     {"x_min_px", s.x_min * w},
                     {"y_min_px", s.y_min * h},
                     {"x_max_px", s.x_max * w},
                     {"y_max_px", s.y_max * h}});
  }
  std::ofstream(dir / "slots.json") << slots.dump(2) << "\n";

  std::ofstream mouse(dir / "mouse.csv");
  mouse << "t_ms,x_px,y_px,event\n";
  for (const auto& c : trial.cursor) {
    mouse << fmt_double(c.t * 1000.0) << ',' << fmt_double(c.x * w) << ',' << fmt_double(c.y * h)
          << ',' << event_name(c.event) << "\n";
  }

  std::ofstream fix(dir / "fixations.csv");
  fix << "t_ms,x_px,y_px,d_ms\n";
  for (const auto& f : trial.fixations) {
    fix << fmt_double(f.t * 1000.0) << ',' << fmt_double(f.x * w) << ',' << fmt_double(f.y * h)
        << ',' << fmt_double(f.d * 1000.0) << "\n";
  }
}

std::vector<std::string> validate_trial(const Trial& trial) {
  std::vector<std::string> violations;
  auto flag = [&](const std::string& v) { violations.push_back(v); };

  if (trial.page_width_px <= 0 || trial.page_height_px <= 0) {
    flag("page dimensions must be positive");
  }
  if (trial.slots.size() > kMaxSlots) flag("more than 14 slots");

  std::set<int> ids;
  for (const auto& s : trial.slots) {
    std::string tag = "slot " + std::to_string(s.id);
    if (!ids.insert(s.id).second) flag(tag + ": duplicate id");
    if (!is_standard(s.category)) flag(tag + ": non-standard category before augmentation");
    if (!(s.x_min < s.x_max) || !(s.y_min < s.y_max)) flag(tag + ": degenerate box");
    if (s.x_min < 0 || s.x_max > 1 || s.y_min < 0 || s.y_max > 1) {
      flag(tag + ": box outside page");
    }
  }

  if (trial.cursor.size() < 2) flag("fewer than 2 cursor samples");
  for (std::size_t i = 0; i < trial.cursor.size(); ++i) {
    const auto& c = trial.cursor[i];
    if (c.t < 0) flag("cursor sample " + std::to_string(i) + ": negative t");
    if (c.x < 0 || c.x > 1 || c.y < 0 || c.y > 1) {
      flag("cursor sample " + std::to_string(i) + ": coordinates outside [0,1]");
    }
    if (i > 0) {
      if (c.t <= trial.cursor[i - 1].t) {
        flag("cursor sample " + std::to_string(i) + ": t not strictly increasing");
      }
      if (c.x == trial.cursor[i - 1].x && c.y == trial.cursor[i - 1].y) {
        flag("cursor sample " + std::to_string(i) + ": consecutive duplicate position");
      }
    }
  }

  for (std::size_t i = 0; i < trial.fixations.size(); ++i) {
    const auto& f = trial.fixations[i];
    if (f.d <= 0) flag("fixation " + std::to_string(i) + ": non-positive duration");
    if (f.x < 0 || f.x > 1 || f.y < 0 || f.y > 1) {
      flag("fixation " + std::to_string(i) + ": coordinates outside [0,1]");
    }
    if (i > 0 && f.t <= trial.fixations[i - 1].t) {
      flag("fixation " + std::to_string(i) + ": t not strictly increasing");
    }
  }

  return violations;
}

}  // namespace adsight
