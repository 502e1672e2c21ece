#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>

#include "adsight/domain.hpp"

namespace adsight::test {

// Unique scratch directory under the system temp root, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("adsight_" + tag + "_" + std::to_string(counter.fetch_add(1)) + "_" +
             std::to_string(static_cast<unsigned>(::getpid())));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& content) {
  std::ofstream(p, std::ios::binary) << content;
}

// A small, fully valid trial used across suites: two slots, a short cursor
// path, a handful of fixations. 1000x2000 page so px -> normalized is easy.
inline Trial small_trial() {
  Trial t;
  t.id = "t0001";
  t.page_width_px = 1000;
  t.page_height_px = 2000;

  SlotBox top;
  top.id = 1;
  top.category = SlotCategory::direct_top;
  top.x_min = 0.1;
  top.y_min = 0.05;
  top.x_max = 0.7;
  top.y_max = 0.20;
  SlotBox bottom;
  bottom.id = 2;
  bottom.category = SlotCategory::organic_bottom;
  bottom.x_min = 0.1;
  bottom.y_min = 0.80;
  bottom.x_max = 0.7;
  bottom.y_max = 0.95;
  t.slots = {top, bottom};

  t.cursor = {
      {0.00, 0.50, 0.10, CursorEvent::move},
      {0.20, 0.40, 0.12, CursorEvent::move},
      {0.50, 0.35, 0.15, CursorEvent::hover},
      {0.90, 0.30, 0.10, CursorEvent::move},
      {1.30, 0.30, 0.85, CursorEvent::click},
  };
  t.fixations = {
      {0.10, 0.40, 0.10, 0.30},
      {0.55, 0.30, 0.12, 0.15},
      {1.00, 0.35, 0.86, 0.40},
  };
  return t;
}

}  // namespace adsight::test
