#include "adsight/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace adsight {
namespace {

using nlohmann::json;

// Substream tags (second argument to mix_seed on the per-trial seed), so the
// layout, the attendance plan, the page dimensions, and the session draw from
// independent generators and a change in one never shifts the others.
constexpr std::uint64_t kStreamLayout = 1;
constexpr std::uint64_t kStreamPlan = 2;
constexpr std::uint64_t kStreamSession = 3;
constexpr std::uint64_t kStreamPage = 4;

// Gaze simulation. The gaze track samples the cursor polyline every kGazeStep
// seconds; a fixation is a maximal run of gaze points that stays within
// kFixRadius of its running centroid, kept when it spans at least
// kMinEmitSeconds (shorter runs are saccade noise; downstream consumers apply
// their own duration filter on top).
constexpr double kGazeStep = 0.02;
constexpr double kFixRadius = 0.006;
constexpr double kMinEmitSeconds = 0.06;

// Dwell shaping. An attended slot receives a cluster of long micro-dwells
// spread on a circle around an anchor; every slot also receives a quick
// glance during the reading scan. The two duration bands are disjoint (a
// detected fixation loses at most ~2 samples to settling), so a glance can
// never be the longest fixation of a dwell cluster, and the circle spacing
// keeps consecutive micro-dwells well outside the dispersion radius so they
// are detected as separate fixations.
constexpr double kStrongHoldMin = 0.4;
constexpr double kStrongHoldMax = 0.75;
constexpr double kGlanceHoldMin = 0.2;
constexpr double kGlanceHoldMax = 0.3;
constexpr double kMicroRadiusCap = 0.0135;
constexpr double kHoldJitter = 0.001;
constexpr double kCoordMargin = 0.0005;
// Whitespace pauses need a main-column gap at least this tall.
constexpr double kMinAuxGap = 0.08;

double clamp_coord(double v) { return std::clamp(v, kCoordMargin, 1.0 - kCoordMargin); }

// Incrementally builds the cursor sample list. Times are strictly increasing;
// consecutive samples with identical coordinates are suppressed.
struct PathBuilder {
  Rng& rng;
  double cap;
  std::vector<CursorSample> samples;
  double t = 0.0;

  PathBuilder(Rng& r, double session_cap) : rng(r), cap(session_cap) {}

  double x() const { return samples.back().x; }
  double y() const { return samples.back().y; }

  void emit(double px, double py) {
    px = clamp_coord(px);
    py = clamp_coord(py);
    if (!samples.empty() && samples.back().x == px && samples.back().y == py) return;
    samples.push_back({t, px, py, CursorEvent::move});
  }

  // Straight leg to (px, py) over `duration` seconds with intermediate
  // samples at irregular intervals.
  void leg(double px, double py, double duration) {
    const double x0 = x(), y0 = y();
    const double t0 = t, t1 = t + duration;
    while (true) {
      double dt = rng.uniform(0.05, 0.2);
      if (t + dt >= t1 - 0.01) break;
      t += dt;
      double s = (t - t0) / duration;
      emit(x0 + s * (px - x0), y0 + s * (py - y0));
    }
    t = t1;
    emit(px, py);
  }

  // Leg with a distance-dependent duration (roughly constant speed plus a
  // fixed reaction time).
  void travel(double px, double py) {
    double dist = std::hypot(clamp_coord(px) - x(), clamp_coord(py) - y());
    leg(px, py, 0.15 + dist * rng.uniform(0.4, 0.8));
  }

  // Stationary dwell at the current position with sub-pixel jitter.
  void hold(double duration) {
    const double hx = x(), hy = y();
    const double t1 = t + duration;
    while (true) {
      double dt = rng.uniform(0.15, 0.45);
      if (t + dt >= t1 - 0.01) break;
      t += dt;
      emit(hx + rng.uniform(-kHoldJitter, kHoldJitter),
           hy + rng.uniform(-kHoldJitter, kHoldJitter));
    }
    t = t1;
    emit(hx + rng.uniform(-kHoldJitter, kHoldJitter),
         hy + rng.uniform(-kHoldJitter, kHoldJitter));
  }

  bool nearly_out_of_time(double slack) const { return t > cap - slack; }
};

// Piecewise-linear position on the cursor polyline at time tq (clamped to the
// track's time span).
std::pair<double, double> path_at(const std::vector<CursorSample>& s, double tq) {
  if (tq <= s.front().t) return {s.front().x, s.front().y};
  if (tq >= s.back().t) return {s.back().x, s.back().y};
  auto it = std::upper_bound(s.begin(), s.end(), tq,
                             [](double v, const CursorSample& c) { return v < c.t; });
  const CursorSample& b = *it;
  const CursorSample& a = *(it - 1);
  double w = (tq - a.t) / (b.t - a.t);
  return {a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)};
}

struct GazePoint {
  double t, x, y;
};

// Dispersion-threshold fixation detection over a fixed-cadence gaze track.
std::vector<FixationEvent> detect_fixations(const std::vector<GazePoint>& gaze) {
  std::vector<FixationEvent> out;
  std::size_t start = 0, n = 0;
  double sx = 0.0, sy = 0.0;
  auto flush = [&](std::size_t end) {  // window [start, end)
    if (n < 2) return;
    double d = gaze[end - 1].t - gaze[start].t;
    if (d >= kMinEmitSeconds) out.push_back({gaze[start].t, sx / double(n), sy / double(n), d});
  };
  for (std::size_t i = 0; i < gaze.size(); ++i) {
    if (n > 0 &&
        std::hypot(gaze[i].x - sx / double(n), gaze[i].y - sy / double(n)) > kFixRadius) {
      flush(i);
      start = i;
      sx = sy = 0.0;
      n = 0;
    }
    sx += gaze[i].x;
    sy += gaze[i].y;
    ++n;
  }
  flush(gaze.size());
  return out;
}

// Draws the four presence flags (always exactly four uniforms, so the plan
// pass can replay this prefix of the layout stream). An all-absent draw is
// flipped to an organic-top page rather than redrawn, keeping the
// direct-right marginal exactly p_direct_right.
std::array<bool, kNumStandardCategories> presence_flags(Rng& rng, const SynthConfig& config) {
  const std::array<double, kNumStandardCategories> p{config.p_direct_top, config.p_direct_right,
                                                     config.p_organic_top,
                                                     config.p_organic_bottom};
  std::array<bool, kNumStandardCategories> flags{};
  bool any = false;
  for (int c = 0; c < kNumStandardCategories; ++c) {
    flags[c] = rng.uniform() < p[c];
    any = any || flags[c];
  }
  if (!any) flags[category_code(SlotCategory::organic_top)] = true;
  return flags;
}

// Vertical whitespace band of the main column (between the top-of-page stack
// and the organic-bottom stack), mirroring where augmentation puts aux-main
// boxes. `ok` is false when the band is too short for a deliberate pause.
struct GapBand {
  double x0 = 0.0, x1 = 0.7, y0 = 0.0, y1 = 1.0;
  bool ok = false;
};

GapBand main_gap(const std::vector<SlotBox>& slots) {
  GapBand g;
  double x0 = 1.0, x1 = 0.0;
  for (const SlotBox& s : slots) {
    if (s.category == SlotCategory::direct_top || s.category == SlotCategory::organic_top)
      g.y0 = std::max(g.y0, s.y_max);
    if (s.category == SlotCategory::organic_bottom) g.y1 = std::min(g.y1, s.y_min);
    if (s.category != SlotCategory::direct_right) {
      x0 = std::min(x0, s.x_min);
      x1 = std::max(x1, s.x_max);
    }
  }
  if (x0 < x1) {
    g.x0 = x0;
    g.x1 = x1;
  }
  g.ok = g.y1 - g.y0 >= kMinAuxGap;
  return g;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void SynthConfig::validate() const {
  require(n_trials >= 0, "n_trials must be non-negative");
  for (double p : {p_direct_top, p_direct_right, p_organic_top, p_organic_bottom,
                   aux_attend_rate, notice_rates[0], notice_rates[1], notice_rates[2],
                   notice_rates[3]})
    require(p >= 0.0 && p <= 1.0, "probabilities must lie in [0, 1]");
  require(gaze_lag >= 0.0 && gaze_lag <= 2.0, "gaze_lag must lie in [0, 2] seconds");
  require(gaze_noise_sigma >= 0.0 && gaze_noise_sigma <= 0.05,
          "gaze_noise_sigma must lie in [0, 0.05]");
  require(free_waypoints_min >= 0, "free_waypoints_min must be non-negative");
  require(free_waypoints_max >= free_waypoints_min,
          "free_waypoints_max must be >= free_waypoints_min");
  require(session_cap >= 10.0, "session_cap must be at least 10 seconds");
}

std::string synth_config_to_json(const SynthConfig& c) {
  json j{{"n_trials", c.n_trials},
         {"seed", c.seed},
         {"p_direct_top", c.p_direct_top},
         {"p_direct_right", c.p_direct_right},
         {"p_organic_top", c.p_organic_top},
         {"p_organic_bottom", c.p_organic_bottom},
         {"notice_rates", c.notice_rates},
         {"aux_attend_rate", c.aux_attend_rate},
         {"gaze_lag", c.gaze_lag},
         {"gaze_noise_sigma", c.gaze_noise_sigma},
         {"free_waypoints_min", c.free_waypoints_min},
         {"free_waypoints_max", c.free_waypoints_max},
         {"session_cap", c.session_cap}};
  return j.dump(2);
}

SynthConfig synth_config_from_json(const std::string& text) {
  json j = json::parse(text);
  SynthConfig c;
  c.n_trials = j.at("n_trials").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.p_direct_top = j.at("p_direct_top").get<double>();
  c.p_direct_right = j.at("p_direct_right").get<double>();
  c.p_organic_top = j.at("p_organic_top").get<double>();
  c.p_organic_bottom = j.at("p_organic_bottom").get<double>();
  auto rates = j.at("notice_rates");
  if (!rates.is_array() || rates.size() != kNumStandardCategories)
    throw std::invalid_argument("notice_rates must have one entry per standard category");
  for (int i = 0; i < kNumStandardCategories; ++i) c.notice_rates[i] = rates[i].get<double>();
  c.aux_attend_rate = j.at("aux_attend_rate").get<double>();
  c.gaze_lag = j.at("gaze_lag").get<double>();
  c.gaze_noise_sigma = j.at("gaze_noise_sigma").get<double>();
  c.free_waypoints_min = j.at("free_waypoints_min").get<int>();
  c.free_waypoints_max = j.at("free_waypoints_max").get<int>();
  c.session_cap = j.at("session_cap").get<double>();
  c.validate();
  return c;
}

std::string synth_config_hash(const SynthConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(synth_config_to_json(config))));
  return buf;
}

std::vector<SlotBox> gen_layout(Rng& rng, const SynthConfig& config) {
  const auto present = presence_flags(rng, config);
  std::vector<SlotBox> slots;
  int next_id = 1;
  const double col_x0 = rng.uniform(0.04, 0.10);
  const double col_x1 = rng.uniform(0.60, 0.70);
  double y = rng.uniform(0.02, 0.05);
  if (present[category_code(SlotCategory::direct_top)]) {
    double h = rng.uniform(0.08, 0.15);
    slots.push_back({next_id++, SlotCategory::direct_top, col_x0, y, col_x1, y + h});
    y += h + rng.uniform(0.01, 0.02);
  }
  if (present[category_code(SlotCategory::organic_top)]) {
    int k = static_cast<int>(rng.randint(1, 4));
    for (int j = 0; j < k; ++j) {
      double h = rng.uniform(0.06, 0.10);
      slots.push_back({next_id++, SlotCategory::organic_top, col_x0, y, col_x1, y + h});
      y += h + rng.uniform(0.008, 0.015);
    }
  }
  if (present[category_code(SlotCategory::organic_bottom)]) {
    // Built upward from the bottom of the page, then appended top-to-bottom.
    // The stacks consume at most ~0.57 from the top and ~0.35 from the
    // bottom, so the whitespace band between them always has positive height.
    int k = static_cast<int>(rng.randint(1, 4));
    double y_bot = rng.uniform(0.95, 0.98);
    std::vector<SlotBox> stack;
    for (int j = 0; j < k; ++j) {
      double h = rng.uniform(0.06, 0.10);
      stack.push_back({0, SlotCategory::organic_bottom, col_x0, y_bot - h, col_x1, y_bot});
      y_bot -= h + rng.uniform(0.008, 0.015);
    }
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      it->id = next_id++;
      slots.push_back(*it);
    }
  }
  if (present[category_code(SlotCategory::direct_right)]) {
    double x0 = rng.uniform(0.72, 0.76);
    double x1 = rng.uniform(0.92, 0.97);
    double y0 = rng.uniform(0.02, 0.06);
    double h = rng.uniform(0.15, 0.28);
    slots.push_back({next_id++, SlotCategory::direct_right, x0, y0, x1, y0 + h});
  }
  return slots;
}

std::vector<TrialPlan> plan_dataset(const SynthConfig& config) {
  config.validate();
  const int n = config.n_trials;
  std::vector<TrialPlan> plans(n);
  std::vector<std::array<double, kNumStandardCategories>> u(n);
  std::vector<double> u_aux(n);
  for (int i = 0; i < n; ++i) {
    std::uint64_t si = mix_seed(config.seed, static_cast<std::uint64_t>(i));
    Rng layout_rng(mix_seed(si, kStreamLayout));
    plans[i].present = presence_flags(layout_rng, config);
    Rng plan_rng(mix_seed(si, kStreamPlan));
    for (int c = 0; c < kNumStandardCategories; ++c) u[i][c] = plan_rng.uniform();
    u_aux[i] = plan_rng.uniform();
  }
  // Per-category quota: among trials where the category is present, attend
  // the round(rate * count) trials with the smallest tickets.
  for (int c = 0; c < kNumStandardCategories; ++c) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (plans[i].present[c]) idx.push_back(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return u[a][c] != u[b][c] ? u[a][c] < u[b][c] : a < b;
    });
    auto quota = std::llround(config.notice_rates[c] * static_cast<double>(idx.size()));
    for (std::size_t r = 0; r < idx.size() && r < static_cast<std::size_t>(quota); ++r)
      plans[idx[r]].attend[c] = true;
  }
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return u_aux[a] != u_aux[b] ? u_aux[a] < u_aux[b] : a < b; });
  auto aux_quota = std::llround(config.aux_attend_rate * static_cast<double>(n));
  for (std::size_t r = 0; r < idx.size() && r < static_cast<std::size_t>(aux_quota); ++r)
    plans[idx[r]].attend_aux = true;
  return plans;
}

SynthSession gen_session(const std::vector<SlotBox>& layout, Rng& rng, const SynthConfig& config,
                         const TrialPlan& plan) {
  PathBuilder pb(rng, config.session_cap);
  pb.emit(rng.uniform(0.25, 0.6), rng.uniform(0.02, 0.08));

  // Reading-order scan: a quick glance at every slot, top to bottom. These
  // glances are what make unattended-but-present slots produce short
  // fixation clusters.
  std::vector<int> order(layout.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (layout[a].y_min != layout[b].y_min) return layout[a].y_min < layout[b].y_min;
    return layout[a].x_min < layout[b].x_min;
  });
  std::array<int, kNumStandardCategories> target;
  target.fill(-1);
  for (int c = 0; c < kNumStandardCategories; ++c) {
    if (!plan.attend[c]) continue;
    std::vector<int> members;
    for (std::size_t i = 0; i < layout.size(); ++i)
      if (category_code(layout[i].category) == c) members.push_back(static_cast<int>(i));
    if (!members.empty())
      target[c] = members[static_cast<std::size_t>(
          rng.randint(0, static_cast<std::int64_t>(members.size())))];
  }
  for (int idx : order) {
    if (pb.nearly_out_of_time(3.0)) break;
    const SlotBox& s = layout[idx];
    pb.travel(s.x_min + s.width() * rng.uniform(0.25, 0.75),
              s.y_min + s.height() * rng.uniform(0.25, 0.75));
    pb.hold(rng.uniform(kGlanceHoldMin, kGlanceHoldMax));
  }

  // Errands after the scan: one long dwell per attended category, an optional
  // whitespace pause, and some aimless detours, in shuffled order.
  struct Errand {
    int kind;  // 0 = attended dwell, 1 = whitespace pause, 2 = free detour
    int slot;
  };
  std::vector<Errand> errands;
  for (int c = 0; c < kNumStandardCategories; ++c)
    if (target[c] >= 0) errands.push_back({0, target[c]});
  const GapBand gap = main_gap(layout);
  if (plan.attend_aux && gap.ok) errands.push_back({1, -1});
  int frees = static_cast<int>(
      rng.randint(config.free_waypoints_min, config.free_waypoints_max + 1));
  for (int f = 0; f < frees; ++f) errands.push_back({2, -1});
  rng.shuffle(errands);

  for (const Errand& e : errands) {
    if (pb.nearly_out_of_time(6.0)) break;
    if (e.kind == 2) {
      // Pass-through waypoint in the left page margin; no hold, no fixation.
      pb.travel(rng.uniform(0.006, 0.025), rng.uniform(0.1, 0.9));
      continue;
    }
    double ax, ay, radius;
    int dwells;
    if (e.kind == 0) {
      const SlotBox& s = layout[e.slot];
      ax = s.x_min + s.width() * rng.uniform(0.3, 0.7);
      ay = s.y_min + s.height() * rng.uniform(0.3, 0.7);
      // Micro-dwell circle small enough that the whole cluster sits inside
      // the slot and within one clustering radius of any member.
      radius = std::min(kMicroRadiusCap, 0.45 * 0.5 * std::min(s.width(), s.height()));
      dwells = static_cast<int>(rng.randint(3, 7));
    } else {
      double gh = gap.y1 - gap.y0;
      ax = 0.5 * (gap.x0 + gap.x1) + rng.uniform(-0.15, 0.15) * (gap.x1 - gap.x0);
      ay = 0.5 * (gap.y0 + gap.y1) + rng.uniform(-0.05, 0.05) * gh;
      radius = std::min(kMicroRadiusCap, 0.1 * gh);
      dwells = static_cast<int>(rng.randint(2, 5));
    }
    double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < dwells; ++k) {
      if (pb.nearly_out_of_time(2.0)) break;
      double mx = ax + radius * std::cos(theta);
      double my = ay + radius * std::sin(theta);
      if (k == 0)
        pb.travel(mx, my);
      else
        pb.leg(mx, my, rng.uniform(0.06, 0.12));
      pb.hold(rng.uniform(kStrongHoldMin, kStrongHoldMax));
      // At least a quarter-turn between micro-dwells keeps consecutive
      // fixations more than kFixRadius apart so the detector separates them.
      theta += rng.uniform(std::numbers::pi / 2.0, 1.5 * std::numbers::pi);
    }
  }

  // Drift off toward the bottom of the page.
  pb.travel(rng.uniform(0.3, 0.6), rng.uniform(0.9, 0.97));

  std::vector<GazePoint> gaze;
  const double t_end = pb.t;
  for (double gt = config.gaze_lag; gt <= t_end + 1e-9; gt += kGazeStep) {
    auto [cx, cy] = path_at(pb.samples, gt - config.gaze_lag);
    gaze.push_back({gt, clamp_coord(cx + rng.normal(0.0, config.gaze_noise_sigma)),
                    clamp_coord(cy + rng.normal(0.0, config.gaze_noise_sigma))});
  }
  SynthSession out;
  out.fixations = detect_fixations(gaze);
  out.cursor = std::move(pb.samples);
  return out;
}

SynthSession gen_session(const std::vector<SlotBox>& layout, Rng& rng,
                         const SynthConfig& config) {
  TrialPlan plan;
  for (const SlotBox& s : layout)
    if (is_standard(s.category)) plan.present[category_code(s.category)] = true;
  for (int c = 0; c < kNumStandardCategories; ++c) {
    bool attended = rng.bernoulli(config.notice_rates[c]);
    plan.attend[c] = attended && plan.present[c];
  }
  plan.attend_aux = rng.bernoulli(config.aux_attend_rate);
  return gen_session(layout, rng, config, plan);
}

Trial gen_trial(const SynthConfig& config, int index, const TrialPlan& plan) {
  std::uint64_t si = mix_seed(config.seed, static_cast<std::uint64_t>(index));
  Trial trial;
  char name[32];
  std::snprintf(name, sizeof name, "trial_%05d", index);
  trial.id = name;
  Rng layout_rng(mix_seed(si, kStreamLayout));
  trial.slots = gen_layout(layout_rng, config);
  Rng page_rng(mix_seed(si, kStreamPage));
  trial.page_width_px = static_cast<int>(page_rng.randint(1100, 1501));
  trial.page_height_px = static_cast<int>(page_rng.randint(1800, 2601));
  Rng session_rng(mix_seed(si, kStreamSession));
  SynthSession session = gen_session(trial.slots, session_rng, config, plan);
  trial.cursor = std::move(session.cursor);
  trial.fixations = std::move(session.fixations);
  return trial;
}

void gen_dataset(const SynthConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  const auto plans = plan_dataset(config);
  std::filesystem::create_directories(out_dir);
  for (int i = 0; i < config.n_trials; ++i) {
    Trial trial = gen_trial(config, i, plans[i]);
    auto problems = validate_trial(trial);
    if (!problems.empty())
      throw std::logic_error("generated trial " + trial.id +
                             " violates invariants: " + problems.front());
    write_trial(trial, out_dir / trial.id);
  }
  json manifest{{"n_trials", config.n_trials},
                {"seed", config.seed},
                {"config", json::parse(synth_config_to_json(config))},
                {"config_hash", synth_config_hash(config)}};
  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed to write manifest.json");
}

}  // namespace adsight
