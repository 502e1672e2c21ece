#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "adsight/domain.hpp"
#include "adsight/rng.hpp"

namespace adsight {

// Configuration for the synthetic SERP-session generator. Presence
// probabilities control which slot categories appear in a generated layout;
// notice_rates control the fraction of trials (among those where the category
// is present) whose simulated user deliberately attends to that category with
// a long multi-fixation dwell. Order: direct-top, direct-right, organic-top,
// organic-bottom.
struct SynthConfig {
  int n_trials = 200;
  std::uint64_t seed = 0;

  double p_direct_top = 0.55;
  double p_direct_right = 0.31;
  double p_organic_top = 0.80;
  double p_organic_bottom = 0.85;

  std::array<double, kNumStandardCategories> notice_rates{0.42, 0.46, 0.44, 0.29};

  double aux_attend_rate = 0.25;     // chance of a deliberate whitespace pause
  double gaze_lag = 0.12;            // seconds the simulated gaze trails the cursor
  double gaze_noise_sigma = 0.0015;  // isotropic gaze noise, page units
  int free_waypoints_min = 1;        // detour waypoints through free page space
  int free_waypoints_max = 3;
  double session_cap = 60.0;  // soft ceiling on session length, seconds

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

std::string synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const std::string& text);
// FNV-1a over the canonical JSON form; stable across runs and platforms.
std::string synth_config_hash(const SynthConfig& config);

// Draws a random SERP layout (standard categories only, at most eight slots,
// never zero). Direct-top and direct-right are single boxes; the organic
// categories are stacks of one to three boxes. The vertical band between the
// top-of-page stack and the bottom stack always has positive height, so
// auxiliary augmentation has room to place whitespace boxes.
std::vector<SlotBox> gen_layout(Rng& rng, const SynthConfig& config);

// Per-trial generation plan: which categories exist in the trial's layout and
// which of them the simulated user attends. plan_dataset assigns attendance
// by per-category quota over the planned presences, so the dataset-level
// attended fraction matches notice_rates up to rounding instead of
// fluctuating binomially. Attendance therefore depends on n_trials; layouts
// and sessions for trial i depend only on (seed, i).
struct TrialPlan {
  std::array<bool, kNumStandardCategories> present{};
  std::array<bool, kNumStandardCategories> attend{};
  bool attend_aux = false;
};

std::vector<TrialPlan> plan_dataset(const SynthConfig& config);

struct SynthSession {
  std::vector<CursorSample> cursor;
  std::vector<FixationEvent> fixations;
};

// Simulates one session over the layout: a top-to-bottom reading scan glances
// briefly at every slot, attended categories get a long multi-fixation dwell
// on one of their slots, and fixations are detected from a lagged, noisy gaze
// track that follows the cursor polyline. The three-argument overload draws
// the attended categories directly from `rng` with the configured rates.
SynthSession gen_session(const std::vector<SlotBox>& layout, Rng& rng, const SynthConfig& config);
SynthSession gen_session(const std::vector<SlotBox>& layout, Rng& rng, const SynthConfig& config,
                         const TrialPlan& plan);

// Assembles trial `index` (layout, page dimensions, session) from the
// per-trial substreams of config.seed. The plan must come from plan_dataset
// (or at least be consistent with the trial's layout; attended categories
// with no slot in the layout are ignored).
Trial gen_trial(const SynthConfig& config, int index, const TrialPlan& plan);

// Generates the full dataset under out_dir: one trial_NNNNN directory per
// trial plus manifest.json recording the generator configuration, its hash,
// and the trial count. Reruns with the same config are byte-identical.
void gen_dataset(const SynthConfig& config, const std::filesystem::path& out_dir);

}  // namespace adsight
