#pragma once

#include <functional>
#include <string>

#include "adsight/nn/params.hpp"

namespace adsight::nn {

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_coord;  // "name(r,c)" of the worst offender
  std::size_t checked = 0;
};

// Central-difference check of `analytic` against the scalar loss closure.
// Every parameter coordinate is probed unless the store holds more than
// max_coords coordinates, in which case a seeded random subsample is used.
// Relative error uses max(|analytic|, |numeric|, 1e-4) in the denominator so
// near-zero coordinates don't blow up the ratio.
GradCheckResult grad_check(ParamStore& params,
                           const std::function<double(const ParamStore&)>& loss,
                           const GradStore& analytic, double step = 1e-5,
                           std::size_t max_coords = 1000, std::uint64_t seed = 0);

}  // namespace adsight::nn
