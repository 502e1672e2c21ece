#include "adsight/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace adsight::nn {

GradCheckResult grad_check(ParamStore& params,
                           const std::function<double(const ParamStore&)>& loss,
                           const GradStore& analytic, double step, std::size_t max_coords,
                           std::uint64_t seed) {
  struct Coord {
    const std::string* name;
    Eigen::Index r, c;
  };
  std::vector<Coord> coords;
  for (const auto& [name, e] : params.entries) {
    for (Eigen::Index r = 0; r < e.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < e.value.cols(); ++c) coords.push_back({&name, r, c});
    }
  }

  if (coords.size() > max_coords) {
    Rng rng(mix_seed(seed, 0x6772616463686bULL));  // dedicated subsample stream
    rng.shuffle(coords);
    coords.resize(max_coords);
  }

  GradCheckResult result;
  result.checked = coords.size();
  for (const auto& coord : coords) {
    double& theta = params.entries.at(*coord.name).value(coord.r, coord.c);
    const double saved = theta;
    theta = saved + step;
    const double up = loss(params);
    theta = saved - step;
    const double dn = loss(params);
    theta = saved;

    const double numeric = (up - dn) / (2.0 * step);
    const double a = analytic.at(*coord.name)(coord.r, coord.c);
    const double rel =
        std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-4});
    if (rel > result.max_rel_err) {
      result.max_rel_err = rel;
      result.worst_coord = *coord.name + "(" + std::to_string(coord.r) + "," +
                           std::to_string(coord.c) + ")";
    }
  }
  return result;
}

}  // namespace adsight::nn
