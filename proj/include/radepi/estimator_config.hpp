#pragma once

#include <cstdint>
#include <stdexcept>

namespace radepi {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Discretization used by the sampling estimator and the classical-derivative
/// estimates. The t-grid covers the whole positive ray because the infimum
/// over t is global; the perturbation samples stand in for the liminf over
/// directions u -> d.
struct EstimatorConfig {
  double t_min = 1e-8;
  double t_max = 1e4;
  int t_count = 512;

  double perturb_radius = 1e-6;
  int perturb_count = 8;

  double divergence_floor = -1e12;
  double tolerance = 1e-9;

  // Small-t grid for directional/sub/Clarke derivative estimates.
  double small_t_min = 1e-9;
  double small_t_max = 1e-4;
  int small_t_count = 16;
  double clarke_radius = 1e-5;
  int clarke_samples = 16;

  // Direction sampling on continuous domains.
  int direction_samples_low_dim = 64;   // n <= 3
  int direction_samples_per_dim = 256;  // higher n: 256 * n

  std::uint64_t seed = 1;

  void validate() const {
    if (!(t_min > 0)) throw ConfigError("estimator t_min must be > 0");
    if (!(t_max >= t_min)) throw ConfigError("estimator t_max must be >= t_min");
    if (t_count < 2) throw ConfigError("estimator t_count must be >= 2");
    if (perturb_count < 0) throw ConfigError("perturb_count must be >= 0");
    if (!(perturb_radius >= 0)) throw ConfigError("perturb_radius must be >= 0");
    if (!(small_t_min > 0) || !(small_t_max >= small_t_min) || small_t_count < 2)
      throw ConfigError("small-t grid malformed");
  }
};

}  // namespace radepi
