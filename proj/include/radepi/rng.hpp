#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace radepi {

/// Seeded generator with hand-rolled distributions so that identical seeds
/// give identical streams on every platform (std:: distributions are
/// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
  }

  std::vector<double> unit_vector(int n) {
    while (true) {
      std::vector<double> v(n);
      double ss = 0;
      for (int i = 0; i < n; ++i) {
        v[i] = normal();
        ss += v[i] * v[i];
      }
      if (ss > 1e-18) {
        double inv = 1.0 / std::sqrt(ss);
        for (auto& c : v) c *= inv;
        return v;
      }
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace radepi
