#pragma once

// Hand-rolled random generators shared by the unit, property and acceptance
// tests. Everything is driven by an explicit seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "scalenorm/focus_labels.hpp"
#include "scalenorm/geometry.hpp"

namespace scalenorm::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int integer(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  // Log-uniform in [lo, hi].
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline ImageSize random_image(Rng& rng, int lo, int hi) {
  return ImageSize{rng.integer(lo, hi), rng.integer(lo, hi)};
}

// Box inside the image with side lengths log-uniform in [min_side, max_side]
// (capped by the image).
inline Box random_box(Rng& rng, ImageSize image, double min_side, double max_side) {
  const double w = std::min(rng.log_uniform(min_side, max_side), double(image.width));
  const double h = std::min(rng.log_uniform(min_side, max_side), double(image.height));
  const double x = rng.uniform(0.0, image.width - w);
  const double y = rng.uniform(0.0, image.height - h);
  return Box{x, y, x + w, y + h};
}

// Box snapped to an integer (or half-integer) lattice so that exact edge and
// area coincidences happen often.
inline Box random_lattice_box(Rng& rng, ImageSize image, int max_side, double unit = 1.0) {
  const int w = rng.integer(0, std::min(max_side, image.width));
  const int h = rng.integer(0, std::min(max_side, image.height));
  const int x = rng.integer(0, image.width - w);
  const int y = rng.integer(0, image.height - h);
  return Box{x * unit, y * unit, (x + w) * unit, (y + h) * unit};
}

inline std::vector<GroundTruth> random_gts(Rng& rng, ImageSize image, int min_count,
                                           int max_count, double min_side, double max_side,
                                           int classes = 5, double crowd_p = 0.0) {
  std::vector<GroundTruth> out;
  const int n = rng.integer(min_count, max_count);
  for (int i = 0; i < n; ++i) {
    out.push_back(GroundTruth{random_box(rng, image, min_side, max_side),
                              rng.integer(0, classes - 1), rng.chance(crowd_p)});
  }
  return out;
}

// Probability map with clustered blobs plus sprinkled noise.
inline ProbabilityMap random_probability_map(Rng& rng, ImageSize image, int stride) {
  ProbabilityMap p = ProbabilityMap::for_image(image, stride, 0.0f);
  const int blobs = rng.integer(0, 6);
  for (int b = 0; b < blobs; ++b) {
    const int r0 = rng.integer(0, p.height() - 1);
    const int c0 = rng.integer(0, p.width() - 1);
    const int rh = rng.integer(1, 4);
    const int cw = rng.integer(1, 4);
    for (int r = r0; r < std::min(p.height(), r0 + rh); ++r) {
      for (int c = c0; c < std::min(p.width(), c0 + cw); ++c) {
        p.at(r, c) = static_cast<float>(rng.uniform(0.3, 1.0));
      }
    }
  }
  for (float& v : p.cells()) {
    if (rng.chance(0.03)) v = static_cast<float>(rng.uniform(0.0, 1.0));
  }
  return p;
}

inline double relative_error(double got, double want) {
  const double scale = std::max({1.0, std::abs(got), std::abs(want)});
  return std::abs(got - want) / scale;
}

}  // namespace scalenorm::testing
