#pragma once

#include <cstddef>
#include <vector>

#include "augkit/rng.hpp"
#include "augkit/types.hpp"

namespace augkit {

// One Gaussian response plane per landmark slot, values in [0,1],
// plane-major storage.  Planes for absent or out-of-frame landmarks are
// identically zero.
struct HeatmapStack {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  HeatmapStack() = default;
  HeatmapStack(std::size_t h, std::size_t w)
      : height(h), width(w), values(kLandmarkCount * h * w, 0.0) {}

  double at(std::size_t plane, std::size_t row, std::size_t col) const {
    return values[(plane * height + row) * width + col];
  }
  double& at(std::size_t plane, std::size_t row, std::size_t col) {
    return values[(plane * height + row) * width + col];
  }
};

// Plane k holds exp(-((x - x_k)^2 + (y - y_k)^2) / (2 sigma^2)) for slot
// k's landmark; sigma defaults to 8 at 224x224 and must be positive.
HeatmapStack encode_heatmaps(const LandmarkSet& landmarks, std::size_t width,
                             std::size_t height, double sigma = 8.0);

// Per-plane argmax.  Multiple pixels attaining the exact maximum are
// resolved by one uniform draw from rng; unique maxima draw nothing.
// Planes whose maximum falls below zero_threshold decode to an absent
// slot.  Decoded landmarks come back visible.
LandmarkSet decode_heatmaps(const HeatmapStack& stack, RngStream& rng,
                            double zero_threshold = 1e-3);

// Sum over the batch, planes and pixels of squared differences, no
// normalization.  Batch sizes and extents must agree pairwise.
double heatmap_loss(const std::vector<HeatmapStack>& pred,
                    const std::vector<HeatmapStack>& gt);

// Average-pools each plane over factor x factor blocks, then takes the
// pointwise maximum across planes.  Extents must divide by factor.
Grid landmark_attention(const HeatmapStack& stack, std::size_t factor = 8);

}  // namespace augkit
