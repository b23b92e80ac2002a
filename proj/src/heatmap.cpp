#include "augkit/heatmap.hpp"

#include <cmath>
#include <vector>

#include "augkit/error.hpp"

namespace augkit {

HeatmapStack encode_heatmaps(const LandmarkSet& landmarks, std::size_t width,
                             std::size_t height, double sigma) {
  if (width == 0 || height == 0)
    throw InvalidParameterError("encode_heatmaps: empty canvas");
  if (!std::isfinite(sigma) || sigma <= 0.0)
    throw InvalidParameterError("encode_heatmaps: sigma must be positive");

  HeatmapStack stack(height, width);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> col_factor(width);
  std::vector<double> row_factor(height);
  for (std::size_t k = 0; k < kLandmarkCount; ++k) {
    const auto& slot = landmarks.slots[k];
    if (!slot.has_value() || slot->visibility == Visibility::kOutOfFrame)
      continue;  // zero plane
    // The response is separable; one exp per row and column instead of
    // one per pixel.
    for (std::size_t x = 0; x < width; ++x) {
      const double d = static_cast<double>(x) - slot->x;
      col_factor[x] = std::exp(-d * d * inv);
    }
    for (std::size_t y = 0; y < height; ++y) {
      const double d = static_cast<double>(y) - slot->y;
      row_factor[y] = std::exp(-d * d * inv);
    }
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        double v = row_factor[y] * col_factor[x];
        if (v > 1.0) v = 1.0;
        stack.at(k, y, x) = v;
      }
    }
  }
  return stack;
}

LandmarkSet decode_heatmaps(const HeatmapStack& stack, RngStream& rng,
                            double zero_threshold) {
  if (stack.height == 0 || stack.width == 0)
    throw InvalidParameterError("decode_heatmaps: empty stack");

  LandmarkSet out;
  for (std::size_t k = 0; k < kLandmarkCount; ++k) {
    double max_v = stack.at(k, 0, 0);
    for (std::size_t y = 0; y < stack.height; ++y)
      for (std::size_t x = 0; x < stack.width; ++x)
        max_v = std::max(max_v, stack.at(k, y, x));
    if (max_v < zero_threshold) continue;  // absent slot

    std::vector<std::size_t> tied;
    for (std::size_t y = 0; y < stack.height; ++y)
      for (std::size_t x = 0; x < stack.width; ++x)
        if (stack.at(k, y, x) == max_v) tied.push_back(y * stack.width + x);

    std::size_t pick = tied.front();
    if (tied.size() > 1)
      pick = tied[static_cast<std::size_t>(rng.next_below(tied.size()))];
    Landmark lm;
    lm.x = static_cast<double>(pick % stack.width);
    lm.y = static_cast<double>(pick / stack.width);
    lm.visibility = Visibility::kVisible;
    out.slots[k] = lm;
  }
  return out;
}

double heatmap_loss(const std::vector<HeatmapStack>& pred,
                    const std::vector<HeatmapStack>& gt) {
  if (pred.size() != gt.size())
    throw ShapeError("heatmap_loss: batch sizes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const HeatmapStack& p = pred[i];
    const HeatmapStack& g = gt[i];
    if (p.height != g.height || p.width != g.width)
      throw ShapeError("heatmap_loss: stack extents differ");
    for (std::size_t j = 0; j < p.values.size(); ++j) {
      const double d = p.values[j] - g.values[j];
      total += d * d;
    }
  }
  return total;
}

Grid landmark_attention(const HeatmapStack& stack, std::size_t factor) {
  if (factor == 0)
    throw InvalidParameterError("landmark_attention: factor must be >= 1");
  if (stack.height % factor != 0 || stack.width % factor != 0)
    throw ShapeError("landmark_attention: extents not divisible by factor");

  const std::size_t oh = stack.height / factor;
  const std::size_t ow = stack.width / factor;
  const double inv_block = 1.0 / (static_cast<double>(factor) * factor);
  Grid out(oh, ow);
  for (std::size_t k = 0; k < kLandmarkCount; ++k) {
    for (std::size_t by = 0; by < oh; ++by) {
      for (std::size_t bx = 0; bx < ow; ++bx) {
        double sum = 0.0;
        for (std::size_t y = by * factor; y < (by + 1) * factor; ++y)
          for (std::size_t x = bx * factor; x < (bx + 1) * factor; ++x)
            sum += stack.at(k, y, x);
        const double pooled = sum * inv_block;
        if (k == 0 || pooled > out.at(by, bx)) out.at(by, bx) = pooled;
      }
    }
  }
  return out;
}

}  // namespace augkit
