#include "augkit/warp.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "augkit/error.hpp"
#include "augkit/lmmap.hpp"

namespace augkit {
namespace {

std::size_t clamp_index(std::int64_t v, std::size_t last) {
  if (v < 0) return 0;
  if (v > static_cast<std::int64_t>(last)) return last;
  return static_cast<std::size_t>(v);
}

// cos/sin with quarter-turn snapping: the trig of exact multiples of
// pi/2 carries ~1e-16 argument-reduction noise, which would turn exact
// grid permutations into interpolation.
std::pair<double, double> rotation_cos_sin(double theta) {
  double c = std::cos(theta);
  double s = std::sin(theta);
  const auto snap = [](double v) {
    if (std::abs(v) < 1e-12) return 0.0;
    if (std::abs(v - 1.0) < 1e-12) return 1.0;
    if (std::abs(v + 1.0) < 1e-12) return -1.0;
    return v;
  };
  return {snap(c), snap(s)};
}

bool all_zero(const Grid& g) {
  for (double v : g.values)
    if (v != 0.0) return false;
  return true;
}

}  // namespace

PixelValue bilinear_sample(const Image& img, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y))
    throw InvalidCoordinateError("bilinear_sample: non-finite coordinate");
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const double x0f = std::floor(x);
  const double y0f = std::floor(y);
  const double fx = x - x0f;
  const double fy = y - y0f;
  const auto x0 = static_cast<std::int64_t>(x0f);
  const auto y0 = static_cast<std::int64_t>(y0f);
  const std::size_t c0 = clamp_index(x0, w - 1);
  const std::size_t c1 = clamp_index(x0 + 1, w - 1);
  const std::size_t r0 = clamp_index(y0, h - 1);
  const std::size_t r1 = clamp_index(y0 + 1, h - 1);

  PixelValue out{0.0, 0.0, 0.0};
  for (std::size_t ch = 0; ch < img.channels(); ++ch) {
    const double top = (1.0 - fx) * img.at(r0, c0, ch) + fx * img.at(r0, c1, ch);
    const double bottom =
        (1.0 - fx) * img.at(r1, c0, ch) + fx * img.at(r1, c1, ch);
    out[ch] = (1.0 - fy) * top + fy * bottom;
  }
  return out;
}

GaussianKernel gaussian_kernel(double sigma, double truncation,
                               KernelNormalization normalization) {
  if (!std::isfinite(sigma) || sigma <= 0.0)
    throw InvalidParameterError("gaussian_kernel: sigma must be positive");
  if (!std::isfinite(truncation) || truncation <= 0.0)
    throw InvalidParameterError("gaussian_kernel: truncation must be positive");

  GaussianKernel kernel;
  kernel.radius = static_cast<int>(std::ceil(truncation * sigma));
  const int side = kernel.side();
  kernel.values.resize(static_cast<std::size_t>(side) * side);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int dy = -kernel.radius; dy <= kernel.radius; ++dy) {
    for (int dx = -kernel.radius; dx <= kernel.radius; ++dx) {
      const double d2 = static_cast<double>(dy) * dy + static_cast<double>(dx) * dx;
      kernel.values[static_cast<std::size_t>(dy + kernel.radius) * side +
                    (dx + kernel.radius)] = std::exp(-d2 * inv);
    }
  }
  if (normalization == KernelNormalization::kUnitSum) {
    const double total = kahan_sum(kernel.values);
    for (double& v : kernel.values) v /= total;
  }
  return kernel;
}

Grid convolve_zero_padded(const Grid& field, const GaussianKernel& kernel) {
  Grid out(field.height, field.width);
  const auto h = static_cast<std::int64_t>(field.height);
  const auto w = static_cast<std::int64_t>(field.width);
  const int r = kernel.radius;
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      const double v = field.at(y, x);
      if (v == 0.0) continue;
      const std::int64_t y_lo = std::max<std::int64_t>(0, y - r);
      const std::int64_t y_hi = std::min<std::int64_t>(h - 1, y + r);
      const std::int64_t x_lo = std::max<std::int64_t>(0, x - r);
      const std::int64_t x_hi = std::min<std::int64_t>(w - 1, x + r);
      for (std::int64_t oy = y_lo; oy <= y_hi; ++oy) {
        for (std::int64_t ox = x_lo; ox <= x_hi; ++ox) {
          out.at(oy, ox) +=
              v * kernel.at(static_cast<int>(oy - y), static_cast<int>(ox - x));
        }
      }
    }
  }
  return out;
}

DisplacementFieldPair make_displacement_fields(std::size_t width,
                                               std::size_t height,
                                               const ElasticParams& params,
                                               RngStream& rng) {
  if (width == 0 || height == 0)
    throw InvalidParameterError("make_displacement_fields: empty grid");
  if (!std::isfinite(params.alpha) || params.alpha < 0.0)
    throw InvalidParameterError("make_displacement_fields: alpha must be >= 0");
  const std::size_t pixels = width * height;
  if (params.n_seeds > pixels)
    throw InvalidParameterError(
        "make_displacement_fields: more seed positions than pixels");

  Grid sparse_x(height, width);
  Grid sparse_y(height, width);
  std::vector<std::size_t> positions;
  positions.reserve(params.n_seeds);
  std::vector<bool> taken(pixels, false);
  for (std::size_t i = 0; i < params.n_seeds; ++i) {
    std::size_t idx;
    do {
      idx = static_cast<std::size_t>(rng.next_below(pixels));
    } while (taken[idx]);
    taken[idx] = true;
    positions.push_back(idx);
  }
  for (std::size_t idx : positions) {
    sparse_x.values[idx] = rng.uniform(-params.alpha, params.alpha);
    sparse_y.values[idx] = rng.uniform(-params.alpha, params.alpha);
  }

  const GaussianKernel kernel = gaussian_kernel(params.sigma, params.truncation,
                                                KernelNormalization::kUnitPeak);
  DisplacementFieldPair fields;
  fields.dx = convolve_zero_padded(sparse_x, kernel);
  fields.dy = convolve_zero_padded(sparse_y, kernel);
  fields.stage = FieldStage::kSmoothed;
  return fields;
}

WarpResult warp_with_fields(const Image& img, const LandmarkSet& landmarks,
                            const DisplacementFieldPair& fields,
                            std::size_t candidates) {
  if (fields.dx.height != img.height() || fields.dx.width != img.width() ||
      fields.dy.height != img.height() || fields.dy.width != img.width())
    throw ShapeError("warp_with_fields: field extents do not match image");
  if (fields.stage != FieldStage::kSmoothed)
    throw InvalidParameterError("warp_with_fields: fields must be smoothed");

  // The identity warp inverts exactly; skip resampling entirely so the
  // output is bit-identical.
  if (all_zero(fields.dx) && all_zero(fields.dy)) return {img, landmarks};

  Image out(img.width(), img.height(), img.channels());
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      const double sx = static_cast<double>(x) + fields.dx.at(y, x);
      const double sy = static_cast<double>(y) + fields.dy.at(y, x);
      const PixelValue v = bilinear_sample(img, sx, sy);
      for (std::size_t ch = 0; ch < img.channels(); ++ch)
        out.at(y, x, ch) = v[ch];
    }
  }

  LandmarkSet mapped = landmarks;
  for (auto& slot : mapped.slots) {
    if (!slot.has_value()) continue;
    if (slot->visibility == Visibility::kOutOfFrame) continue;
    *slot = invert_landmark(fields, *slot, candidates);
  }
  return {std::move(out), mapped};
}

ElasticWarpResult elastic_warp(const Image& img, const LandmarkSet& landmarks,
                               const ElasticParams& params, RngStream& rng,
                               std::size_t candidates) {
  DisplacementFieldPair fields =
      make_displacement_fields(img.width(), img.height(), params, rng);
  WarpResult warped = warp_with_fields(img, landmarks, fields, candidates);
  return {std::move(warped.image), warped.landmarks, std::move(fields)};
}

Image rotate_image(const Image& img, double theta, double fill) {
  const auto [c, s] = rotation_cos_sin(theta);
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const double cx = (static_cast<double>(w) - 1.0) / 2.0;
  const double cy = (static_cast<double>(h) - 1.0) / 2.0;
  const double x_max = static_cast<double>(w) - 0.5;
  const double y_max = static_cast<double>(h) - 0.5;

  Image out(w, h, img.channels());
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double ox = static_cast<double>(x) - cx;
      const double oy = static_cast<double>(y) - cy;
      // inverse map R(-theta)
      const double sx = cx + c * ox + s * oy;
      const double sy = cy - s * ox + c * oy;
      if (sx < -0.5 || sx > x_max || sy < -0.5 || sy > y_max) {
        for (std::size_t ch = 0; ch < img.channels(); ++ch)
          out.at(y, x, ch) = fill;
        continue;
      }
      const PixelValue v = bilinear_sample(img, sx, sy);
      for (std::size_t ch = 0; ch < img.channels(); ++ch) out.at(y, x, ch) = v[ch];
    }
  }
  return out;
}

LandmarkSet rotate_landmarks(const LandmarkSet& landmarks, double theta,
                             double center_x, double center_y,
                             std::size_t width, std::size_t height) {
  const auto [c, s] = rotation_cos_sin(theta);
  LandmarkSet out = landmarks;
  for (auto& slot : out.slots) {
    if (!slot.has_value()) continue;
    const double ox = slot->x - center_x;
    const double oy = slot->y - center_y;
    const double x = center_x + c * ox - s * oy;
    const double y = center_y + s * ox + c * oy;
    const bool inside = x >= 0.0 && x < static_cast<double>(width) &&
                        y >= 0.0 && y < static_cast<double>(height);
    slot->x = x;
    slot->y = y;
    if (!inside) slot->visibility = Visibility::kOutOfFrame;
  }
  return out;
}

}  // namespace augkit
