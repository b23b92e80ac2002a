#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "augkit/rng.hpp"
#include "augkit/types.hpp"

namespace augkit {

// Per-channel sample; entries past the image's channel count stay 0.
using PixelValue = std::array<double, 3>;

// Bilinear interpolation at real-valued (x, y), x = column, y = row.
// Coordinates are clamped to the pixel grid, so anything outside the
// image replicates the border; integral coordinates return the exact
// stored value.  Non-finite coordinates throw InvalidCoordinateError.
PixelValue bilinear_sample(const Image& img, double x, double y);

enum class KernelNormalization {
  kUnitPeak,  // center weight exactly 1
  kUnitSum,   // weights sum to 1
};

// Square truncated Gaussian, radius = ceil(truncation * sigma).
struct GaussianKernel {
  int radius = 0;
  std::vector<double> values;  // (2*radius+1)^2, row-major

  int side() const { return 2 * radius + 1; }
  double at(int dy, int dx) const {
    return values[static_cast<std::size_t>(dy + radius) * side() + (dx + radius)];
  }
};

// sigma and truncation must be positive.
GaussianKernel gaussian_kernel(double sigma, double truncation = 3.0,
                               KernelNormalization normalization =
                                   KernelNormalization::kUnitPeak);

enum class FieldStage {
  kSparse,    // raw impulses
  kSmoothed,  // after Gaussian smoothing
};

// Per-axis displacement fields over the image grid; dx and dy share
// extents.  Smoothed fields bound every entry by n_seeds * alpha.
struct DisplacementFieldPair {
  Grid dx;
  Grid dy;
  FieldStage stage = FieldStage::kSparse;
};

struct ElasticParams {
  std::size_t n_seeds = 3;   // seed positions, sampled without replacement
  double alpha = 500.0;      // displacement amplitude, draws are U(-alpha, alpha)
  double sigma = 40.0;       // smoothing bandwidth in pixels
  double truncation = 3.0;   // kernel support in sigmas
};

// Zero-padded 2D convolution with a symmetric kernel.  Cost scales with
// the number of nonzero input entries, which is what the sparse
// displacement fields need.
Grid convolve_zero_padded(const Grid& field, const GaussianKernel& kernel);

// Sparse impulse fields (positions without replacement, values
// U(-alpha, alpha)) smoothed with the unit-peak Gaussian.  Draw order:
// all positions first, then a dx, dy pair per position in draw order.
// n_seeds greater than width*height throws InvalidParameterError.
DisplacementFieldPair make_displacement_fields(std::size_t width,
                                               std::size_t height,
                                               const ElasticParams& params,
                                               RngStream& rng);

struct WarpResult {
  Image image;
  LandmarkSet landmarks;
};

// Inverse-maps the image through the given smoothed fields:
// output(x,y) samples input(x + dx(y,x), y + dy(y,x)) bilinearly with
// border replication.  Visible and occluded landmarks are re-located on
// the output grid (see invert_landmark); out-of-frame and absent slots
// pass through.  candidates = 0 selects the resolution-scaled default.
// Identically-zero fields return the inputs unchanged.
WarpResult warp_with_fields(const Image& img, const LandmarkSet& landmarks,
                            const DisplacementFieldPair& fields,
                            std::size_t candidates = 0);

struct ElasticWarpResult {
  Image image;
  LandmarkSet landmarks;
  DisplacementFieldPair fields;
};

// Random elastic deformation: draws fields via make_displacement_fields,
// then applies warp_with_fields.  The fields that were used are returned
// so landmarks can be audited against them.
ElasticWarpResult elastic_warp(const Image& img, const LandmarkSet& landmarks,
                               const ElasticParams& params, RngStream& rng,
                               std::size_t candidates = 0);

// Rotation about the canvas center ((w-1)/2, (h-1)/2) onto a same-size
// canvas.  Pixels are pulled through the inverse map with bilinear
// sampling; source positions beyond half a pixel outside the grid take
// the fill value.  Quarter-turn angles reduce to exact grid permutations
// on square images.
Image rotate_image(const Image& img, double theta, double fill = 0.0);

// Forward-rotates landmark positions about (center_x, center_y).
// Results landing outside [0,width) x [0,height) keep their coordinates
// but become out-of-frame; visibility never upgrades.
LandmarkSet rotate_landmarks(const LandmarkSet& landmarks, double theta,
                             double center_x, double center_y,
                             std::size_t width, std::size_t height);

}  // namespace augkit
