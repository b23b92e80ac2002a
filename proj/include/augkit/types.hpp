#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "augkit/error.hpp"

namespace augkit {

inline constexpr std::size_t kLandmarkCount = 8;

// Canonical slot order; annotation files and reports follow it.
enum class LandmarkSlot : std::size_t {
  kLeftCollar = 0,
  kRightCollar = 1,
  kLeftSleeve = 2,
  kRightSleeve = 3,
  kLeftWaistline = 4,
  kRightWaistline = 5,
  kLeftHem = 6,
  kRightHem = 7,
};

inline constexpr std::array<std::string_view, kLandmarkCount> kLandmarkNames = {
    "L.Collar", "R.Collar", "L.Sleeve",     "R.Sleeve",
    "L.Waistline", "R.Waistline", "L.Hem",  "R.Hem",
};

enum class Visibility : int {
  kVisible = 0,
  kOccluded = 1,
  kOutOfFrame = 2,
};

// Position in pixel units, x = column, y = row, origin at the top-left
// pixel center, 0-indexed.  1-indexed coordinates exist only inside
// annotation files and are converted at the parse/serialize boundary.
struct Landmark {
  double x = 0.0;
  double y = 0.0;
  Visibility visibility = Visibility::kVisible;
};

// Fixed 8-slot set; an empty optional means the garment type does not
// define that slot (distinct from out-of-frame, which keeps coordinates).
struct LandmarkSet {
  std::array<std::optional<Landmark>, kLandmarkCount> slots;

  const std::optional<Landmark>& at(LandmarkSlot s) const {
    return slots[static_cast<std::size_t>(s)];
  }
  std::optional<Landmark>& at(LandmarkSlot s) {
    return slots[static_cast<std::size_t>(s)];
  }

  std::size_t present_count() const {
    std::size_t n = 0;
    for (const auto& s : slots) n += s.has_value() ? 1 : 0;
    return n;
  }
};

// On-disk type codes: 1 = upper, 2 = lower, 3 = full.
enum class ClothesType : int {
  kUpper = 1,
  kLower = 2,
  kFull = 3,
};

// Slots a garment type populates, in canonical order.
std::vector<LandmarkSlot> slots_for(ClothesType type);

// Row-major H x W grid of reals.  Used for displacement fields,
// single heatmap planes and pooled attention maps.
struct Grid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  Grid() = default;
  Grid(std::size_t h, std::size_t w) : height(h), width(w), values(h * w, 0.0) {}

  double at(std::size_t row, std::size_t col) const {
    return values[row * width + col];
  }
  double& at(std::size_t row, std::size_t col) {
    return values[row * width + col];
  }
};

// Interleaved row-major image, 1 (gray) or 3 (RGB) channels,
// intensities finite and inside [0,1].  8-bit files are divided by 255
// on load and re-quantized (round half up) on save.
class Image {
 public:
  Image() = default;
  Image(std::size_t width, std::size_t height, std::size_t channels);
  Image(std::size_t width, std::size_t height, std::size_t channels,
        std::vector<double> data);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t channels() const { return channels_; }

  double at(std::size_t row, std::size_t col, std::size_t channel) const {
    return data_[(row * width_ + col) * channels_ + channel];
  }
  double& at(std::size_t row, std::size_t col, std::size_t channel) {
    return data_[(row * width_ + col) * channels_ + channel];
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  // Throws InvalidParameterError on non-finite or out-of-range intensities.
  void validate() const;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

// Probability vector over a category vocabulary; entries are
// nonnegative and sum to 1 within 1e-9.
class CategoryDistribution {
 public:
  CategoryDistribution() = default;
  explicit CategoryDistribution(std::vector<double> probabilities);

  std::size_t size() const { return probabilities_.size(); }
  double at(std::size_t i) const { return probabilities_[i]; }
  const std::vector<double>& probabilities() const { return probabilities_; }

 private:
  std::vector<double> probabilities_;
};

// Index of a name in a category vocabulary; throws UnknownCategoryError.
std::size_t vocabulary_index(const std::vector<std::string>& vocabulary,
                             std::string_view name);

// Compensated (Kahan) sum; deterministic for a fixed iteration order.
double kahan_sum(const std::vector<double>& values);

}  // namespace augkit
