#include "augkit/types.hpp"

#include <cmath>

namespace augkit {

std::vector<LandmarkSlot> slots_for(ClothesType type) {
  switch (type) {
    case ClothesType::kUpper:
      return {LandmarkSlot::kLeftCollar,  LandmarkSlot::kRightCollar,
              LandmarkSlot::kLeftSleeve,  LandmarkSlot::kRightSleeve,
              LandmarkSlot::kLeftHem,     LandmarkSlot::kRightHem};
    case ClothesType::kLower:
      return {LandmarkSlot::kLeftWaistline, LandmarkSlot::kRightWaistline,
              LandmarkSlot::kLeftHem,       LandmarkSlot::kRightHem};
    case ClothesType::kFull:
      return {LandmarkSlot::kLeftCollar,    LandmarkSlot::kRightCollar,
              LandmarkSlot::kLeftSleeve,    LandmarkSlot::kRightSleeve,
              LandmarkSlot::kLeftWaistline, LandmarkSlot::kRightWaistline,
              LandmarkSlot::kLeftHem,       LandmarkSlot::kRightHem};
  }
  throw InvalidParameterError("slots_for: unknown clothes type");
}

Image::Image(std::size_t width, std::size_t height, std::size_t channels)
    : width_(width),
      height_(height),
      channels_(channels),
      data_(width * height * channels, 0.0) {
  if (channels != 1 && channels != 3)
    throw InvalidParameterError("Image: channels must be 1 or 3");
}

Image::Image(std::size_t width, std::size_t height, std::size_t channels,
             std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (channels != 1 && channels != 3)
    throw InvalidParameterError("Image: channels must be 1 or 3");
  if (data_.size() != width * height * channels)
    throw ShapeError("Image: data size does not match extents");
  validate();
}

void Image::validate() const {
  for (double v : data_) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw InvalidParameterError("Image: intensity outside [0,1]");
  }
}

CategoryDistribution::CategoryDistribution(std::vector<double> probabilities)
    : probabilities_(std::move(probabilities)) {
  if (probabilities_.empty())
    throw InvalidParameterError("CategoryDistribution: empty");
  for (double p : probabilities_) {
    if (!std::isfinite(p) || p < 0.0)
      throw InvalidParameterError("CategoryDistribution: negative entry");
  }
  const double total = kahan_sum(probabilities_);
  if (std::abs(total - 1.0) > 1e-9)
    throw InvalidParameterError("CategoryDistribution: entries must sum to 1");
}

std::size_t vocabulary_index(const std::vector<std::string>& vocabulary,
                             std::string_view name) {
  for (std::size_t i = 0; i < vocabulary.size(); ++i)
    if (vocabulary[i] == name) return i;
  throw UnknownCategoryError("unknown category: " + std::string(name));
}

double kahan_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace augkit
