#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "augkit/types.hpp"

namespace augkit {

// Per-slot normalized Euclidean error: sqrt((dx/width)^2 + (dy/height)^2).
// Slots absent in the ground truth are skipped; a slot the ground truth
// has but the prediction lacks scores sqrt(2), the canvas diagonal in
// normalized units.  Visibility does not gate the comparison.
std::array<std::optional<double>, kLandmarkCount> normalized_error(
    const LandmarkSet& predicted, const LandmarkSet& actual, std::size_t width,
    std::size_t height);

// Percentage of samples whose true category appears among the k highest
// scores.  Ties at the cut rank resolve by ascending category index, so
// the result is deterministic.  1 <= k <= vocabulary size.
double topk_accuracy(const std::vector<CategoryDistribution>& predictions,
                     const std::vector<std::string>& truths, std::size_t k,
                     const std::vector<std::string>& vocabulary);

// Set-valued variant: a sample counts as correct when any accepted name
// ranks inside the top k.  Used when ground-truth labels map to several
// admissible categories.
double topk_set_accuracy(const std::vector<CategoryDistribution>& predictions,
                         const std::vector<std::vector<std::string>>& accepted,
                         std::size_t k,
                         const std::vector<std::string>& vocabulary);

struct EvalSample {
  LandmarkSet predicted;
  LandmarkSet actual;
  std::size_t width = 0;
  std::size_t height = 0;
  // Category scoring is optional; a sample participates when it has
  // both scores and at least one accepted name.
  std::optional<CategoryDistribution> scores;
  std::string category;                  // display label for grouping
  std::vector<std::string> accepted;     // admissible names; defaults to {category}
};

struct EvalReport {
  std::array<std::optional<double>, kLandmarkCount> landmark_error;
  std::array<std::size_t, kLandmarkCount> landmark_instances{};
  // Mean over slots that scored at least one instance.
  std::optional<double> average_error;
  std::vector<std::size_t> k_values;
  std::vector<std::optional<double>> overall_topk;  // aligned with k_values
  // Lexicographic by category name; percentages aligned with k_values.
  std::vector<std::pair<std::string, std::vector<double>>> per_category_topk;
  std::size_t sample_count = 0;
  std::size_t scored_sample_count = 0;
};

EvalReport build_report(const std::vector<EvalSample>& samples,
                        const std::vector<std::size_t>& k_values,
                        const std::vector<std::string>& vocabulary);

// Tab-separated tables: landmark errors across the eight slot names
// plus Avg., then per-category top-k accuracy with an Overall row.
std::string render_report(const EvalReport& report);

}  // namespace augkit
