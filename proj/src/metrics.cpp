#include "augkit/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "augkit/error.hpp"

namespace augkit {
namespace {

// Rank of a category under (score descending, index ascending); the
// prediction is "in the top k" when rank < k.
std::size_t category_rank(const CategoryDistribution& scores, std::size_t idx) {
  const double p = scores.at(idx);
  std::size_t rank = 0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores.at(j) > p || (scores.at(j) == p && j < idx)) ++rank;
  }
  return rank;
}

bool in_top_k(const CategoryDistribution& scores,
              const std::vector<std::size_t>& accepted_indices, std::size_t k) {
  for (std::size_t idx : accepted_indices)
    if (category_rank(scores, idx) < k) return true;
  return false;
}

std::string fixed_decimal(double v, int precision) {
  char buf[64];
  const auto result =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  return std::string(buf, result.ptr);
}

}  // namespace

std::array<std::optional<double>, kLandmarkCount> normalized_error(
    const LandmarkSet& predicted, const LandmarkSet& actual, std::size_t width,
    std::size_t height) {
  if (width == 0 || height == 0)
    throw InvalidParameterError("normalized_error: empty canvas");
  std::array<std::optional<double>, kLandmarkCount> out;
  for (std::size_t k = 0; k < kLandmarkCount; ++k) {
    const auto& gt = actual.slots[k];
    if (!gt.has_value()) continue;
    const auto& pred = predicted.slots[k];
    if (!pred.has_value()) {
      out[k] = std::sqrt(2.0);
      continue;
    }
    const double dx = (pred->x - gt->x) / static_cast<double>(width);
    const double dy = (pred->y - gt->y) / static_cast<double>(height);
    out[k] = std::sqrt(dx * dx + dy * dy);
  }
  return out;
}

double topk_set_accuracy(const std::vector<CategoryDistribution>& predictions,
                         const std::vector<std::vector<std::string>>& accepted,
                         std::size_t k,
                         const std::vector<std::string>& vocabulary) {
  if (predictions.empty())
    throw InvalidParameterError("topk_set_accuracy: no samples");
  if (predictions.size() != accepted.size())
    throw ShapeError("topk_set_accuracy: predictions and truths differ in size");
  if (k == 0 || k > vocabulary.size())
    throw InvalidParameterError("topk_set_accuracy: k outside [1, n]");

  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].size() != vocabulary.size())
      throw ShapeError("topk_set_accuracy: distribution size mismatch");
    if (accepted[i].empty())
      throw InvalidParameterError("topk_set_accuracy: empty accepted set");
    std::vector<std::size_t> indices;
    indices.reserve(accepted[i].size());
    for (const std::string& name : accepted[i])
      indices.push_back(vocabulary_index(vocabulary, name));
    if (in_top_k(predictions[i], indices, k)) ++correct;
  }
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(predictions.size());
}

double topk_accuracy(const std::vector<CategoryDistribution>& predictions,
                     const std::vector<std::string>& truths, std::size_t k,
                     const std::vector<std::string>& vocabulary) {
  std::vector<std::vector<std::string>> singletons;
  singletons.reserve(truths.size());
  for (const std::string& name : truths) singletons.push_back({name});
  return topk_set_accuracy(predictions, singletons, k, vocabulary);
}

EvalReport build_report(const std::vector<EvalSample>& samples,
                        const std::vector<std::size_t>& k_values,
                        const std::vector<std::string>& vocabulary) {
  for (std::size_t k : k_values)
    if (k == 0 || k > vocabulary.size())
      throw InvalidParameterError("build_report: k outside [1, n]");

  EvalReport report;
  report.k_values = k_values;
  report.sample_count = samples.size();

  std::array<double, kLandmarkCount> error_sum{};
  for (const EvalSample& sample : samples) {
    const auto errors =
        normalized_error(sample.predicted, sample.actual, sample.width,
                         sample.height);
    for (std::size_t s = 0; s < kLandmarkCount; ++s) {
      if (!errors[s].has_value()) continue;
      error_sum[s] += *errors[s];
      ++report.landmark_instances[s];
    }
  }
  double slot_mean_sum = 0.0;
  std::size_t slots_with_instances = 0;
  for (std::size_t s = 0; s < kLandmarkCount; ++s) {
    if (report.landmark_instances[s] == 0) continue;
    const double mean =
        error_sum[s] / static_cast<double>(report.landmark_instances[s]);
    report.landmark_error[s] = mean;
    slot_mean_sum += mean;
    ++slots_with_instances;
  }
  if (slots_with_instances > 0)
    report.average_error = slot_mean_sum / static_cast<double>(slots_with_instances);

  // Category accuracy over samples that carry scores and accepted names.
  struct Bucket {
    std::vector<std::size_t> sample_indices;
  };
  std::map<std::string, Bucket> buckets;  // ordered -> lexicographic table
  std::vector<std::size_t> scored;
  std::vector<std::vector<std::size_t>> accepted_indices(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const EvalSample& sample = samples[i];
    if (!sample.scores.has_value()) continue;
    std::vector<std::string> names = sample.accepted;
    if (names.empty() && !sample.category.empty()) names = {sample.category};
    if (names.empty()) continue;
    if (sample.scores->size() != vocabulary.size())
      throw ShapeError("build_report: distribution size mismatch");
    for (const std::string& name : names)
      accepted_indices[i].push_back(vocabulary_index(vocabulary, name));
    scored.push_back(i);
    buckets[sample.category.empty() ? std::string("(uncategorized)")
                                    : sample.category]
        .sample_indices.push_back(i);
  }
  report.scored_sample_count = scored.size();

  for (std::size_t k : k_values) {
    if (scored.empty()) {
      report.overall_topk.push_back(std::nullopt);
      continue;
    }
    std::size_t correct = 0;
    for (std::size_t i : scored)
      if (in_top_k(*samples[i].scores, accepted_indices[i], k)) ++correct;
    report.overall_topk.push_back(100.0 * static_cast<double>(correct) /
                                  static_cast<double>(scored.size()));
  }
  for (const auto& [name, bucket] : buckets) {
    std::vector<double> per_k;
    for (std::size_t k : k_values) {
      std::size_t correct = 0;
      for (std::size_t i : bucket.sample_indices)
        if (in_top_k(*samples[i].scores, accepted_indices[i], k)) ++correct;
      per_k.push_back(100.0 * static_cast<double>(correct) /
                      static_cast<double>(bucket.sample_indices.size()));
    }
    report.per_category_topk.emplace_back(name, std::move(per_k));
  }
  return report;
}

std::string render_report(const EvalReport& report) {
  std::string out = "Metric";
  for (const auto& name : kLandmarkNames) {
    out += '\t';
    out += name;
  }
  out += "\tAvg.\n";
  out += "NE";
  for (std::size_t s = 0; s < kLandmarkCount; ++s) {
    out += '\t';
    out += report.landmark_error[s].has_value()
               ? fixed_decimal(*report.landmark_error[s], 4)
               : std::string("-");
  }
  out += '\t';
  out += report.average_error.has_value()
             ? fixed_decimal(*report.average_error, 4)
             : std::string("-");
  out += '\n';

  if (!report.k_values.empty()) {
    out += "\nCategory";
    for (std::size_t k : report.k_values)
      out += "\ttop-" + std::to_string(k);
    out += '\n';
    for (const auto& [name, values] : report.per_category_topk) {
      out += name;
      for (double v : values) {
        out += '\t';
        out += fixed_decimal(v, 2);
      }
      out += '\n';
    }
    out += "Overall";
    for (const auto& v : report.overall_topk) {
      out += '\t';
      out += v.has_value() ? fixed_decimal(*v, 2) : std::string("-");
    }
    out += '\n';
  }
  return out;
}

}  // namespace augkit
