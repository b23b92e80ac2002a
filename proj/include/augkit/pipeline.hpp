#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "augkit/dataio.hpp"
#include "augkit/metrics.hpp"
#include "augkit/types.hpp"
#include "augkit/warp.hpp"

namespace augkit {

// Batch configuration.  Every field has a default; a config file may
// override any of them and command-line flags win over the file.
struct PipelineConfig {
  std::uint64_t seed = 0;
  bool crop = true;
  bool rotate = true;
  bool elastic = true;
  ElasticParams elastic_params;          // seeds 3, alpha 500, sigma 40
  double rotation_min = 0.0;
  double rotation_max = 6.283185307179586476925286766559;  // 2 pi
  std::size_t target_size = 224;
  std::size_t inversion_candidates = 0;  // 0 = resolution-scaled default
  double heatmap_sigma = 8.0;
  std::string out_dir = "out";
};

// Flat key=value lines, '#' comments.  Keys: seed, augmentations
// (comma list drawn from crop,rotate,elastic; empty disables all),
// elastic_seeds, elastic_alpha, elastic_sigma, rotation_min,
// rotation_max, target_size, inversion_candidates, heatmap_sigma,
// out_dir.  Unknown keys are rejected with the offending line number.
PipelineConfig parse_config_text(std::string_view text);

// Annotation container formats are sniffed: a leading bare integer
// means the three-file landmark format, otherwise key=value records.
std::vector<AnnotatedSample> load_samples_any(const std::string& path);

struct AugmentOptions {
  std::string annotations_path;
  std::string bbox_path;      // optional three-file companion
  std::string category_path;  // optional three-file companion
  std::string images_dir;     // base for image paths; default: annotation dir
  std::size_t jobs = 1;
};

struct AugmentRecord {
  std::string path;
  std::uint64_t stream_id = 0;
  bool ok = false;
  std::string message;
  bool cropped = false;
  std::optional<double> theta;
  std::string output_path;  // relative to out_dir
};

struct AugmentSummary {
  std::vector<AugmentRecord> records;
  std::size_t processed = 0;
  std::size_t failed = 0;
};

// Runs crop -> rotate -> elastic per image with a per-image stream
// derived from the master seed by input index, then writes warped
// images, refreshed annotation files and a JSON-lines manifest under
// config.out_dir.  Outputs are byte-identical for a fixed seed
// regardless of worker count.  Per-image failures are recorded in the
// manifest and do not abort the batch.
AugmentSummary run_augment(const PipelineConfig& config,
                           const AugmentOptions& options);

struct EvalOptions {
  std::string predictions_path;
  std::string ground_truth_path;
  std::string pred_category_path;   // optional companion for counted tables
  std::string truth_category_path;  // optional companion for counted tables
  std::string scores_path;  // optional per-category score table
  std::string mask_path;    // optional allowed-name list, one per line
  bool use_wardrobe_map = false;  // ground-truth labels name mapped sets
  std::vector<std::size_t> k_values = {1, 3, 5};
  std::size_t width = 224;   // canvas for error normalization
  std::size_t height = 224;
};

struct EvalOutcome {
  EvalReport report;
  std::string rendered;
  std::size_t matched = 0;
  std::vector<std::string> missing_predictions;
};

EvalOutcome run_eval(const EvalOptions& options);

struct OracleOptions {
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  std::size_t size = 64;
  ElasticParams params{3, 100.0, 10.0, 3.0};
  std::size_t candidates = 0;  // 0 = scaled default
};

struct OracleOutcome {
  std::size_t trials = 0;
  std::size_t within_2px = 0;
  std::size_t exact = 0;
  std::size_t out_of_frame = 0;
  double mean_distance = 0.0;
  double max_distance = 0.0;
  bool pass = false;  // >= 99% of trials within 2 px
  std::string rendered;
};

// Randomized audit of the search-based landmark relocation against the
// exhaustive reference.
OracleOutcome run_oracle(const OracleOptions& options);

struct OverlayOptions {
  std::string image_path;
  std::string annotations_path;  // optional; no match means no marks
  std::string sample;            // record key; default: image file name
  std::string out_path;
  std::string heatmaps_path;     // optional tensor file, dims {8, h, w}
  bool render_heatmaps = false;  // synthesize from the landmarks instead
  double heatmap_sigma = 8.0;
};

// Draws 5 px cross arms on each in-frame landmark (blue on RGB, white
// on grayscale) and optionally alpha-blends heatmap responses in red;
// images with heatmap shading are promoted to RGB.
void run_overlay(const OverlayOptions& options);

}  // namespace augkit
