// Command-line front end: augment / eval / oracle / overlay.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "augkit/dataio.hpp"
#include "augkit/error.hpp"
#include "augkit/pipeline.hpp"

namespace {

// Flag > config file > environment > built-in default.
augkit::PipelineConfig resolve_config(const std::string& config_path,
                                      const std::optional<std::uint64_t>& seed_flag,
                                      const std::string& out_flag) {
  augkit::PipelineConfig config;
  if (!config_path.empty()) {
    config = augkit::parse_config_text(augkit::read_text_file(config_path));
  }
  if (const char* env = std::getenv("GARMENT_AUGKIT_SEED");
      env != nullptr && config_path.empty()) {
    // The environment only fills in when no config file provided a seed;
    // a config file and a flag both outrank it.
    config.seed = augkit::parse_config_text(std::string("seed=") + env).seed;
  }
  if (seed_flag.has_value()) config.seed = *seed_flag;
  if (!out_flag.empty()) config.out_dir = out_flag;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Garment image augmentation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_flag;
  std::string out_flag;

  // ---- augment ----
  auto* augment = app.add_subcommand(
      "augment", "Crop, rotate and elastically deform an annotated image set");
  augkit::AugmentOptions augment_options;
  augment->add_option("annotations", augment_options.annotations_path,
                      "Landmark annotation file (counted table or key=value records)")
      ->required();
  augment->add_option("--bboxes", augment_options.bbox_path,
                      "Bounding-box companion file");
  augment->add_option("--categories", augment_options.category_path,
                      "Category companion file");
  augment->add_option("--images", augment_options.images_dir,
                      "Base directory for image paths (default: annotation directory)");
  augment->add_option("--jobs", augment_options.jobs, "Worker thread count")
      ->default_val(1);
  augment->add_option("--config", config_path, "Config file (key=value lines)");
  augment->add_option("--seed", seed_flag, "Master seed (overrides config)");
  augment->add_option("--out", out_flag, "Output directory (overrides config)");

  // ---- eval ----
  auto* eval = app.add_subcommand(
      "eval", "Score predicted landmarks and categories against ground truth");
  augkit::EvalOptions eval_options;
  eval->add_option("predictions", eval_options.predictions_path,
                   "Predicted annotation file")
      ->required();
  eval->add_option("truth", eval_options.ground_truth_path,
                   "Ground-truth annotation file")
      ->required();
  eval->add_option("--pred-categories", eval_options.pred_category_path,
                   "Category companion file for the predictions");
  eval->add_option("--truth-categories", eval_options.truth_category_path,
                   "Category companion file for the ground truth");
  eval->add_option("--scores", eval_options.scores_path,
                   "Per-category score table (count + header + rows)");
  eval->add_option("--mask", eval_options.mask_path,
                   "Restrict scoring to the category names listed in this file");
  eval->add_flag("--wardrobe-map", eval_options.use_wardrobe_map,
                 "Interpret ground-truth labels through the bundled wardrobe mapping");
  eval->add_option("--k", eval_options.k_values, "Top-k cutoffs (default 1 3 5)");
  eval->add_option("--width", eval_options.width,
                   "Canvas width for error normalization")
      ->default_val(224);
  eval->add_option("--height", eval_options.height,
                   "Canvas height for error normalization")
      ->default_val(224);

  // ---- oracle ----
  auto* oracle = app.add_subcommand(
      "oracle", "Audit landmark relocation against the exhaustive reference");
  augkit::OracleOptions oracle_options;
  oracle->add_option("--trials", oracle_options.trials, "Trial count")
      ->default_val(100);
  oracle->add_option("--size", oracle_options.size, "Square canvas size")
      ->default_val(64);
  oracle->add_option("--seeds", oracle_options.params.n_seeds,
                     "Displacement seed count")
      ->default_val(3);
  oracle->add_option("--alpha", oracle_options.params.alpha,
                     "Displacement amplitude")
      ->default_val(100.0);
  oracle->add_option("--sigma", oracle_options.params.sigma,
                     "Smoothing bandwidth")
      ->default_val(10.0);
  oracle->add_option("--candidates", oracle_options.candidates,
                     "Per-axis candidate count (0 = scaled default)")
      ->default_val(0);
  oracle->add_option("--seed", oracle_options.seed, "Master seed")->default_val(0);

  // ---- overlay ----
  auto* overlay = app.add_subcommand(
      "overlay", "Render landmark crosses (and optional heatmaps) onto an image");
  augkit::OverlayOptions overlay_options;
  overlay->add_option("image", overlay_options.image_path, "Input PNG")->required();
  overlay->add_option("--annotations", overlay_options.annotations_path,
                      "Annotation file to look the image up in");
  overlay->add_option("--sample", overlay_options.sample,
                      "Record key (default: the image file name)");
  overlay->add_option("--out", overlay_options.out_path, "Output PNG")->required();
  overlay->add_option("--heatmaps", overlay_options.heatmaps_path,
                      "Response tensor file with dims {8, height, width}");
  overlay->add_flag("--render-heatmaps", overlay_options.render_heatmaps,
                    "Synthesize response planes from the landmarks");
  overlay->add_option("--sigma", overlay_options.heatmap_sigma,
                      "Bandwidth for synthesized planes")
      ->default_val(8.0);

  CLI11_PARSE(app, argc, argv);

  try {
    if (augment->parsed()) {
      const augkit::PipelineConfig config =
          resolve_config(config_path, seed_flag, out_flag);
      const augkit::AugmentSummary summary = run_augment(config, augment_options);
      std::cout << "processed\t" << summary.processed << "\n"
                << "failed\t" << summary.failed << "\n"
                << "out_dir\t" << config.out_dir << "\n";
      for (const augkit::AugmentRecord& record : summary.records) {
        if (!record.ok) {
          std::cerr << "error: " << record.path << ": " << record.message << "\n";
        }
      }
      return 0;
    }
    if (eval->parsed()) {
      const augkit::EvalOutcome outcome = run_eval(eval_options);
      std::cout << outcome.rendered;
      for (const std::string& path : outcome.missing_predictions) {
        std::cerr << "warning: no prediction for " << path << "\n";
      }
      return 0;
    }
    if (oracle->parsed()) {
      const augkit::OracleOutcome outcome = run_oracle(oracle_options);
      std::cout << outcome.rendered;
      return outcome.pass ? 0 : 1;
    }
    if (overlay->parsed()) {
      run_overlay(overlay_options);
      return 0;
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
