#include "augkit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "augkit/error.hpp"
#include "augkit/heatmap.hpp"
#include "augkit/lmmap.hpp"
#include "augkit/orient.hpp"
#include "augkit/png_io.hpp"
#include "augkit/rng.hpp"

namespace augkit {
namespace {

namespace fs = std::filesystem;

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

std::uint64_t parse_u64(const std::string& value, std::size_t line,
                        const std::string& key) {
  std::uint64_t out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line, key + ": expected an unsigned integer, got '" + value + "'");
  }
  return out;
}

double parse_f64(const std::string& value, std::size_t line, const std::string& key) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line, key + ": expected a number, got '" + value + "'");
  }
  return out;
}

void apply_augmentations_value(PipelineConfig& config, const std::string& value,
                               std::size_t line) {
  config.crop = false;
  config.rotate = false;
  config.elastic = false;
  std::string token;
  std::stringstream stream(value);
  while (std::getline(stream, token, ',')) {
    const std::string name = trim(token);
    if (name.empty()) continue;
    if (name == "crop") {
      config.crop = true;
    } else if (name == "rotate") {
      config.rotate = true;
    } else if (name == "elastic") {
      config.elastic = true;
    } else {
      throw ParseError(line, "unknown augmentation '" + name + "'");
    }
  }
}

}  // namespace

PipelineConfig parse_config_text(std::string_view text) {
  PipelineConfig config;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t end = std::min(text.find('\n', begin), text.size());
    ++line_no;
    std::string line = trim(text.substr(begin, end - begin));
    begin = end + 1;
    if (line.empty() || line[0] == '#') {
      if (end == text.size()) break;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected key=value, got '" + line + "'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "seed") {
      config.seed = parse_u64(value, line_no, key);
    } else if (key == "augmentations") {
      apply_augmentations_value(config, value, line_no);
    } else if (key == "elastic_seeds") {
      config.elastic_params.n_seeds = parse_u64(value, line_no, key);
    } else if (key == "elastic_alpha") {
      config.elastic_params.alpha = parse_f64(value, line_no, key);
    } else if (key == "elastic_sigma") {
      config.elastic_params.sigma = parse_f64(value, line_no, key);
    } else if (key == "rotation_min") {
      config.rotation_min = parse_f64(value, line_no, key);
    } else if (key == "rotation_max") {
      config.rotation_max = parse_f64(value, line_no, key);
    } else if (key == "target_size") {
      config.target_size = parse_u64(value, line_no, key);
      if (config.target_size == 0) throw ParseError(line_no, "target_size must be positive");
    } else if (key == "inversion_candidates") {
      config.inversion_candidates = parse_u64(value, line_no, key);
    } else if (key == "heatmap_sigma") {
      config.heatmap_sigma = parse_f64(value, line_no, key);
      if (!(config.heatmap_sigma > 0.0)) {
        throw ParseError(line_no, "heatmap_sigma must be positive");
      }
    } else if (key == "out_dir") {
      if (value.empty()) throw ParseError(line_no, "out_dir must not be empty");
      config.out_dir = value;
    } else {
      throw ParseError(line_no, "unknown config key '" + key + "'");
    }
    if (end == text.size()) break;
  }
  return config;
}

std::vector<AnnotatedSample> load_samples_any(const std::string& path) {
  const std::string text = read_text_file(path);
  std::size_t begin = 0;
  while (begin < text.size() &&
         std::isspace(static_cast<unsigned char>(text[begin]))) {
    ++begin;
  }
  std::size_t end = begin;
  while (end < text.size() &&
         !std::isspace(static_cast<unsigned char>(text[end]))) {
    ++end;
  }
  const std::string_view head = std::string_view(text).substr(begin, end - begin);
  const bool numeric_head =
      !head.empty() && std::all_of(head.begin(), head.end(), [](char c) {
        return c >= '0' && c <= '9';
      });
  if (numeric_head) return parse_landmark_file(text);
  return parse_record_lines(text);
}

namespace {

struct WorkItem {
  AnnotatedSample sample;
  Image image{1, 1, 1};
  bool loaded = false;
};

AugmentRecord process_sample(const PipelineConfig& config,
                             const AugmentOptions& options,
                             const AnnotatedSample& input, std::size_t index,
                             const RngStream& master,
                             AnnotatedSample& output) {
  AugmentRecord record;
  record.path = input.image_path;
  RngStream stream = derive_stream(master, index);
  record.stream_id = stream.stream_id();
  try {
    const fs::path source = fs::path(options.images_dir) / input.image_path;
    Image image = load_png(source.string());
    AnnotatedSample sample = input;

    if (config.crop && sample.bbox.has_value()) {
      CropResult cropped =
          crop_resize(image, sample.landmarks, *sample.bbox, config.target_size);
      image = std::move(cropped.image);
      sample.landmarks = cropped.landmarks;
      sample.bbox.reset();  // consumed: the new canvas is the box
      record.cropped = true;
    }

    if (config.rotate) {
      const double theta = stream.uniform(config.rotation_min, config.rotation_max);
      record.theta = theta;
      const double cx = (static_cast<double>(image.width()) - 1.0) / 2.0;
      const double cy = (static_cast<double>(image.height()) - 1.0) / 2.0;
      sample.landmarks = rotate_landmarks(sample.landmarks, theta, cx, cy,
                                          image.width(), image.height());
      image = rotate_image(image, theta);
    }

    if (config.elastic) {
      ElasticWarpResult warped =
          elastic_warp(image, sample.landmarks, config.elastic_params, stream,
                       config.inversion_candidates);
      image = std::move(warped.image);
      sample.landmarks = warped.landmarks;
    }

    const fs::path out_rel = fs::path("images") / input.image_path;
    const fs::path out_abs = fs::path(config.out_dir) / out_rel;
    save_png(out_abs.string(), image);
    record.output_path = out_rel.generic_string();
    record.ok = true;
    output = sample;
  } catch (const std::exception& error) {
    record.ok = false;
    record.message = error.what();
  }
  return record;
}

}  // namespace

AugmentSummary run_augment(const PipelineConfig& config,
                           const AugmentOptions& options) {
  std::vector<AnnotatedSample> samples = load_samples_any(options.annotations_path);
  {
    std::vector<std::pair<std::string, BoundingBox>> bboxes;
    std::vector<std::pair<std::string, std::string>> categories;
    if (!options.bbox_path.empty()) {
      bboxes = parse_bbox_file(read_text_file(options.bbox_path));
    }
    if (!options.category_path.empty()) {
      categories = parse_category_file(read_text_file(options.category_path));
    }
    if (!bboxes.empty() || !categories.empty()) {
      merge_annotations(samples, bboxes, categories);
    }
  }

  AugmentOptions resolved = options;
  if (resolved.images_dir.empty()) {
    resolved.images_dir = fs::path(options.annotations_path).parent_path().string();
    if (resolved.images_dir.empty()) resolved.images_dir = ".";
  }

  // Create every output directory up front so workers never race on
  // directory creation.
  fs::create_directories(fs::path(config.out_dir) / "images");
  for (const AnnotatedSample& sample : samples) {
    const fs::path parent =
        (fs::path(config.out_dir) / "images" / sample.image_path).parent_path();
    fs::create_directories(parent);
  }

  const RngStream master(config.seed);
  std::vector<AugmentRecord> records(samples.size());
  std::vector<AnnotatedSample> outputs(samples.size());

  const std::size_t jobs = std::max<std::size_t>(1, resolved.jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= samples.size()) return;
      records[i] = process_sample(config, resolved, samples[i], i, master, outputs[i]);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& thread : pool) thread.join();
  }

  AugmentSummary summary;
  summary.records = std::move(records);
  std::vector<AnnotatedSample> kept;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (summary.records[i].ok) {
      ++summary.processed;
      kept.push_back(outputs[i]);
    } else {
      ++summary.failed;
    }
  }

  write_text_file((fs::path(config.out_dir) / "list_landmarks.txt").string(),
                  serialize_landmark_file(kept));
  std::vector<std::pair<std::string, std::string>> category_rows;
  for (const AnnotatedSample& sample : kept) {
    if (!sample.category.empty()) {
      category_rows.emplace_back(sample.image_path, sample.category);
    }
  }
  if (!category_rows.empty()) {
    write_text_file((fs::path(config.out_dir) / "list_category.txt").string(),
                    serialize_category_file(category_rows));
  }

  std::string manifest;
  for (const AugmentRecord& record : summary.records) {
    nlohmann::ordered_json row;
    row["path"] = record.path;
    row["stream_id"] = record.stream_id;
    row["status"] = record.ok ? "ok" : "error";
    if (!record.ok) row["message"] = record.message;
    row["crop"] = record.cropped;
    if (record.theta.has_value()) row["theta"] = *record.theta;
    if (config.elastic) {
      nlohmann::ordered_json elastic;
      elastic["seeds"] = config.elastic_params.n_seeds;
      elastic["alpha"] = config.elastic_params.alpha;
      elastic["sigma"] = config.elastic_params.sigma;
      elastic["candidates"] = config.inversion_candidates;
      row["elastic"] = elastic;
    }
    if (record.ok) row["output"] = record.output_path;
    manifest += row.dump();
    manifest += '\n';
  }
  write_text_file((fs::path(config.out_dir) / "manifest.jsonl").string(), manifest);
  return summary;
}

namespace {

// Score tables are count + header files: the header names the
// vocabulary columns, each row is an image path followed by one score
// per column.
std::unordered_map<std::string, CategoryDistribution> parse_scores_file(
    const std::string& text, std::vector<std::string>& vocabulary) {
  std::vector<std::string> lines;
  {
    std::size_t begin = 0;
    while (begin <= text.size()) {
      const std::size_t end = std::min(text.find('\n', begin), text.size());
      lines.push_back(std::string(text.substr(begin, end - begin)));
      if (end == text.size()) break;
      begin = end + 1;
    }
  }
  if (lines.size() < 2) throw ParseError(1, "score table needs a count and a header");
  const std::string count_text = trim(lines[0]);
  std::size_t count = 0;
  {
    const char* first = count_text.data();
    const char* last = count_text.data() + count_text.size();
    auto [ptr, ec] = std::from_chars(first, last, count);
    if (ec != std::errc() || ptr != last) {
      throw ParseError(1, "expected a record count, got '" + count_text + "'");
    }
  }
  vocabulary.clear();
  {
    std::stringstream header(lines[1]);
    std::string token;
    bool first = true;
    while (header >> token) {
      if (first) {
        first = false;  // leading column label for the path
        continue;
      }
      vocabulary.push_back(token);
    }
  }
  if (vocabulary.empty()) throw ParseError(2, "score table header names no categories");

  std::unordered_map<std::string, CategoryDistribution> scores;
  std::size_t seen = 0;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const std::string row = trim(lines[i]);
    if (row.empty()) continue;
    ++seen;
    if (seen > count) throw ParseError(i + 1, "more rows than the declared count");
    std::stringstream columns(row);
    std::string path;
    columns >> path;
    std::vector<double> values;
    double value = 0.0;
    while (columns >> value) values.push_back(value);
    if (values.size() != vocabulary.size()) {
      throw ParseError(i + 1, "expected " + std::to_string(vocabulary.size()) +
                                  " scores, got " + std::to_string(values.size()));
    }
    if (!scores.emplace(path, CategoryDistribution(std::move(values))).second) {
      throw ParseError(i + 1, "duplicate path '" + path + "'");
    }
  }
  if (seen != count) {
    throw ParseError(lines.size(), "declared " + std::to_string(count) +
                                       " rows, found " + std::to_string(seen));
  }
  return scores;
}

std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> names;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t end = std::min(text.find('\n', begin), text.size());
    const std::string line = trim(text.substr(begin, end - begin));
    if (!line.empty() && line[0] != '#') names.push_back(line);
    if (end == text.size()) break;
    begin = end + 1;
  }
  return names;
}

}  // namespace

EvalOutcome run_eval(const EvalOptions& options) {
  if (options.width == 0 || options.height == 0) {
    throw InvalidParameterError("eval: canvas extents must be positive");
  }
  std::vector<AnnotatedSample> predictions =
      load_samples_any(options.predictions_path);
  std::vector<AnnotatedSample> truths =
      load_samples_any(options.ground_truth_path);
  if (!options.pred_category_path.empty()) {
    merge_annotations(predictions, {},
                      parse_category_file(read_text_file(options.pred_category_path)));
  }
  if (!options.truth_category_path.empty()) {
    merge_annotations(truths, {},
                      parse_category_file(read_text_file(options.truth_category_path)));
  }

  std::unordered_map<std::string, const AnnotatedSample*> by_path;
  for (const AnnotatedSample& prediction : predictions) {
    by_path[prediction.image_path] = &prediction;
  }

  std::vector<std::string> vocabulary = deepfashion_categories();
  std::unordered_map<std::string, CategoryDistribution> scores;
  if (!options.scores_path.empty()) {
    scores = parse_scores_file(read_text_file(options.scores_path), vocabulary);
  }
  std::vector<std::string> mask_names;
  if (!options.mask_path.empty()) {
    mask_names = parse_name_list(read_text_file(options.mask_path));
  }
  const CategoryMap& wardrobe = ctu_deepfashion_map();

  EvalOutcome outcome;
  std::vector<EvalSample> rows;
  for (const AnnotatedSample& truth : truths) {
    const auto found = by_path.find(truth.image_path);
    if (found == by_path.end()) {
      outcome.missing_predictions.push_back(truth.image_path);
      continue;
    }
    const AnnotatedSample& prediction = *found->second;
    EvalSample row;
    row.category = truth.category;
    row.actual = truth.landmarks;
    row.predicted = prediction.landmarks;
    row.width = options.width;
    row.height = options.height;

    if (!truth.category.empty()) {
      if (options.use_wardrobe_map) {
        row.accepted = map_category(wardrobe, truth.category);
      } else {
        row.accepted = {truth.category};
      }
      const auto scored = scores.find(truth.image_path);
      if (scored != scores.end()) {
        row.scores = scored->second;
      } else if (!prediction.category.empty()) {
        // One-hot stand-in built from the predicted label.
        std::vector<double> hot(vocabulary.size(), 0.0);
        hot[vocabulary_index(vocabulary, prediction.category)] = 1.0;
        row.scores = CategoryDistribution(std::move(hot));
      }
      if (row.scores.has_value() && !mask_names.empty()) {
        row.scores = mask_categories(*row.scores, vocabulary, mask_names);
      }
    }
    rows.push_back(std::move(row));
    ++outcome.matched;
  }
  if (rows.empty()) throw Error("eval: no ground-truth sample has a prediction");

  outcome.report = build_report(rows, options.k_values, vocabulary);
  outcome.rendered = render_report(outcome.report);
  return outcome;
}

OracleOutcome run_oracle(const OracleOptions& options) {
  if (options.size < 2) throw InvalidParameterError("oracle: size must be at least 2");
  OracleOutcome outcome;
  outcome.trials = options.trials;
  const RngStream master(options.seed);
  std::size_t candidates = options.candidates;
  if (candidates == 0) {
    candidates = audit_candidate_count(options.size, options.size, options.params);
  }
  double sum = 0.0;
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    RngStream stream = derive_stream(master, trial);
    const DisplacementFieldPair fields =
        make_displacement_fields(options.size, options.size, options.params, stream);
    const double x = static_cast<double>(stream.next_below(options.size));
    const double y = static_cast<double>(stream.next_below(options.size));
    const Landmark truth{x, y, Visibility::kVisible};
    const Landmark fast = invert_landmark(fields, truth, candidates);
    const Landmark exact = oracle_invert(fields, truth);
    const double dx = fast.x - exact.x;
    const double dy = fast.y - exact.y;
    const double distance = std::sqrt(dx * dx + dy * dy);
    sum += distance;
    if (distance <= 2.0) ++outcome.within_2px;
    if (distance == 0.0) ++outcome.exact;
    if (fast.visibility == Visibility::kOutOfFrame) ++outcome.out_of_frame;
    outcome.max_distance = std::max(outcome.max_distance, distance);
  }
  outcome.mean_distance =
      options.trials == 0 ? 0.0 : sum / static_cast<double>(options.trials);
  outcome.pass = outcome.trials > 0 &&
                 static_cast<double>(outcome.within_2px) >=
                     0.99 * static_cast<double>(outcome.trials);

  std::ostringstream text;
  text << "trials\t" << outcome.trials << "\n"
       << "candidates\t" << candidates << "\n"
       << "within_2px\t" << outcome.within_2px << "\n"
       << "exact\t" << outcome.exact << "\n"
       << "out_of_frame\t" << outcome.out_of_frame << "\n"
       << "mean_distance\t" << format_double(outcome.mean_distance) << "\n"
       << "max_distance\t" << format_double(outcome.max_distance) << "\n"
       << "verdict\t" << (outcome.pass ? "PASS" : "FAIL") << "\n";
  outcome.rendered = text.str();
  return outcome;
}

namespace {

void draw_cross(Image& image, double x, double y) {
  const long cx = std::lround(x);
  const long cy = std::lround(y);
  const long w = static_cast<long>(image.width());
  const long h = static_cast<long>(image.height());
  auto paint = [&](long px, long py) {
    if (px < 0 || px >= w || py < 0 || py >= h) return;
    const std::size_t row = static_cast<std::size_t>(py);
    const std::size_t col = static_cast<std::size_t>(px);
    if (image.channels() == 1) {
      image.at(row, col, 0) = 1.0;
    } else {
      image.at(row, col, 0) = 0.0;
      image.at(row, col, 1) = 0.0;
      image.at(row, col, 2) = 1.0;
    }
  };
  for (long d = -5; d <= 5; ++d) {
    paint(cx + d, cy);
    paint(cx, cy + d);
  }
}

Image promote_to_rgb(const Image& gray) {
  if (gray.channels() == 3) return gray;
  Image rgb(gray.width(), gray.height(), 3);
  for (std::size_t row = 0; row < gray.height(); ++row) {
    for (std::size_t col = 0; col < gray.width(); ++col) {
      const double v = gray.at(row, col, 0);
      rgb.at(row, col, 0) = v;
      rgb.at(row, col, 1) = v;
      rgb.at(row, col, 2) = v;
    }
  }
  return rgb;
}

}  // namespace

void run_overlay(const OverlayOptions& options) {
  Image image = load_png(options.image_path);

  LandmarkSet landmarks;
  if (!options.annotations_path.empty()) {
    const std::vector<AnnotatedSample> samples =
        load_samples_any(options.annotations_path);
    std::string key = options.sample;
    if (key.empty()) key = fs::path(options.image_path).filename().string();
    for (const AnnotatedSample& sample : samples) {
      if (sample.image_path == key ||
          fs::path(sample.image_path).filename().string() == key) {
        landmarks = sample.landmarks;
        break;
      }
    }
  }

  std::optional<HeatmapStack> heat;
  if (!options.heatmaps_path.empty()) {
    const TensorData tensor = read_tensor(options.heatmaps_path);
    if (tensor.dims.size() != 3 || tensor.dims[0] != kLandmarkCount ||
        tensor.dims[1] != image.height() || tensor.dims[2] != image.width()) {
      throw ShapeError("overlay: heatmap tensor must have shape {8, height, width}");
    }
    HeatmapStack stack(image.height(), image.width());
    std::copy(tensor.values.begin(), tensor.values.end(), stack.values.begin());
    heat = std::move(stack);
  } else if (options.render_heatmaps) {
    heat = encode_heatmaps(landmarks, image.width(), image.height(),
                           options.heatmap_sigma);
  }

  if (heat.has_value()) {
    image = promote_to_rgb(image);
    for (std::size_t row = 0; row < image.height(); ++row) {
      for (std::size_t col = 0; col < image.width(); ++col) {
        double peak = 0.0;
        for (std::size_t k = 0; k < kLandmarkCount; ++k) {
          peak = std::max(peak, heat->at(k, row, col));
        }
        const double alpha = std::clamp(0.5 * peak, 0.0, 1.0);
        image.at(row, col, 0) = (1.0 - alpha) * image.at(row, col, 0) + alpha;
        image.at(row, col, 1) = (1.0 - alpha) * image.at(row, col, 1);
        image.at(row, col, 2) = (1.0 - alpha) * image.at(row, col, 2);
      }
    }
  }

  for (std::size_t k = 0; k < kLandmarkCount; ++k) {
    const auto& slot = landmarks.slots[k];
    if (!slot.has_value()) continue;
    if (slot->visibility == Visibility::kOutOfFrame) continue;
    draw_cross(image, slot->x, slot->y);
  }

  const fs::path parent = fs::path(options.out_path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  save_png(options.out_path, image);
}

}  // namespace augkit
