#include "augkit/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "augkit/error.hpp"
#include "augkit/warp.hpp"

namespace augkit {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

double parse_double_token(std::string_view token, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.begin(), token.end(), v);
  if (ec != std::errc() || ptr != token.end())
    throw ParseError(line, "expected a number, got '" + std::string(token) + "'");
  if (!std::isfinite(v)) throw ParseError(line, "non-finite number");
  return v;
}

std::int64_t parse_int_token(std::string_view token, std::size_t line) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(token.begin(), token.end(), v);
  if (ec != std::errc() || ptr != token.end())
    throw ParseError(line,
                     "expected an integer, got '" + std::string(token) + "'");
  return v;
}

std::size_t parse_count_line(const std::vector<std::string_view>& lines) {
  if (lines.empty()) throw ParseError(1, "missing record count");
  const auto tokens = split_tokens(lines[0]);
  if (tokens.size() != 1) throw ParseError(1, "malformed record count");
  const std::int64_t n = parse_int_token(tokens[0], 1);
  if (n < 0) throw ParseError(1, "negative record count");
  return static_cast<std::size_t>(n);
}

void check_preamble(const std::vector<std::string_view>& lines,
                    std::size_t count) {
  if (lines.size() < 2) throw ParseError(2, "missing column header line");
  if (lines.size() < 2 + count)
    throw ParseError(lines.size() + 1, "fewer records than the declared count");
  for (std::size_t i = 2 + count; i < lines.size(); ++i) {
    if (!split_tokens(lines[i]).empty())
      throw ParseError(i + 1, "more records than the declared count");
  }
}

Visibility visibility_from_code(std::int64_t code, std::size_t line) {
  switch (code) {
    case 0: return Visibility::kVisible;
    case 1: return Visibility::kOccluded;
    case 2: return Visibility::kOutOfFrame;
    default: break;
  }
  throw ParseError(line, "visibility code must be 0, 1 or 2");
}

ClothesType clothes_type_from_code(std::int64_t code, std::size_t line) {
  switch (code) {
    case 1: return ClothesType::kUpper;
    case 2: return ClothesType::kLower;
    case 3: return ClothesType::kFull;
    default: break;
  }
  throw ParseError(line, "clothes type code must be 1, 2 or 3");
}

}  // namespace

std::vector<AnnotatedSample> parse_landmark_file(std::string_view text) {
  const auto lines = split_lines(text);
  const std::size_t count = parse_count_line(lines);
  check_preamble(lines, count);

  std::vector<AnnotatedSample> samples;
  samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t line_no = i + 3;
    const auto tokens = split_tokens(lines[i + 2]);
    if (tokens.size() < 2) throw ParseError(line_no, "malformed record");

    AnnotatedSample sample;
    sample.image_path = std::string(tokens[0]);
    sample.clothes_type =
        clothes_type_from_code(parse_int_token(tokens[1], line_no), line_no);
    const auto slots = slots_for(sample.clothes_type);
    if (tokens.size() != 2 + 3 * slots.size())
      throw ParseError(line_no, "expected " +
                                    std::to_string(3 * slots.size()) +
                                    " landmark values");
    for (std::size_t s = 0; s < slots.size(); ++s) {
      Landmark lm;
      lm.visibility = visibility_from_code(
          parse_int_token(tokens[2 + 3 * s], line_no), line_no);
      // 1-indexed on disk.
      lm.x = parse_double_token(tokens[3 + 3 * s], line_no) - 1.0;
      lm.y = parse_double_token(tokens[4 + 3 * s], line_no) - 1.0;
      sample.landmarks.at(slots[s]) = lm;
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

std::string serialize_landmark_file(const std::vector<AnnotatedSample>& samples) {
  std::string out = std::to_string(samples.size()) + "\n";
  out += "image_name clothes_type landmarks(visibility x y)\n";
  for (const AnnotatedSample& sample : samples) {
    out += sample.image_path;
    out += ' ';
    out += std::to_string(static_cast<int>(sample.clothes_type));
    for (LandmarkSlot slot : slots_for(sample.clothes_type)) {
      const auto& lm = sample.landmarks.at(slot);
      if (!lm.has_value())
        throw InvalidParameterError(
            "serialize_landmark_file: sample '" + sample.image_path +
            "' is missing a slot its clothes type defines");
      out += ' ';
      out += std::to_string(static_cast<int>(lm->visibility));
      out += ' ';
      out += format_double(lm->x + 1.0);
      out += ' ';
      out += format_double(lm->y + 1.0);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::pair<std::string, BoundingBox>> parse_bbox_file(
    std::string_view text) {
  const auto lines = split_lines(text);
  const std::size_t count = parse_count_line(lines);
  check_preamble(lines, count);

  std::vector<std::pair<std::string, BoundingBox>> rows;
  rows.reserve(count);
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t line_no = i + 3;
    const auto tokens = split_tokens(lines[i + 2]);
    if (tokens.size() != 5)
      throw ParseError(line_no, "expected: path x1 y1 x2 y2");
    std::string path(tokens[0]);
    if (!seen.insert(path).second)
      throw ParseError(line_no, "duplicate path '" + path + "'");
    BoundingBox box;
    box.x1 = parse_int_token(tokens[1], line_no);
    box.y1 = parse_int_token(tokens[2], line_no);
    box.x2 = parse_int_token(tokens[3], line_no);
    box.y2 = parse_int_token(tokens[4], line_no);
    rows.emplace_back(std::move(path), box);
  }
  return rows;
}

std::string serialize_bbox_file(
    const std::vector<std::pair<std::string, BoundingBox>>& rows) {
  std::string out = std::to_string(rows.size()) + "\n";
  out += "image_name x1 y1 x2 y2\n";
  for (const auto& [path, box] : rows) {
    out += path;
    out += ' ' + std::to_string(box.x1) + ' ' + std::to_string(box.y1) + ' ' +
           std::to_string(box.x2) + ' ' + std::to_string(box.y2) + '\n';
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_category_file(
    std::string_view text) {
  const auto lines = split_lines(text);
  const std::size_t count = parse_count_line(lines);
  check_preamble(lines, count);

  std::vector<std::pair<std::string, std::string>> rows;
  rows.reserve(count);
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t line_no = i + 3;
    const auto tokens = split_tokens(lines[i + 2]);
    if (tokens.size() != 2) throw ParseError(line_no, "expected: path category");
    std::string path(tokens[0]);
    if (!seen.insert(path).second)
      throw ParseError(line_no, "duplicate path '" + path + "'");
    rows.emplace_back(std::move(path), std::string(tokens[1]));
  }
  return rows;
}

std::string serialize_category_file(
    const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string out = std::to_string(rows.size()) + "\n";
  out += "image_name category\n";
  for (const auto& [path, name] : rows) out += path + ' ' + name + '\n';
  return out;
}

MergeReport merge_annotations(
    std::vector<AnnotatedSample>& samples,
    const std::vector<std::pair<std::string, BoundingBox>>& bboxes,
    const std::vector<std::pair<std::string, std::string>>& categories) {
  std::unordered_map<std::string_view, const BoundingBox*> bbox_by_path;
  for (const auto& [path, box] : bboxes) bbox_by_path.emplace(path, &box);
  std::unordered_map<std::string_view, const std::string*> category_by_path;
  for (const auto& [path, name] : categories)
    category_by_path.emplace(path, &name);

  MergeReport report;
  std::unordered_set<std::string_view> used_bbox;
  std::unordered_set<std::string_view> used_category;
  for (AnnotatedSample& sample : samples) {
    if (const auto it = bbox_by_path.find(sample.image_path);
        it != bbox_by_path.end()) {
      sample.bbox = *it->second;
      used_bbox.insert(it->first);
    } else {
      report.samples_missing_bbox.push_back(sample.image_path);
    }
    if (const auto it = category_by_path.find(sample.image_path);
        it != category_by_path.end()) {
      sample.category = *it->second;
      used_category.insert(it->first);
    } else {
      report.samples_missing_category.push_back(sample.image_path);
    }
  }
  for (const auto& [path, box] : bboxes)
    if (!used_bbox.contains(path)) report.unmatched_bbox_paths.push_back(path);
  for (const auto& [path, name] : categories)
    if (!used_category.contains(path))
      report.unmatched_category_paths.push_back(path);
  return report;
}

namespace {

std::string_view visibility_word(Visibility v) {
  switch (v) {
    case Visibility::kVisible: return "visible";
    case Visibility::kOccluded: return "occluded";
    case Visibility::kOutOfFrame: return "out";
  }
  return "visible";
}

Visibility visibility_from_word(std::string_view word, std::size_t line) {
  if (word == "visible") return Visibility::kVisible;
  if (word == "occluded") return Visibility::kOccluded;
  if (word == "out") return Visibility::kOutOfFrame;
  throw ParseError(line, "visibility must be visible|occluded|out");
}

std::string_view clothes_type_word(ClothesType t) {
  switch (t) {
    case ClothesType::kUpper: return "upper";
    case ClothesType::kLower: return "lower";
    case ClothesType::kFull: return "full";
  }
  return "full";
}

ClothesType clothes_type_from_word(std::string_view word, std::size_t line) {
  if (word == "upper") return ClothesType::kUpper;
  if (word == "lower") return ClothesType::kLower;
  if (word == "full") return ClothesType::kFull;
  throw ParseError(line, "type must be upper|lower|full");
}

std::optional<std::size_t> slot_index_by_name(std::string_view name) {
  for (std::size_t i = 0; i < kLandmarkCount; ++i)
    if (kLandmarkNames[i] == name) return i;
  return std::nullopt;
}

std::vector<std::string_view> split_on_commas(std::string_view value) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = value.find(',', start);
    if (comma == std::string_view::npos) {
      parts.push_back(value.substr(start));
      return parts;
    }
    parts.push_back(value.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::vector<AnnotatedSample> parse_record_lines(std::string_view text) {
  std::vector<AnnotatedSample> samples;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto tokens = split_tokens(lines[i]);
    if (tokens.empty()) continue;

    AnnotatedSample sample;
    bool have_path = false;
    std::unordered_set<std::string_view> seen_keys;
    for (std::string_view token : tokens) {
      const std::size_t eq = token.find('=');
      if (eq == std::string_view::npos)
        throw ParseError(line_no, "expected key=value, got '" +
                                      std::string(token) + "'");
      const std::string_view key = token.substr(0, eq);
      const std::string_view value = token.substr(eq + 1);
      if (!seen_keys.insert(key).second)
        throw ParseError(line_no, "duplicate field '" + std::string(key) + "'");

      if (key == "path") {
        sample.image_path = std::string(value);
        have_path = true;
      } else if (key == "category") {
        sample.category = std::string(value);
      } else if (key == "type") {
        sample.clothes_type = clothes_type_from_word(value, line_no);
      } else if (key == "bbox") {
        const auto parts = split_on_commas(value);
        if (parts.size() != 4)
          throw ParseError(line_no, "bbox needs x1,y1,x2,y2");
        BoundingBox box;
        box.x1 = parse_int_token(parts[0], line_no);
        box.y1 = parse_int_token(parts[1], line_no);
        box.x2 = parse_int_token(parts[2], line_no);
        box.y2 = parse_int_token(parts[3], line_no);
        sample.bbox = box;
      } else if (const auto slot = slot_index_by_name(key)) {
        const auto parts = split_on_commas(value);
        if (parts.size() != 3)
          throw ParseError(line_no, "landmark needs x,y,visibility");
        Landmark lm;
        lm.x = parse_double_token(parts[0], line_no) - 1.0;
        lm.y = parse_double_token(parts[1], line_no) - 1.0;
        lm.visibility = visibility_from_word(parts[2], line_no);
        sample.landmarks.slots[*slot] = lm;
      } else {
        throw ParseError(line_no, "unknown field '" + std::string(key) + "'");
      }
    }
    if (!have_path) throw ParseError(line_no, "record has no path field");
    samples.push_back(std::move(sample));
  }
  return samples;
}

std::string serialize_record_lines(const std::vector<AnnotatedSample>& samples) {
  std::string out;
  for (const AnnotatedSample& sample : samples) {
    out += "path=";
    out += sample.image_path;
    if (!sample.category.empty()) {
      out += " category=";
      out += sample.category;
    }
    out += " type=";
    out += clothes_type_word(sample.clothes_type);
    if (sample.bbox.has_value()) {
      out += " bbox=" + std::to_string(sample.bbox->x1) + ',' +
             std::to_string(sample.bbox->y1) + ',' +
             std::to_string(sample.bbox->x2) + ',' +
             std::to_string(sample.bbox->y2);
    }
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      const auto& lm = sample.landmarks.slots[i];
      if (!lm.has_value()) continue;
      out += ' ';
      out += kLandmarkNames[i];
      out += '=';
      out += format_double(lm->x + 1.0);
      out += ',';
      out += format_double(lm->y + 1.0);
      out += ',';
      out += visibility_word(lm->visibility);
    }
    out += '\n';
  }
  return out;
}

CropResult crop_resize(const Image& img, const LandmarkSet& landmarks,
                       const BoundingBox& bbox, std::size_t target) {
  if (bbox.x1 >= bbox.x2 || bbox.y1 >= bbox.y2)
    throw InvalidParameterError("crop_resize: degenerate bbox");
  if (bbox.x1 < 0 || bbox.y1 < 0 ||
      bbox.x2 > static_cast<std::int64_t>(img.width()) ||
      bbox.y2 > static_cast<std::int64_t>(img.height()))
    throw InvalidParameterError("crop_resize: bbox outside the image");
  if (target == 0) throw InvalidParameterError("crop_resize: target must be >= 1");

  const double bw = static_cast<double>(bbox.x2 - bbox.x1);
  const double bh = static_cast<double>(bbox.y2 - bbox.y1);
  const double sx_scale = bw / static_cast<double>(target);
  const double sy_scale = bh / static_cast<double>(target);

  Image out(target, target, img.channels());
  for (std::size_t y = 0; y < target; ++y) {
    const double sy = static_cast<double>(bbox.y1) + static_cast<double>(y) * sy_scale;
    for (std::size_t x = 0; x < target; ++x) {
      const double sx = static_cast<double>(bbox.x1) + static_cast<double>(x) * sx_scale;
      const PixelValue v = bilinear_sample(img, sx, sy);
      for (std::size_t ch = 0; ch < img.channels(); ++ch) out.at(y, x, ch) = v[ch];
    }
  }

  const double lx_scale = static_cast<double>(target) / bw;
  const double ly_scale = static_cast<double>(target) / bh;
  LandmarkSet mapped = landmarks;
  for (auto& slot : mapped.slots) {
    if (!slot.has_value()) continue;
    const bool inside = slot->x >= static_cast<double>(bbox.x1) &&
                        slot->x < static_cast<double>(bbox.x2) &&
                        slot->y >= static_cast<double>(bbox.y1) &&
                        slot->y < static_cast<double>(bbox.y2);
    slot->x = (slot->x - static_cast<double>(bbox.x1)) * lx_scale;
    slot->y = (slot->y - static_cast<double>(bbox.y1)) * ly_scale;
    if (!inside) slot->visibility = Visibility::kOutOfFrame;
  }
  return {std::move(out), mapped};
}

const std::vector<std::string>& deepfashion_categories() {
  static const std::vector<std::string> names = {
      // upper-body
      "Anorak", "Blazer", "Blouse", "Bomber", "Button-Down", "Cardigan",
      "Flannel", "Halter", "Henley", "Hoodie", "Jacket", "Jersey", "Parka",
      "Peacoat", "Poncho", "Sweater", "Tank", "Tee", "Top", "Turtleneck",
      // lower-body
      "Capris", "Chinos", "Culottes", "Cutoffs", "Gauchos", "Jeans", "Jeggins",
      "Jodhpurs", "Joggers", "Leggins", "Sarong", "Shorts", "Skirt",
      "Sweatpants", "Sweatshorts",
      // full-body
      "Caftan", "Cape", "Coat", "Coverup", "Dress", "Jumpsuit", "Kaftan",
      "Kimono", "Nightdress", "Robe", "Romper",
  };
  return names;
}

const CategoryMap& ctu_deepfashion_map() {
  static const CategoryMap map = {{
      {"bluse", {"Blouse"}},
      {"hoody", {"Hoodie", "Sweater"}},
      {"pants", {"Jeans", "Jeggins", "Joggers", "Leggins"}},
      {"polo", {"Tee", "Button-Down"}},
      {"polo-long", {"Button-Down", "Henley", "Jacket"}},
      {"skirt", {"Skirt"}},
      {"tshirt", {"Tee"}},
      {"tshirt-long", {"Cardigan", "Sweater", "Tee"}},
  }};
  return map;
}

const std::vector<std::string>& map_category(const CategoryMap& map,
                                             std::string_view source) {
  for (const auto& [name, targets] : map.entries)
    if (name == source) return targets;
  throw UnknownCategoryError("no mapping for category '" + std::string(source) +
                             "'");
}

CategoryDistribution mask_categories(const CategoryDistribution& dist,
                                     const std::vector<std::string>& vocabulary,
                                     const std::vector<std::string>& allowed) {
  if (dist.size() != vocabulary.size())
    throw ShapeError("mask_categories: distribution does not match vocabulary");
  if (allowed.empty())
    throw InvalidParameterError("mask_categories: empty allowed set");

  std::vector<bool> keep(vocabulary.size(), false);
  for (const std::string& name : allowed)
    keep[vocabulary_index(vocabulary, name)] = true;

  std::vector<double> masked(dist.size(), 0.0);
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (keep[i]) masked[i] = dist.at(i);
  const double mass = kahan_sum(masked);
  if (mass <= 0.0)
    throw DegenerateMaskError("mask_categories: allowed mass is zero");
  for (double& v : masked) v /= mass;
  return CategoryDistribution(std::move(masked));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError("read failed for " + path);
  return buffer.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for " + path);
}

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

}  // namespace augkit
