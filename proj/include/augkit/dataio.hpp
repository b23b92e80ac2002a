#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "augkit/types.hpp"

namespace augkit {

// Pixel-aligned box, 0-indexed, half-open: [x1, x2) x [y1, y2).
struct BoundingBox {
  std::int64_t x1 = 0;
  std::int64_t y1 = 0;
  std::int64_t x2 = 0;
  std::int64_t y2 = 0;

  friend bool operator==(const BoundingBox& a, const BoundingBox& b) {
    return a.x1 == b.x1 && a.y1 == b.y1 && a.x2 == b.x2 && a.y2 == b.y2;
  }
};

struct AnnotatedSample {
  std::string image_path;
  ClothesType clothes_type = ClothesType::kFull;
  LandmarkSet landmarks;
  std::optional<BoundingBox> bbox;
  std::string category;  // empty when unknown
};

// ---- Three-file whitespace annotation family ----------------------------
//
// Every file: line 1 = record count, line 2 = column headers (content
// ignored on parse), then one whitespace-separated record per line,
// trailing newline.  Landmark rows: path, type code (1 = upper,
// 2 = lower, 3 = full), then a (visibility x y) triple per slot the
// type defines, in canonical slot order.  Coordinates are 1-indexed on
// disk and converted to the 0-indexed convention here; visibility codes
// are 0 = visible, 1 = occluded, 2 = out-of-frame.

std::vector<AnnotatedSample> parse_landmark_file(std::string_view text);
std::string serialize_landmark_file(const std::vector<AnnotatedSample>& samples);

// Bbox rows: path x1 y1 x2 y2, integers taken verbatim (0-indexed,
// half-open).  Duplicate paths are a parse error.
std::vector<std::pair<std::string, BoundingBox>> parse_bbox_file(
    std::string_view text);
std::string serialize_bbox_file(
    const std::vector<std::pair<std::string, BoundingBox>>& rows);

// Category rows: path name.  Duplicate paths are a parse error.
std::vector<std::pair<std::string, std::string>> parse_category_file(
    std::string_view text);
std::string serialize_category_file(
    const std::vector<std::pair<std::string, std::string>>& rows);

// Joins bbox and category rows onto samples by image path.  Rows that
// match no sample, and samples that found no row, are reported rather
// than dropped silently.
struct MergeReport {
  std::vector<std::string> samples_missing_bbox;
  std::vector<std::string> samples_missing_category;
  std::vector<std::string> unmatched_bbox_paths;
  std::vector<std::string> unmatched_category_paths;
};

MergeReport merge_annotations(
    std::vector<AnnotatedSample>& samples,
    const std::vector<std::pair<std::string, BoundingBox>>& bboxes,
    const std::vector<std::pair<std::string, std::string>>& categories);

// ---- Single-file record format -------------------------------------------
//
// One record per line, whitespace-separated key=value fields:
//   path=<p> [category=<name>] [type=upper|lower|full]
//   [bbox=x1,y1,x2,y2] [<SlotName>=<x>,<y>,<vis>]...
// Slot names are the canonical eight (e.g. L.Collar), coordinates are
// 1-indexed on disk, vis is visible|occluded|out.  Any subset of slots
// may appear.  Unknown keys are a parse error.

std::vector<AnnotatedSample> parse_record_lines(std::string_view text);
std::string serialize_record_lines(const std::vector<AnnotatedSample>& samples);

// ---- Cropping -------------------------------------------------------------

struct CropResult {
  Image image;
  LandmarkSet landmarks;
};

// Crops to the box and bilinearly resizes to target x target.  Output
// pixel x samples the source at x1 + x * (x2-x1)/target, and a landmark
// moves to (l.x - x1) * target/(x2-x1); the two stay consistent, and a
// whole-image box at native size is an exact identity.  Landmarks
// outside the box keep their mapped coordinates but become
// out-of-frame.  The box must be nonempty and inside the image.
CropResult crop_resize(const Image& img, const LandmarkSet& landmarks,
                       const BoundingBox& bbox, std::size_t target);

// ---- Category machinery ----------------------------------------------------

// Source label -> admissible target labels, ordered.
struct CategoryMap {
  std::vector<std::pair<std::string, std::vector<std::string>>> entries;
};

// The 46-name garment vocabulary predictions are scored against.
const std::vector<std::string>& deepfashion_categories();

// Bundled robot-lab wardrobe mapping (8 sources, 13 distinct targets).
// A prediction counts as correct for a source label when it hits any
// member of the target set.
const CategoryMap& ctu_deepfashion_map();

// Target set for a source label; unknown labels throw
// UnknownCategoryError.
const std::vector<std::string>& map_category(const CategoryMap& map,
                                             std::string_view source);

// Zeroes every category outside `allowed` and renormalizes.  Surviving
// entries keep their relative order of magnitude.  Throws
// UnknownCategoryError for names outside the vocabulary and
// DegenerateMaskError when nothing survives with positive mass.
CategoryDistribution mask_categories(const CategoryDistribution& dist,
                                     const std::vector<std::string>& vocabulary,
                                     const std::vector<std::string>& allowed);

// ---- Small text helpers -----------------------------------------------------

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

// Shortest round-trippable decimal representation.
std::string format_double(double v);

}  // namespace augkit
