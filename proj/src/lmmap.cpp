#include "augkit/lmmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "augkit/error.hpp"

namespace augkit {
namespace {

// Combined residual above this marks the landmark unreachable.
constexpr double kMaxResidualPx = 3.0;

std::uint64_t coord_key(PixelCoord c) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.y)) << 32) |
         static_cast<std::uint32_t>(c.x);
}

bool all_zero(const Grid& g) {
  for (double v : g.values)
    if (v != 0.0) return false;
  return true;
}

void check_fields(const DisplacementFieldPair& fields) {
  if (fields.stage != FieldStage::kSmoothed)
    throw InvalidParameterError("fields must be at the smoothed stage");
  if (fields.dx.height != fields.dy.height || fields.dx.width != fields.dy.width)
    throw ShapeError("dx and dy extents differ");
  if (fields.dx.height == 0 || fields.dx.width == 0)
    throw ShapeError("empty displacement fields");
}

}  // namespace

CandidateSet candidate_set(const DisplacementFieldPair& fields,
                           const Landmark& lm, Axis axis, std::size_t n) {
  check_fields(fields);
  const double target = axis == Axis::kX ? lm.x : lm.y;
  if (!std::isfinite(target))
    throw InvalidCoordinateError("candidate_set: non-finite landmark");

  const std::size_t h = fields.dx.height;
  const std::size_t w = fields.dx.width;
  const std::size_t total = h * w;
  const std::size_t count = std::min(n, total);

  struct Entry {
    double r;
    std::int32_t x;
    std::int32_t y;
  };
  std::vector<Entry> entries;
  entries.reserve(total);
  const Grid& g = axis == Axis::kX ? fields.dx : fields.dy;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double base =
          axis == Axis::kX ? static_cast<double>(x) : static_cast<double>(y);
      entries.push_back({std::abs(base + g.at(y, x) - target),
                         static_cast<std::int32_t>(x),
                         static_cast<std::int32_t>(y)});
    }
  }
  const auto cmp = [](const Entry& a, const Entry& b) {
    if (a.r != b.r) return a.r < b.r;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  };
  if (count < total)
    std::nth_element(entries.begin(), entries.begin() + count, entries.end(), cmp);
  std::sort(entries.begin(), entries.begin() + count, cmp);

  CandidateSet out;
  out.axis = axis;
  out.coords.reserve(count);
  out.residuals.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.coords.push_back({entries[i].x, entries[i].y});
    out.residuals.push_back(entries[i].r);
  }
  return out;
}

std::optional<PixelCoord> match_exact(const CandidateSet& xs,
                                      const CandidateSet& ys) {
  std::unordered_map<std::uint64_t, double> y_residual;
  y_residual.reserve(ys.coords.size() * 2);
  for (std::size_t i = 0; i < ys.coords.size(); ++i)
    y_residual.emplace(coord_key(ys.coords[i]), ys.residuals[i]);

  // The combined squared residual is the same objective the exhaustive
  // reference minimizes, so full candidate coverage reproduces it
  // exactly; a plain residual sum would not.
  bool found = false;
  PixelCoord best{0, 0};
  double best_sum = 0.0;
  for (std::size_t i = 0; i < xs.coords.size(); ++i) {
    const auto it = y_residual.find(coord_key(xs.coords[i]));
    if (it == y_residual.end()) continue;
    const double sum =
        xs.residuals[i] * xs.residuals[i] + it->second * it->second;
    if (!found || sum < best_sum ||
        (sum == best_sum && lex_less(xs.coords[i], best))) {
      found = true;
      best = xs.coords[i];
      best_sum = sum;
    }
  }
  if (!found) return std::nullopt;
  return best;
}

KdTree2::KdTree2(std::vector<PixelCoord> points) {
  if (points.empty()) throw InvalidParameterError("KdTree2: no points");
  nodes_.reserve(points.size());
  root_ = build(points, 0, static_cast<std::int64_t>(points.size()), 0);
}

std::int32_t KdTree2::build(std::vector<PixelCoord>& pts, std::int64_t lo,
                            std::int64_t hi, int depth) {
  if (lo >= hi) return -1;
  const int axis = depth & 1;
  const std::int64_t mid = lo + (hi - lo) / 2;
  const auto cmp = [axis](PixelCoord a, PixelCoord b) {
    const std::int64_t av = axis == 0 ? a.x : a.y;
    const std::int64_t bv = axis == 0 ? b.x : b.y;
    if (av != bv) return av < bv;
    return lex_less(a, b);
  };
  std::nth_element(pts.begin() + lo, pts.begin() + mid, pts.begin() + hi, cmp);

  Node node;
  node.point = pts[mid];
  node.axis = static_cast<std::int8_t>(axis);
  const auto idx = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  const std::int32_t left = build(pts, lo, mid, depth + 1);
  const std::int32_t right = build(pts, mid + 1, hi, depth + 1);
  nodes_[idx].left = left;
  nodes_[idx].right = right;
  return idx;
}

KdTree2::Nearest KdTree2::nearest(PixelCoord query) const {
  Nearest best;
  best.point = {std::numeric_limits<std::int64_t>::max(),
                std::numeric_limits<std::int64_t>::max()};
  best.dist2 = std::numeric_limits<std::int64_t>::max();
  search(root_, query, best);
  return best;
}

void KdTree2::search(std::int32_t node_idx, PixelCoord query,
                     Nearest& best) const {
  if (node_idx < 0) return;
  const Node& node = nodes_[node_idx];
  const std::int64_t d2 = squared_distance(node.point, query);
  if (d2 < best.dist2 || (d2 == best.dist2 && lex_less(node.point, best.point))) {
    best.point = node.point;
    best.dist2 = d2;
  }
  const std::int64_t qa = node.axis == 0 ? query.x : query.y;
  const std::int64_t na = node.axis == 0 ? node.point.x : node.point.y;
  const std::int64_t diff = qa - na;
  const std::int32_t near_child = diff < 0 ? node.left : node.right;
  const std::int32_t far_child = diff < 0 ? node.right : node.left;
  search(near_child, query, best);
  // <= keeps equidistant points on the far side reachable, which the
  // row-major tie-break depends on.
  if (diff * diff <= best.dist2) search(far_child, query, best);
}

PixelCoord match_nearest(const CandidateSet& xs, const CandidateSet& ys) {
  if (xs.coords.empty() || ys.coords.empty())
    throw InvalidParameterError("match_nearest: empty candidate set");
  const KdTree2 tree(ys.coords);
  bool have = false;
  PixelCoord best{0, 0};
  std::int64_t best_d2 = 0;
  for (const PixelCoord& p : xs.coords) {
    const KdTree2::Nearest nn = tree.nearest(p);
    if (!have || nn.dist2 < best_d2 ||
        (nn.dist2 == best_d2 && lex_less(p, best))) {
      have = true;
      best = p;
      best_d2 = nn.dist2;
    }
  }
  return best;
}

std::size_t default_candidate_count(std::size_t width, std::size_t height) {
  const double scaled = 200.0 *
                        (static_cast<double>(width) * static_cast<double>(height)) /
                        (224.0 * 224.0);
  const auto rounded = static_cast<std::size_t>(std::llround(scaled));
  return std::max<std::size_t>(50, rounded);
}

std::size_t audit_candidate_count(std::size_t width, std::size_t height,
                                  const ElasticParams& params) {
  if (params.sigma <= 0.0) throw InvalidParameterError("sigma must be positive");
  const double extent = static_cast<double>(std::max(width, height));
  const double branches = 2.0 * static_cast<double>(std::max<std::size_t>(1, params.n_seeds));
  const double band = branches * extent * (1.0 + 0.61 * params.alpha / params.sigma);
  const auto scaled = static_cast<std::size_t>(std::llround(band));
  const std::size_t total = width * height;
  return std::min(total, std::max(default_candidate_count(width, height), scaled));
}

Landmark invert_landmark(const DisplacementFieldPair& fields,
                         const Landmark& lm, std::size_t n) {
  check_fields(fields);
  if (lm.visibility == Visibility::kOutOfFrame)
    throw InvalidParameterError(
        "invert_landmark: landmark must be visible or occluded");
  if (n == 0) n = default_candidate_count(fields.dx.width, fields.dx.height);

  // The identity warp needs no search; candidate residuals would tie
  // across whole rows/columns and the tie-break could walk away from
  // the true position.
  if (all_zero(fields.dx) && all_zero(fields.dy)) return lm;

  const CandidateSet xs = candidate_set(fields, lm, Axis::kX, n);
  const CandidateSet ys = candidate_set(fields, lm, Axis::kY, n);
  PixelCoord chosen{0, 0};
  if (const auto exact = match_exact(xs, ys)) {
    chosen = *exact;
  } else {
    chosen = match_nearest(xs, ys);
  }

  const auto yi = static_cast<std::size_t>(chosen.y);
  const auto xi = static_cast<std::size_t>(chosen.x);
  const double rx = static_cast<double>(chosen.x) + fields.dx.at(yi, xi) - lm.x;
  const double ry = static_cast<double>(chosen.y) + fields.dy.at(yi, xi) - lm.y;
  const double residual = std::sqrt(rx * rx + ry * ry);

  Landmark out;
  out.x = static_cast<double>(chosen.x);
  out.y = static_cast<double>(chosen.y);
  out.visibility =
      residual > kMaxResidualPx ? Visibility::kOutOfFrame : lm.visibility;
  return out;
}

Landmark oracle_invert(const DisplacementFieldPair& fields, const Landmark& lm) {
  check_fields(fields);
  if (!std::isfinite(lm.x) || !std::isfinite(lm.y))
    throw InvalidCoordinateError("oracle_invert: non-finite landmark");

  const std::size_t h = fields.dx.height;
  const std::size_t w = fields.dx.width;
  bool found = false;
  PixelCoord best{0, 0};
  double best_r2 = 0.0;
  // Row-major scan with a strict improvement test: ties keep the first,
  // i.e. row-major smallest, pixel.
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double rx = static_cast<double>(x) + fields.dx.at(y, x) - lm.x;
      const double ry = static_cast<double>(y) + fields.dy.at(y, x) - lm.y;
      const double r2 = rx * rx + ry * ry;
      if (!found || r2 < best_r2) {
        found = true;
        best = {static_cast<std::int64_t>(x), static_cast<std::int64_t>(y)};
        best_r2 = r2;
      }
    }
  }
  Landmark out = lm;
  out.x = static_cast<double>(best.x);
  out.y = static_cast<double>(best.y);
  return out;
}

}  // namespace augkit
