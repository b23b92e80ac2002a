#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "augkit/types.hpp"
#include "augkit/warp.hpp"

namespace augkit {

// Integer pixel position, x = column, y = row.
struct PixelCoord {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend bool operator==(PixelCoord a, PixelCoord b) {
    return a.x == b.x && a.y == b.y;
  }
};

// Row-major ordering used for every deterministic tie-break.
inline bool lex_less(PixelCoord a, PixelCoord b) {
  return a.y < b.y || (a.y == b.y && a.x < b.x);
}

inline std::int64_t squared_distance(PixelCoord a, PixelCoord b) {
  const std::int64_t dx = a.x - b.x;
  const std::int64_t dy = a.y - b.y;
  return dx * dx + dy * dy;
}

enum class Axis { kX, kY };

// Pixels whose warped coordinate along one axis lands closest to a
// landmark.  Entries ascend by residual, ties in row-major order; the
// set holds exactly min(n, width*height) entries.
struct CandidateSet {
  Axis axis = Axis::kX;
  std::vector<PixelCoord> coords;
  std::vector<double> residuals;
};

// Residual along the axis at pixel (x,y):
//   kX: |x + dx(y,x) - lm.x|      kY: |y + dy(y,x) - lm.y|
// Fields must be at the smoothed stage.
CandidateSet candidate_set(const DisplacementFieldPair& fields,
                           const Landmark& lm, Axis axis, std::size_t n);

// Pixel present in both candidate sets with minimal combined squared
// residual (the exhaustive reference's objective), ties in row-major
// order; empty optional when the sets are disjoint.
std::optional<PixelCoord> match_exact(const CandidateSet& xs,
                                      const CandidateSet& ys);

// Static 2D nearest-neighbor index over integer points.  Distances are
// exact int64 arithmetic; equidistant neighbors resolve to the
// row-major smaller point, so results match a linear scan exactly.
class KdTree2 {
 public:
  explicit KdTree2(std::vector<PixelCoord> points);

  struct Nearest {
    PixelCoord point;
    std::int64_t dist2 = 0;
  };

  Nearest nearest(PixelCoord query) const;
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    PixelCoord point;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int8_t axis = 0;  // 0 splits on x, 1 on y
  };

  std::int32_t build(std::vector<PixelCoord>& pts, std::int64_t lo,
                     std::int64_t hi, int depth);
  void search(std::int32_t node, PixelCoord query, Nearest& best) const;

  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

// Fallback when the sets share no pixel: the xs member whose nearest
// ys neighbor (via KdTree2) is closest; ties pick the row-major smaller
// xs member.  Both sets must be nonempty.
PixelCoord match_nearest(const CandidateSet& xs, const CandidateSet& ys);

// Default candidate count, tuned at 224x224 and scaled by pixel count:
// max(50, round(200 * (width*height) / (224*224))).
std::size_t default_candidate_count(std::size_t width, std::size_t height);

// Candidate count for oracle audits.  Agreement with the exhaustive
// reference needs per-axis coverage of the whole near-zero residual
// band: one seed stretches it to about extent * (1 + 0.61*alpha/sigma)
// pixels (0.61 ~ the peak slope of a unit-peak Gaussian of bandwidth
// sigma and height alpha), each seed can fold in another branch, and a
// factor 2 covers discretization.  Clamped to [default count, w*h].
std::size_t audit_candidate_count(std::size_t width, std::size_t height,
                                  const ElasticParams& params);

// Locates where a visible or occluded landmark lands on the warped
// grid.  The warp has no analytic inverse, so the position is searched:
// per-axis candidate sets of size n (0 = scaled default), their exact
// intersection when nonempty, nearest cross-axis pair otherwise.  When
// the chosen pixel's combined residual exceeds 3 px the landmark is
// considered unreachable and comes back out-of-frame.  Identically-zero
// fields return the landmark unchanged.  Deterministic; draws nothing.
Landmark invert_landmark(const DisplacementFieldPair& fields,
                         const Landmark& lm, std::size_t n = 0);

// Exhaustive reference: argmin over every pixel of the combined squared
// residual, ties in row-major order.  For audits; O(width*height).
Landmark oracle_invert(const DisplacementFieldPair& fields,
                       const Landmark& lm);

}  // namespace augkit
