#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "augkit/error.hpp"
#include "augkit/rng.hpp"
#include "augkit/types.hpp"
#include "augkit/warp.hpp"
#include "doctest.h"

using namespace augkit;

namespace {

Image make_gradient(std::size_t w, std::size_t h, std::size_t channels) {
  Image img(w, h, channels);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c)
      for (std::size_t ch = 0; ch < channels; ++ch)
        img.at(r, c, ch) = static_cast<double>((r * 31 + c * 17 + ch * 7) % 97) / 96.0;
  return img;
}

LandmarkSet single_landmark(std::size_t slot, double x, double y,
                            Visibility vis = Visibility::kVisible) {
  LandmarkSet set;
  set.slots[slot] = Landmark{x, y, vis};
  return set;
}

}  // namespace

TEST_CASE("bilinear interpolation on a 2x2 patch") {
  // Row 0: 0.0 0.2 / row 1: 0.4 0.6.
  Image img(2, 2, 1, {0.0, 0.2, 0.4, 0.6});

  CHECK(bilinear_sample(img, 0.5, 0.5)[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(bilinear_sample(img, 0.25, 0.0)[0] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(bilinear_sample(img, 0.0, 0.75)[0] == doctest::Approx(0.3).epsilon(1e-12));

  SUBCASE("integral coordinates return stored values exactly") {
    CHECK(bilinear_sample(img, 0.0, 0.0)[0] == 0.0);
    CHECK(bilinear_sample(img, 1.0, 0.0)[0] == 0.2);
    CHECK(bilinear_sample(img, 0.0, 1.0)[0] == 0.4);
    CHECK(bilinear_sample(img, 1.0, 1.0)[0] == 0.6);
  }

  SUBCASE("coordinates outside the grid replicate the border") {
    CHECK(bilinear_sample(img, -3.7, 0.0)[0] == 0.0);
    CHECK(bilinear_sample(img, 10.0, 10.0)[0] == 0.6);
    CHECK(bilinear_sample(img, -1.0, 0.5)[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(bilinear_sample(img, 0.5, 99.0)[0] == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("channels past the image's count stay zero") {
    const PixelValue v = bilinear_sample(img, 0.5, 0.5);
    CHECK(v[1] == 0.0);
    CHECK(v[2] == 0.0);
  }

  SUBCASE("non-finite coordinates throw") {
    const double nan = std::nan("");
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS((void)bilinear_sample(img, nan, 0.0), InvalidCoordinateError);
    CHECK_THROWS_AS((void)bilinear_sample(img, 0.0, inf), InvalidCoordinateError);
  }
}

TEST_CASE("bilinear interpolation handles RGB channels independently") {
  Image img = make_gradient(5, 4, 3);
  const PixelValue v = bilinear_sample(img, 2.5, 1.5);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    const double expect = 0.25 * (img.at(1, 2, ch) + img.at(1, 3, ch) +
                                  img.at(2, 2, ch) + img.at(2, 3, ch));
    CHECK(v[ch] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("gaussian kernel radius is ceil(truncation * sigma)") {
  CHECK(gaussian_kernel(40.0, 3.0).radius == 120);
  CHECK(gaussian_kernel(2.0, 2.5).radius == 5);
  CHECK(gaussian_kernel(0.4, 3.0).radius == 2);
  CHECK(gaussian_kernel(1.0, 3.0).side() == 7);
}

TEST_CASE("unit-peak gaussian kernel values") {
  const GaussianKernel k = gaussian_kernel(1.0, 3.0, KernelNormalization::kUnitPeak);
  CHECK(k.at(0, 0) == 1.0);
  CHECK(k.at(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(k.at(1, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(k.at(3, 0) == doctest::Approx(std::exp(-4.5)).epsilon(1e-15));

  SUBCASE("kernel is symmetric under reflection and transposition") {
    for (int dy = -k.radius; dy <= k.radius; ++dy)
      for (int dx = -k.radius; dx <= k.radius; ++dx) {
        CHECK(k.at(dy, dx) == k.at(-dy, -dx));
        CHECK(k.at(dy, dx) == k.at(dx, dy));
      }
  }
}

TEST_CASE("unit-sum gaussian kernel sums to one") {
  const GaussianKernel k = gaussian_kernel(2.5, 3.0, KernelNormalization::kUnitSum);
  double sum = 0.0;
  for (double v : k.values) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(k.at(0, 0) > 0.0);
}

TEST_CASE("gaussian kernel rejects non-positive parameters") {
  CHECK_THROWS_AS((void)gaussian_kernel(0.0), InvalidParameterError);
  CHECK_THROWS_AS((void)gaussian_kernel(-1.0), InvalidParameterError);
  CHECK_THROWS_AS((void)gaussian_kernel(1.0, 0.0), InvalidParameterError);
}

TEST_CASE("smoothing an impulse reproduces the gaussian bump") {
  Grid field(32, 32);
  field.at(10, 10) = 100.0;
  const GaussianKernel kernel =
      gaussian_kernel(2.0, 3.0, KernelNormalization::kUnitPeak);
  const Grid smooth = convolve_zero_padded(field, kernel);

  REQUIRE(smooth.height == 32);
  REQUIRE(smooth.width == 32);
  for (std::size_t r = 0; r < smooth.height; ++r)
    for (std::size_t c = 0; c < smooth.width; ++c) {
      const double dy = static_cast<double>(r) - 10.0;
      const double dx = static_cast<double>(c) - 10.0;
      const double expect =
          (std::abs(dx) <= kernel.radius && std::abs(dy) <= kernel.radius)
              ? 100.0 * std::exp(-(dx * dx + dy * dy) / 8.0)
              : 0.0;
      CHECK(smooth.at(r, c) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("zero-padded convolution truncates support at the border") {
  Grid field(8, 8);
  field.at(1, 1) = 100.0;
  const Grid smooth =
      convolve_zero_padded(field, gaussian_kernel(2.0, 3.0));
  // The bump keeps its closed form inside the grid; nothing reflects back.
  CHECK(smooth.at(0, 0) == doctest::Approx(100.0 * std::exp(-2.0 / 8.0)).epsilon(1e-12));
  CHECK(smooth.at(1, 1) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(smooth.at(7, 7) ==
        doctest::Approx(100.0 * std::exp(-72.0 / 8.0)).epsilon(1e-12));
}

TEST_CASE("convolution is linear: two impulses superpose") {
  Grid field(24, 24);
  field.at(5, 5) = 40.0;
  field.at(12, 18) = -70.0;
  const GaussianKernel kernel = gaussian_kernel(1.5, 3.0);

  Grid only_a(24, 24);
  only_a.at(5, 5) = 40.0;
  Grid only_b(24, 24);
  only_b.at(12, 18) = -70.0;

  const Grid both = convolve_zero_padded(field, kernel);
  const Grid a = convolve_zero_padded(only_a, kernel);
  const Grid b = convolve_zero_padded(only_b, kernel);
  for (std::size_t i = 0; i < both.values.size(); ++i)
    CHECK(both.values[i] ==
          doctest::Approx(a.values[i] + b.values[i]).epsilon(1e-12));
}

TEST_CASE("an all-zero field stays zero after smoothing") {
  const Grid zero(16, 16);
  const Grid smooth = convolve_zero_padded(zero, gaussian_kernel(3.0));
  CHECK(std::all_of(smooth.values.begin(), smooth.values.end(),
                    [](double v) { return v == 0.0; }));
}

TEST_CASE("displacement fields: degenerate parameters give zero fields") {
  RngStream rng(11);

  SUBCASE("alpha = 0") {
    ElasticParams p{3, 0.0, 10.0, 3.0};
    const DisplacementFieldPair f = make_displacement_fields(20, 20, p, rng);
    CHECK(f.stage == FieldStage::kSmoothed);
    CHECK(std::all_of(f.dx.values.begin(), f.dx.values.end(),
                      [](double v) { return v == 0.0; }));
    CHECK(std::all_of(f.dy.values.begin(), f.dy.values.end(),
                      [](double v) { return v == 0.0; }));
  }

  SUBCASE("no seed positions") {
    ElasticParams p{0, 500.0, 10.0, 3.0};
    const DisplacementFieldPair f = make_displacement_fields(20, 20, p, rng);
    CHECK(std::all_of(f.dx.values.begin(), f.dx.values.end(),
                      [](double v) { return v == 0.0; }));
    CHECK(std::all_of(f.dy.values.begin(), f.dy.values.end(),
                      [](double v) { return v == 0.0; }));
  }
}

TEST_CASE("displacement fields reject more seeds than pixels") {
  RngStream rng(1);
  ElasticParams p{26, 100.0, 5.0, 3.0};
  CHECK_THROWS_AS((void)make_displacement_fields(5, 5, p, rng),
                  InvalidParameterError);
}

TEST_CASE("displacement magnitude never exceeds n_seeds * alpha") {
  const std::vector<ElasticParams> combos = {
      {1, 50.0, 3.0, 3.0},
      {3, 100.0, 10.0, 3.0},
      {5, 500.0, 40.0, 3.0},
      {2, 0.0, 5.0, 3.0},
  };
  for (const ElasticParams& p : combos) {
    CAPTURE(p.n_seeds);
    CAPTURE(p.alpha);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      RngStream rng(seed);
      const DisplacementFieldPair f = make_displacement_fields(48, 32, p, rng);
      const double bound =
          static_cast<double>(p.n_seeds) * p.alpha + 1e-9;
      for (double v : f.dx.values) CHECK(std::abs(v) <= bound);
      for (double v : f.dy.values) CHECK(std::abs(v) <= bound);
    }
  }
}

TEST_CASE("displacement fields follow the documented draw order") {
  // On a 1x1 grid the single position is forced, so the stream protocol
  // (position draw, then the dx, dy pair) can be replayed exactly.
  RngStream actual(99);
  ElasticParams p{1, 250.0, 4.0, 3.0};
  const DisplacementFieldPair f = make_displacement_fields(1, 1, p, actual);

  RngStream replay(99);
  CHECK(replay.next_below(1) == 0);
  const double dx = replay.uniform(-p.alpha, p.alpha);
  const double dy = replay.uniform(-p.alpha, p.alpha);
  // Unit-peak smoothing leaves an isolated impulse's own cell unchanged.
  CHECK(f.dx.at(0, 0) == dx);
  CHECK(f.dy.at(0, 0) == dy);

  // Both streams must have consumed the same number of draws.
  CHECK(actual.next_u64() == replay.next_u64());
}

TEST_CASE("displacement fields are deterministic per stream") {
  ElasticParams p{3, 100.0, 10.0, 3.0};
  RngStream a(123);
  RngStream b(123);
  const DisplacementFieldPair fa = make_displacement_fields(40, 30, p, a);
  const DisplacementFieldPair fb = make_displacement_fields(40, 30, p, b);
  CHECK(fa.dx.values == fb.dx.values);
  CHECK(fa.dy.values == fb.dy.values);

  // A second draw from the same stream gives different fields.
  const DisplacementFieldPair fc = make_displacement_fields(40, 30, p, a);
  CHECK(fc.dx.values != fa.dx.values);
}

TEST_CASE("warping with zero fields is a bit-identical no-op") {
  const Image img = make_gradient(31, 17, 3);
  LandmarkSet lms = single_landmark(0, 12.25, 8.5);
  lms.slots[3] = Landmark{30.0, 16.0, Visibility::kOccluded};
  lms.slots[5] = Landmark{-4.0, 2.0, Visibility::kOutOfFrame};

  DisplacementFieldPair fields;
  fields.dx = Grid(17, 31);
  fields.dy = Grid(17, 31);
  fields.stage = FieldStage::kSmoothed;

  const WarpResult out = warp_with_fields(img, lms, fields);
  CHECK(out.image.data() == img.data());
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    REQUIRE(out.landmarks.slots[i].has_value() == lms.slots[i].has_value());
    if (!lms.slots[i]) continue;
    CHECK(out.landmarks.slots[i]->x == lms.slots[i]->x);
    CHECK(out.landmarks.slots[i]->y == lms.slots[i]->y);
    CHECK(out.landmarks.slots[i]->visibility == lms.slots[i]->visibility);
  }
}

TEST_CASE("warping with a constant shift field translates the content") {
  const Image img = make_gradient(64, 64, 1);
  const LandmarkSet lms = single_landmark(2, 50.0, 50.0);

  DisplacementFieldPair fields;
  fields.dx = Grid(64, 64);
  fields.dy = Grid(64, 64);
  std::fill(fields.dx.values.begin(), fields.dx.values.end(), 5.0);
  fields.stage = FieldStage::kSmoothed;

  // A constant field ties every row of the x-axis residuals, so ask for
  // exhaustive candidate coverage rather than testing the budget heuristic.
  const WarpResult out = warp_with_fields(img, lms, fields, 64 * 64);

  // output(x, y) samples input(x + 5, y); interior pixels shift left.
  for (std::size_t r = 0; r < 64; ++r)
    for (std::size_t c = 0; c + 5 < 64; ++c)
      CHECK(out.image.at(r, c, 0) == img.at(r, c + 5, 0));
  // Border replication fills the right edge.
  CHECK(out.image.at(10, 63, 0) == img.at(10, 63, 0));

  // The landmark moves with the content: the output position whose
  // displaced source matches x = 50 sits at x = 45.
  REQUIRE(out.landmarks.slots[2].has_value());
  CHECK(out.landmarks.slots[2]->x == doctest::Approx(45.0).epsilon(1e-9));
  CHECK(out.landmarks.slots[2]->y == doctest::Approx(50.0).epsilon(1e-9));
  CHECK(out.landmarks.slots[2]->visibility == Visibility::kVisible);
}

TEST_CASE("warp rejects mismatched or unsmoothed fields") {
  const Image img = make_gradient(8, 8, 1);
  const LandmarkSet lms;

  DisplacementFieldPair wrong_size;
  wrong_size.dx = Grid(8, 9);
  wrong_size.dy = Grid(8, 9);
  wrong_size.stage = FieldStage::kSmoothed;
  CHECK_THROWS_AS((void)warp_with_fields(img, lms, wrong_size), ShapeError);

  DisplacementFieldPair sparse;
  sparse.dx = Grid(8, 8);
  sparse.dy = Grid(8, 8);
  sparse.stage = FieldStage::kSparse;
  CHECK_THROWS_AS((void)warp_with_fields(img, lms, sparse),
                  InvalidParameterError);
}

TEST_CASE("elastic warp with zero amplitude is bit-identical") {
  const Image img = make_gradient(40, 28, 3);
  LandmarkSet lms = single_landmark(1, 20.0, 14.0);
  lms.slots[6] = Landmark{3.5, 25.0, Visibility::kOccluded};

  RngStream rng(7);
  ElasticParams p{3, 0.0, 10.0, 3.0};
  const ElasticWarpResult out = elastic_warp(img, lms, p, rng);
  CHECK(out.image.data() == img.data());
  CHECK(out.landmarks.slots[1]->x == 20.0);
  CHECK(out.landmarks.slots[6]->visibility == Visibility::kOccluded);
  CHECK(std::all_of(out.fields.dx.values.begin(), out.fields.dx.values.end(),
                    [](double v) { return v == 0.0; }));
}

TEST_CASE("elastic warp is deterministic for equal streams") {
  const Image img = make_gradient(48, 48, 1);
  const LandmarkSet lms = single_landmark(4, 24.0, 30.0);
  ElasticParams p{3, 40.0, 6.0, 3.0};

  RngStream a(2024);
  RngStream b(2024);
  const ElasticWarpResult ra = elastic_warp(img, lms, p, a);
  const ElasticWarpResult rb = elastic_warp(img, lms, p, b);
  CHECK(ra.image.data() == rb.image.data());
  CHECK(ra.landmarks.slots[4]->x == rb.landmarks.slots[4]->x);
  CHECK(ra.landmarks.slots[4]->y == rb.landmarks.slots[4]->y);
  CHECK(ra.fields.dx.values == rb.fields.dx.values);
  CHECK(ra.fields.dy.values == rb.fields.dy.values);
}

TEST_CASE("elastic warp keeps pixel intensities inside [0, 1]") {
  const Image img = make_gradient(32, 32, 1);
  const LandmarkSet lms;
  ElasticParams p{3, 60.0, 5.0, 3.0};
  RngStream rng(5);
  const ElasticWarpResult out = elastic_warp(img, lms, p, rng);
  CHECK_NOTHROW(out.image.validate());
}

TEST_CASE("rotation by zero returns the image unchanged") {
  const Image img = make_gradient(13, 9, 3);
  const Image out = rotate_image(img, 0.0);
  CHECK(out.data() == img.data());
}

TEST_CASE("quarter turns permute square images exactly") {
  const Image img = make_gradient(4, 4, 1);
  const double half_pi = std::acos(0.0);

  SUBCASE("pi/2") {
    const Image out = rotate_image(img, half_pi);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c)
        CHECK(out.at(r, c, 0) == img.at(3 - c, r, 0));
  }
  SUBCASE("pi") {
    const Image out = rotate_image(img, 2.0 * half_pi);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c)
        CHECK(out.at(r, c, 0) == img.at(3 - r, 3 - c, 0));
  }
  SUBCASE("3 pi/2") {
    const Image out = rotate_image(img, 3.0 * half_pi);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c)
        CHECK(out.at(r, c, 0) == img.at(c, 3 - r, 0));
  }
  SUBCASE("four quarter turns compose to the identity") {
    Image cur = img;
    for (int i = 0; i < 4; ++i) cur = rotate_image(cur, half_pi);
    CHECK(cur.data() == img.data());
  }
}

TEST_CASE("half turn permutes rectangular images exactly") {
  const Image img = make_gradient(7, 4, 1);
  const Image out = rotate_image(img, 2.0 * std::acos(0.0));
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 7; ++c)
      CHECK(out.at(r, c, 0) == img.at(3 - r, 6 - c, 0));
}

TEST_CASE("rotating a rectangle by a quarter turn fills uncovered corners") {
  // 5x3 image about center (2, 1): output column 0, row 0 pulls from
  // source row 3, outside the grid by more than half a pixel.
  Image img = make_gradient(5, 3, 1);
  const double fill = 0.25;
  const Image out = rotate_image(img, std::acos(0.0), fill);
  CHECK(out.at(0, 0, 0) == fill);
  // In-bounds sources stay exact: output (row 0, col 2) pulls source
  // (x = 1, y = 1).
  CHECK(out.at(0, 2, 0) == img.at(1, 1, 0));
  // Output (row 0, col 4) pulls source (x = 1, y = -1): fill.
  CHECK(out.at(0, 4, 0) == fill);
}

TEST_CASE("a full turn reproduces the image within 1e-6") {
  const Image img = make_gradient(21, 21, 3);
  const Image out = rotate_image(img, 4.0 * std::acos(0.0));
  REQUIRE(out.data().size() == img.data().size());
  for (std::size_t i = 0; i < img.data().size(); ++i)
    CHECK(out.data()[i] == doctest::Approx(img.data()[i]).epsilon(1e-6));
}

TEST_CASE("rotating landmarks follows the image convention") {
  // A bright pixel and a landmark at the same spot stay together.
  Image img(8, 8, 1);
  img.at(2, 5, 0) = 1.0;
  const LandmarkSet lms = single_landmark(0, 5.0, 2.0);
  const double half_pi = std::acos(0.0);

  const Image rimg = rotate_image(img, half_pi);
  const LandmarkSet rlms = rotate_landmarks(lms, half_pi, 3.5, 3.5, 8, 8);

  REQUIRE(rlms.slots[0].has_value());
  const double lx = rlms.slots[0]->x;
  const double ly = rlms.slots[0]->y;
  CHECK(lx == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(ly == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(rimg.at(static_cast<std::size_t>(std::lround(ly)),
                static_cast<std::size_t>(std::lround(lx)), 0) == 1.0);
}

TEST_CASE("landmark quarter turn hits the documented fixture") {
  const LandmarkSet lms = single_landmark(0, 99.0, 49.5);
  const LandmarkSet out =
      rotate_landmarks(lms, std::acos(0.0), 49.5, 49.5, 100, 100);
  REQUIRE(out.slots[0].has_value());
  CHECK(out.slots[0]->x == doctest::Approx(49.5).epsilon(1e-12));
  CHECK(out.slots[0]->y == doctest::Approx(99.0).epsilon(1e-12));
  CHECK(out.slots[0]->visibility == Visibility::kVisible);
}

TEST_CASE("landmark rotation round-trips within 1e-9") {
  LandmarkSet lms;
  lms.slots[0] = Landmark{45.0, 52.0, Visibility::kVisible};
  lms.slots[1] = Landmark{55.0, 48.0, Visibility::kOccluded};
  lms.slots[6] = Landmark{50.0, 58.5, Visibility::kVisible};

  for (double theta : {0.3, 1.1, 2.7, -0.9}) {
    CAPTURE(theta);
    const LandmarkSet fwd = rotate_landmarks(lms, theta, 49.5, 49.5, 100, 100);
    const LandmarkSet back =
        rotate_landmarks(fwd, -theta, 49.5, 49.5, 100, 100);
    for (std::size_t i : {0ULL, 1ULL, 6ULL}) {
      REQUIRE(back.slots[i].has_value());
      CHECK(back.slots[i]->x == doctest::Approx(lms.slots[i]->x).epsilon(1e-9));
      CHECK(back.slots[i]->y == doctest::Approx(lms.slots[i]->y).epsilon(1e-9));
      CHECK(back.slots[i]->visibility == lms.slots[i]->visibility);
    }
  }
}

TEST_CASE("landmarks leaving the canvas become out-of-frame but keep coords") {
  const LandmarkSet lms = single_landmark(0, 0.0, 0.0);
  const double quarter = std::acos(0.0);
  const LandmarkSet out =
      rotate_landmarks(lms, quarter / 2.0, 49.5, 49.5, 100, 100);
  REQUIRE(out.slots[0].has_value());
  CHECK(out.slots[0]->visibility == Visibility::kOutOfFrame);
  CHECK(out.slots[0]->x == doctest::Approx(49.5).epsilon(1e-9));
  CHECK(out.slots[0]->y ==
        doctest::Approx(49.5 - 49.5 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("rotation never upgrades visibility") {
  LandmarkSet lms;
  lms.slots[2] = Landmark{10.0, 10.0, Visibility::kOutOfFrame};
  lms.slots[3] = Landmark{20.0, 20.0, Visibility::kOccluded};
  // Identity rotation: both end up well inside the frame.
  const LandmarkSet out = rotate_landmarks(lms, 0.0, 15.0, 15.0, 64, 64);
  CHECK(out.slots[2]->visibility == Visibility::kOutOfFrame);
  CHECK(out.slots[3]->visibility == Visibility::kOccluded);
  CHECK(!out.slots[0].has_value());
}
