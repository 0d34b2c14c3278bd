#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vcb/frame.hpp"

using namespace vcb;

namespace {

// Independent oracle: direct BT.601 full-range matrix, no subsampling.
void bt601_oracle(double r, double g, double b, double &y, double &cb,
                  double &cr) {
  y = 0.299 * r + 0.587 * g + 0.114 * b;
  cb = 128.0 + (b - y) / 1.772;
  cr = 128.0 + (r - y) / 1.402;
}

RgbImage solid_rgb(int w, int h, uint8_t r, uint8_t g, uint8_t b) {
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      img.at(x, y, 0) = r;
      img.at(x, y, 1) = g;
      img.at(x, y, 2) = b;
    }
  return img;
}

Clip solid_clip(int w, int h, int frames, uint8_t luma, uint8_t chroma = 128) {
  Clip c;
  for (int i = 0; i < frames; ++i)
    c.frames.emplace_back(w, h, luma, chroma);
  return c;
}

} // namespace

TEST_CASE("white maps to max luma, neutral chroma") {
  const Frame f = rgb_to_ycbcr(solid_rgb(16, 16, 255, 255, 255));
  for (uint8_t v : f.y.samples())
    CHECK(v == 255);
  for (uint8_t v : f.cb.samples())
    CHECK(v == 128);
  for (uint8_t v : f.cr.samples())
    CHECK(v == 128);
}

TEST_CASE("black maps to zero luma, neutral chroma") {
  const Frame f = rgb_to_ycbcr(solid_rgb(16, 16, 0, 0, 0));
  for (uint8_t v : f.y.samples())
    CHECK(v == 0);
  for (uint8_t v : f.cb.samples())
    CHECK(v == 128);
  for (uint8_t v : f.cr.samples())
    CHECK(v == 128);
}

TEST_CASE("pure red against the direct matrix oracle") {
  double oy, ocb, ocr;
  bt601_oracle(255, 0, 0, oy, ocb, ocr);
  const Frame f = rgb_to_ycbcr(solid_rgb(8, 8, 255, 0, 0));
  const uint8_t ey = static_cast<uint8_t>(round_half_away(oy));
  const uint8_t ecb = static_cast<uint8_t>(round_half_away(ocb));
  const uint8_t ecr = ocr > 255 ? 255 : static_cast<uint8_t>(round_half_away(ocr));
  CHECK(f.y.at(0, 0) == ey);
  CHECK(f.cb.at(0, 0) == ecb);
  CHECK(f.cr.at(0, 0) == ecr);
  CHECK(f.y.at(0, 0) == 76);
  CHECK(f.cr.at(0, 0) == 255); // clamped
}

TEST_CASE("zero-dimension image rejected") {
  RgbImage img;
  img.width = 0;
  img.height = 4;
  CHECK_THROWS_AS(rgb_to_ycbcr(img), InvalidInput);
}

TEST_CASE("odd dimensions padded to even by edge replication") {
  RgbImage img(3, 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 3; ++x)
      for (int c = 0; c < 3; ++c)
        img.at(x, y, c) = static_cast<uint8_t>(40 * x + 10 * y);
  const Frame f = rgb_to_ycbcr(img);
  CHECK(f.width() == 4);
  CHECK(f.height() == 6);
  CHECK(f.y.at(3, 0) == f.y.at(2, 0)); // replicated column
  CHECK(f.y.at(0, 5) == f.y.at(0, 4)); // replicated row
}

TEST_CASE("neutral-chroma round trips") {
  Frame f(8, 8, 255, 128);
  RgbImage white = ycbcr_to_rgb(f);
  for (uint8_t v : white.data)
    CHECK(v == 255);
  Frame black(8, 8, 0, 128);
  for (uint8_t v : ycbcr_to_rgb(black).data)
    CHECK(v == 0);
}

TEST_CASE("gray ramp round trip, exhaustive over all levels") {
  // All 256 gray levels: rgb -> ycbcr -> rgb within 2 per channel, luma
  // within 1.
  RgbImage img(256, 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 256; ++x)
      for (int c = 0; c < 3; ++c)
        img.at(x, y, c) = static_cast<uint8_t>(x);
  const Frame f = rgb_to_ycbcr(img);
  for (int x = 0; x < 256; ++x)
    CHECK(std::abs(static_cast<int>(f.y.at(x, 0)) - x) <= 1);
  const RgbImage back = ycbcr_to_rgb(f);
  int max_err = 0;
  for (int x = 0; x < 256; ++x)
    for (int c = 0; c < 3; ++c)
      max_err = std::max(max_err, std::abs(static_cast<int>(back.at(x, 0, c)) - x));
  CHECK(max_err <= 2);
}

TEST_CASE("rescale at the same geometry is the identity") {
  Clip c = solid_clip(1280, 720, 2, 90);
  c.frames[0].y.at(5, 5) = 17;
  const Clip out = rescale(c, 720);
  CHECK(out == c);
}

TEST_CASE("1280x720 to target 240 gives 426x240") {
  // Oracle: 1280 * 240 / 720 = 426.67, nearest even integer 426.
  const Clip c = solid_clip(1280, 720, 1, 100);
  const Clip out = rescale(c, 240);
  CHECK(out.width() == 426);
  CHECK(out.height() == 240);
}

TEST_CASE("constant 2x2 frame upscales to constant") {
  const Clip c = solid_clip(2, 2, 1, 100);
  const Clip out = rescale(c, 16);
  CHECK(out.height() == 16);
  CHECK(out.width() == 16); // square aspect preserved
  for (uint8_t v : out.frames[0].y.samples())
    CHECK(v == 100);
}

TEST_CASE("rescale rejects tiny targets") {
  const Clip c = solid_clip(64, 64, 1, 100);
  CHECK_THROWS_AS(rescale(c, 15), InvalidInput);
}

TEST_CASE("rescale is idempotent at a fixed target") {
  Clip c;
  for (int i = 0; i < 3; ++i) {
    Frame f(64, 48);
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 64; ++x)
        f.y.at(x, y) = static_cast<uint8_t>((x * 7 + y * 13 + i * 31) & 0xFF);
    c.frames.push_back(f);
  }
  const Clip once = rescale(c, 32);
  const Clip twice = rescale(once, 32);
  CHECK(once == twice);
}

TEST_CASE("rescale of a constant clip stays constant, both directions") {
  for (int target : {24, 96}) {
    const Clip out = rescale(solid_clip(48, 48, 2, 137), target);
    for (const Frame &f : out.frames)
      for (uint8_t v : f.y.samples())
        CHECK(v == 137);
  }
}

TEST_CASE("clip validation catches mixed dimensions and bad fps") {
  Clip c;
  c.frames.emplace_back(16, 16);
  c.frames.emplace_back(32, 16);
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  Clip empty;
  CHECK_THROWS_AS(empty.validate(), InvalidInput);
  Clip bad_fps = solid_clip(16, 16, 1, 10);
  bad_fps.fps = Fraction{0, 1};
  CHECK_THROWS_AS(bad_fps.validate(), InvalidInput);
}

TEST_CASE("frames reject odd geometry") {
  CHECK_THROWS_AS(Frame(15, 16), InvalidInput);
  CHECK_THROWS_AS(Frame(16, 15), InvalidInput);
}
