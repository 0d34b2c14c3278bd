#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "vcb/kernels.hpp"
#include "vcb/rng.hpp"

using namespace vcb;
using namespace vcb::kernels;

namespace {

Plane random_plane(uint64_t seed, int w, int h) {
  Rng rng(seed);
  Plane p(w, h);
  for (auto &v : p.samples())
    v = static_cast<uint8_t>(rng.next_u64());
  return p;
}

Plane smooth_plane(uint64_t seed, int w, int h) {
  Rng rng(seed);
  Plane p(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      p.at(x, y) = static_cast<uint8_t>(
          128 + 40 * std::sin(x * 0.09 + rng.next_double() * 0.01) +
          30 * std::cos(y * 0.07));
  return p;
}

Plane translate(const Plane &src, int dx, int dy) {
  Plane out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x)
      out.at(x, y) = src.at_clamped(x - dx, y - dy);
  return out;
}

} // namespace

TEST_CASE("optimized motion search equals the serial reference") {
  for (auto [w, h] : {std::pair{64, 48}, {80, 64}, {72, 40}}) {
    for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      const Plane ref = random_plane(seed, w, h);
      const Plane tgt = random_plane(seed + 100, w, h);
      const MotionField fast = motion_search(ref, tgt, 7, true);
      const MotionField slow = serial_ref::motion_search(ref, tgt, 7);
      REQUIRE(fast.mv.size() == slow.mv.size());
      for (size_t i = 0; i < fast.mv.size(); ++i)
        CHECK(fast.mv[i] == slow.mv[i]);
    }
  }
}

TEST_CASE("motion search equality holds on smooth planes with real motion") {
  const Plane ref = smooth_plane(9, 96, 64);
  for (auto [dx, dy] : {std::pair{2, 0}, {-3, 1}, {5, -4}, {0, 0}}) {
    const Plane tgt = translate(ref, dx, dy);
    const MotionField fast = motion_search(ref, tgt, 7, true);
    const MotionField slow = serial_ref::motion_search(ref, tgt, 7);
    for (size_t i = 0; i < fast.mv.size(); ++i)
      CHECK(fast.mv[i] == slow.mv[i]);
  }
}

TEST_CASE("static frame yields all-zero vectors") {
  const Plane ref = random_plane(5, 64, 64);
  const MotionField f = motion_search(ref, ref, 7);
  for (const Mv &mv : f.mv) {
    CHECK(mv.dx == 0);
    CHECK(mv.dy == 0);
  }
}

TEST_CASE("pure translation is recovered on interior blocks") {
  const Plane ref = smooth_plane(11, 96, 96);
  const Plane tgt = translate(ref, 2, 0);
  const MotionField f = motion_search(ref, tgt, 7);
  // Interior blocks (not touching the replicated left edge).
  for (int by = 1; by + 1 < f.blocks_y; ++by)
    for (int bx = 1; bx + 1 < f.blocks_x; ++bx) {
      const Mv mv = f.mv[by * f.blocks_x + bx];
      CHECK(mv.dx == 2);
      CHECK(mv.dy == 0);
    }
}

TEST_CASE("constant planes tie-break to the zero vector") {
  const Plane a(64, 64, 100);
  const MotionField f = motion_search(a, a, 7);
  for (const Mv &mv : f.mv) {
    CHECK(mv.dx == 0);
    CHECK(mv.dy == 0);
  }
}

TEST_CASE("quantize_plane with the zero-block shortcut matches the reference") {
  Rng rng(21);
  const int w = 64, h = 48;
  for (double qscale : {0.07, 1.0, 5.65, 22.6}) {
    std::vector<int16_t> residual(w * h);
    for (auto &v : residual) {
      // Mix of near-zero and active blocks to exercise the skip path.
      const double roll = rng.next_double();
      v = static_cast<int16_t>(roll < 0.5 ? rng.next_below(3) - 1
                                          : rng.next_below(255) - 127);
    }
    std::vector<QuantBlock> fast, slow;
    quantize_plane(residual.data(), w, h, jpeg_luma_quant(), qscale, fast, true);
    serial_ref::quantize_plane(residual.data(), w, h, jpeg_luma_quant(), qscale,
                               slow);
    REQUIRE(fast.size() == slow.size());
    for (size_t i = 0; i < fast.size(); ++i)
      CHECK(fast[i] == slow[i]);
  }
}

TEST_CASE("reconstruct_plane matches the reference bit for bit") {
  Rng rng(22);
  const int w = 64, h = 48;
  const Plane pred = random_plane(23, w, h);
  std::vector<int16_t> residual(w * h);
  for (auto &v : residual)
    v = static_cast<int16_t>(rng.next_below(100) - 50);
  for (double qscale : {0.5, 2.0, 22.6}) {
    std::vector<QuantBlock> coeffs;
    quantize_plane(residual.data(), w, h, jpeg_luma_quant(), qscale, coeffs);
    const Plane fast = reconstruct_plane(coeffs, pred, jpeg_luma_quant(), qscale, true);
    const Plane slow = serial_ref::reconstruct_plane(coeffs, pred,
                                                     jpeg_luma_quant(), qscale);
    CHECK(fast == slow);
  }
}

TEST_CASE("motion compensation applies vectors with edge clamping") {
  const Plane ref = smooth_plane(31, 64, 48);
  MotionField field;
  field.blocks_x = 4;
  field.blocks_y = 3;
  field.mv.assign(12, Mv{3, -2});
  const Plane pred = motion_compensate(ref, field, 16, 1);
  for (int y = 8; y < 40; ++y)
    for (int x = 8; x < 56; ++x)
      CHECK(pred.at(x, y) == ref.at_clamped(x - 3, y + 2));
  // Chroma-style halving truncates toward zero.
  const Plane cpred = motion_compensate(ref, field, 8, 2);
  CHECK(cpred.at(20, 20) == ref.at_clamped(20 - 1, 20 + 1));
}

TEST_CASE("rescale_plane is thread-count independent") {
  const Plane src = random_plane(77, 90, 62);
  for (auto [w, h] : {std::pair{45, 30}, {180, 124}, {64, 124}}) {
    const Plane a = rescale_plane(src, w, h, true);
    const Plane b = serial_ref::rescale_plane(src, w, h);
    CHECK(a == b);
  }
}

TEST_CASE("block energies are thread-count independent and sane") {
  const Plane src = random_plane(88, 64, 64);
  const auto a = block_energies(src, true);
  const auto b = serial_ref::block_energies(src);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].ac == b[i].ac);
    CHECK(a[i].hf == b[i].hf);
    CHECK(a[i].hf <= a[i].ac);
    CHECK(a[i].ac >= 0.0);
  }
  const Plane flat(64, 64, 77);
  for (const auto &e : block_energies(flat)) {
    CHECK(e.ac < 1e-18);
    CHECK(e.hf < 1e-18);
  }
}

TEST_CASE("mismatched planes are rejected") {
  const Plane a(32, 32, 0);
  const Plane b(32, 16, 0);
  CHECK_THROWS_AS(motion_search(a, b, 7), InvalidInput);
}
