#include "vcb/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

// Plain single-threaded implementations, no shortcuts. These exist so the
// optimized kernels have an in-repo oracle; the test suite asserts exact
// agreement and the bench target reports the speedup.

namespace vcb::kernels::serial_ref {

MotionField motion_search(const Plane &ref, const Plane &target, int range) {
  if (ref.width() != target.width() || ref.height() != target.height())
    throw InvalidInput("motion search requires matching plane dimensions");

  const int w = target.width();
  const int h = target.height();
  MotionField field;
  field.blocks_x = (w + 15) / 16;
  field.blocks_y = (h + 15) / 16;
  field.mv.assign(static_cast<size_t>(field.blocks_x) * field.blocks_y, Mv{});

  for (int by = 0; by < field.blocks_y; ++by) {
    for (int bx = 0; bx < field.blocks_x; ++bx) {
      const int x0 = bx * 16;
      const int y0 = by * 16;
      const int bw = std::min(16, w - x0);
      const int bh = std::min(16, h - y0);

      long long best_sad = std::numeric_limits<long long>::max();
      int best_cost = 0, best_dx = 0, best_dy = 0;
      for (int dy = -range; dy <= range; ++dy) {
        for (int dx = -range; dx <= range; ++dx) {
          long long sad = 0;
          for (int y = 0; y < bh; ++y)
            for (int x = 0; x < bw; ++x)
              sad += std::abs(static_cast<int>(target.at(x0 + x, y0 + y)) -
                              ref.at_clamped(x0 + x - dx, y0 + y - dy));
          const int cost = std::abs(dx) + std::abs(dy);
          const bool better =
              sad < best_sad ||
              (sad == best_sad &&
               (cost < best_cost ||
                (cost == best_cost &&
                 (dy < best_dy || (dy == best_dy && dx < best_dx)))));
          if (better) {
            best_sad = sad;
            best_cost = cost;
            best_dx = dx;
            best_dy = dy;
          }
        }
      }
      field.mv[by * field.blocks_x + bx] =
          Mv{static_cast<int8_t>(best_dx), static_cast<int8_t>(best_dy)};
    }
  }
  return field;
}

void quantize_plane(const int16_t *residual, int w, int h,
                    const QuantMatrix &qm, double qscale,
                    std::vector<QuantBlock> &out) {
  if (w % 8 != 0 || h % 8 != 0)
    throw InvalidInput("quantize_plane requires dimensions divisible by 8");
  const int bx_count = w / 8;
  const int by_count = h / 8;
  out.resize(static_cast<size_t>(bx_count) * by_count);

  for (int by = 0; by < by_count; ++by) {
    for (int bx = 0; bx < bx_count; ++bx) {
      Block8 b;
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          b[y * 8 + x] = residual[static_cast<size_t>(by * 8 + y) * w + bx * 8 + x];
      out[by * bx_count + bx] = quantize(dct8(b), qm, qscale);
    }
  }
}

Plane reconstruct_plane(const std::vector<QuantBlock> &coeffs,
                        const Plane &prediction, const QuantMatrix &qm,
                        double qscale) {
  const int w = prediction.width();
  const int h = prediction.height();
  if (w % 8 != 0 || h % 8 != 0)
    throw InvalidInput("reconstruct_plane requires dimensions divisible by 8");
  const int bx_count = w / 8;
  if (coeffs.size() != static_cast<size_t>(bx_count) * (h / 8))
    throw InvalidInput("coefficient block count does not match plane");

  Plane out(w, h);
  for (int by = 0; by < h / 8; ++by) {
    for (int bx = 0; bx < bx_count; ++bx) {
      const Block8 rec = idct8(dequantize(coeffs[by * bx_count + bx], qm, qscale));
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          out.at(bx * 8 + x, by * 8 + y) =
              clamp_u8(rec[y * 8 + x] + prediction.at(bx * 8 + x, by * 8 + y));
    }
  }
  return out;
}

Plane rescale_plane(const Plane &src, int out_w, int out_h) {
  return kernels::rescale_plane(src, out_w, out_h, /*parallel=*/false);
}

std::vector<BlockEnergy> block_energies(const Plane &luma) {
  return kernels::block_energies(luma, /*parallel=*/false);
}

} // namespace vcb::kernels::serial_ref
