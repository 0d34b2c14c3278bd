#include "vcb/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

namespace vcb::kernels {

namespace {

struct Candidate {
  int dx, dy;
};

// Candidates sorted by the tie-break key after SAD: (|dx|+|dy|, dy, dx).
// Visiting them in this order lets the search keep the first strict SAD
// minimum and abort any candidate whose partial SAD already reaches it.
std::vector<Candidate> candidate_order(int range) {
  std::vector<Candidate> cands;
  cands.reserve(static_cast<size_t>(2 * range + 1) * (2 * range + 1));
  for (int dy = -range; dy <= range; ++dy)
    for (int dx = -range; dx <= range; ++dx)
      cands.push_back({dx, dy});
  std::sort(cands.begin(), cands.end(), [](const Candidate &a, const Candidate &b) {
    const int ca = std::abs(a.dx) + std::abs(a.dy);
    const int cb = std::abs(b.dx) + std::abs(b.dy);
    if (ca != cb) return ca < cb;
    if (a.dy != b.dy) return a.dy < b.dy;
    return a.dx < b.dx;
  });
  return cands;
}

int block_sad_clamped(const Plane &ref, const Plane &tgt, int bx, int by,
                      int bw, int bh, int dx, int dy, int abort_at) {
  int sad = 0;
  for (int y = 0; y < bh; ++y) {
    const uint8_t *trow = tgt.row(by + y) + bx;
    for (int x = 0; x < bw; ++x)
      sad += std::abs(static_cast<int>(trow[x]) -
                      ref.at_clamped(bx + x - dx, by + y - dy));
    if (sad >= abort_at)
      return sad;
  }
  return sad;
}

int block_sad_fast(const Plane &ref, const Plane &tgt, int bx, int by, int bw,
                   int bh, int dx, int dy, int abort_at) {
  // Displaced block fully inside the reference: straight row walks.
  const int rx = bx - dx;
  const int ry = by - dy;
  if (rx < 0 || ry < 0 || rx + bw > ref.width() || ry + bh > ref.height())
    return block_sad_clamped(ref, tgt, bx, by, bw, bh, dx, dy, abort_at);
  int sad = 0;
  for (int y = 0; y < bh; ++y) {
    const uint8_t *trow = tgt.row(by + y) + bx;
    const uint8_t *rrow = ref.row(ry + y) + rx;
    int row_sum = 0;
    for (int x = 0; x < bw; ++x)
      row_sum += std::abs(static_cast<int>(trow[x]) - static_cast<int>(rrow[x]));
    sad += row_sum;
    if (sad >= abort_at)
      return sad;
  }
  return sad;
}

} // namespace

MotionField motion_search(const Plane &ref, const Plane &target, int range,
                          bool parallel) {
  if (ref.width() != target.width() || ref.height() != target.height())
    throw InvalidInput("motion search requires matching plane dimensions");

  const int w = target.width();
  const int h = target.height();
  MotionField field;
  field.blocks_x = (w + 15) / 16;
  field.blocks_y = (h + 15) / 16;
  field.mv.assign(static_cast<size_t>(field.blocks_x) * field.blocks_y, Mv{});
  if (range == 0)
    return field;

  const std::vector<Candidate> cands = candidate_order(range);
  const int nblocks = field.blocks_x * field.blocks_y;

#pragma omp parallel for schedule(static) if (parallel)
  for (int b = 0; b < nblocks; ++b) {
    const int bx = (b % field.blocks_x) * 16;
    const int by = (b / field.blocks_x) * 16;
    const int bw = std::min(16, w - bx);
    const int bh = std::min(16, h - by);

    int best_sad = std::numeric_limits<int>::max();
    Mv best;
    for (const Candidate &c : cands) {
      const int sad =
          block_sad_fast(ref, target, bx, by, bw, bh, c.dx, c.dy, best_sad);
      if (sad < best_sad) {
        best_sad = sad;
        best = Mv{static_cast<int8_t>(c.dx), static_cast<int8_t>(c.dy)};
        if (best_sad == 0)
          break; // nothing later in tie-break order can win
      }
    }
    field.mv[b] = best;
  }
  return field;
}

Plane motion_compensate(const Plane &ref, const MotionField &field, int block,
                        int mv_div, bool parallel) {
  Plane out(ref.width(), ref.height());
  const int w = ref.width();
  const int h = ref.height();
  const int nblocks = field.blocks_x * field.blocks_y;

#pragma omp parallel for schedule(static) if (parallel)
  for (int b = 0; b < nblocks; ++b) {
    const Mv mv = field.mv[b];
    const int dx = mv.dx / mv_div; // toward zero, same both sides
    const int dy = mv.dy / mv_div;
    const int bx = (b % field.blocks_x) * block;
    const int by = (b / field.blocks_x) * block;
    const int bw = std::min(block, w - bx);
    const int bh = std::min(block, h - by);
    if (bw <= 0 || bh <= 0)
      continue;
    if (bx - dx >= 0 && by - dy >= 0 && bx - dx + bw <= w && by - dy + bh <= h) {
      for (int y = 0; y < bh; ++y)
        std::memcpy(out.row(by + y) + bx, ref.row(by + y - dy) + bx - dx,
                    static_cast<size_t>(bw));
    } else {
      for (int y = 0; y < bh; ++y)
        for (int x = 0; x < bw; ++x)
          out.at(bx + x, by + y) = ref.at_clamped(bx + x - dx, by + y - dy);
    }
  }
  return out;
}

namespace {

void encode_block(const int16_t *residual, int w, int bx, int by,
                  const QuantMatrix &qm, double qscale, double min_step,
                  QuantBlock &out) {
  int64_t sum_sq = 0;
  int16_t vals[64];
  for (int y = 0; y < 8; ++y) {
    const int16_t *row = residual + static_cast<size_t>(by + y) * w + bx;
    for (int x = 0; x < 8; ++x) {
      vals[y * 8 + x] = row[x];
      sum_sq += static_cast<int64_t>(row[x]) * row[x];
    }
  }
  // Parseval: max |coeff| <= l2(residual), so the whole block quantizes to
  // zero whenever l2 < step/2. Margin guards the float comparison.
  const double half_step = 0.5 * min_step * (1.0 - 1e-9);
  if (static_cast<double>(sum_sq) < half_step * half_step) {
    out.fill(0);
    return;
  }
  Block8 b;
  for (int i = 0; i < 64; ++i)
    b[i] = vals[i];
  out = quantize(dct8(b), qm, qscale);
}

} // namespace

void quantize_plane(const int16_t *residual, int w, int h,
                    const QuantMatrix &qm, double qscale,
                    std::vector<QuantBlock> &out, bool parallel) {
  if (w % 8 != 0 || h % 8 != 0)
    throw InvalidInput("quantize_plane requires dimensions divisible by 8");
  const int bx_count = w / 8;
  const int by_count = h / 8;
  const int nblocks = bx_count * by_count;
  out.resize(nblocks);

  double min_step = std::numeric_limits<double>::max();
  for (int i = 0; i < 64; ++i)
    min_step = std::min(min_step, effective_step(qm.step[i], qscale));

#pragma omp parallel for schedule(static) if (parallel)
  for (int b = 0; b < nblocks; ++b)
    encode_block(residual, w, (b % bx_count) * 8, (b / bx_count) * 8, qm,
                 qscale, min_step, out[b]);
}

Plane reconstruct_plane(const std::vector<QuantBlock> &coeffs,
                        const Plane &prediction, const QuantMatrix &qm,
                        double qscale, bool parallel) {
  const int w = prediction.width();
  const int h = prediction.height();
  if (w % 8 != 0 || h % 8 != 0)
    throw InvalidInput("reconstruct_plane requires dimensions divisible by 8");
  const int bx_count = w / 8;
  const int nblocks = bx_count * (h / 8);
  if (static_cast<int>(coeffs.size()) != nblocks)
    throw InvalidInput("coefficient block count does not match plane");

  Plane out(w, h);
#pragma omp parallel for schedule(static) if (parallel)
  for (int b = 0; b < nblocks; ++b) {
    const int bx = (b % bx_count) * 8;
    const int by = (b / bx_count) * 8;
    const QuantBlock &q = coeffs[b];
    bool all_zero = true;
    for (int i = 0; i < 64; ++i)
      if (q[i] != 0) {
        all_zero = false;
        break;
      }
    if (all_zero) {
      // idct of zeros is exactly zero; reconstruction equals prediction.
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          out.at(bx + x, by + y) = prediction.at(bx + x, by + y);
      continue;
    }
    const Block8 rec = idct8(dequantize(q, qm, qscale));
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x)
        out.at(bx + x, by + y) =
            clamp_u8(rec[y * 8 + x] + prediction.at(bx + x, by + y));
  }
  return out;
}

namespace {

// Horizontal resample of one row span into doubles.
void resample_axis(const double *src, int n_src, double *dst, int n_dst) {
  if (n_dst == n_src) {
    std::copy(src, src + n_src, dst);
    return;
  }
  if (n_dst < n_src) {
    // Area-weighted box filter.
    const double scale = static_cast<double>(n_src) / n_dst;
    for (int o = 0; o < n_dst; ++o) {
      const double a = o * scale;
      const double b = a + scale;
      double acc = 0;
      int i = static_cast<int>(std::floor(a));
      for (; i < n_src && i < b; ++i) {
        const double lo = std::max(a, static_cast<double>(i));
        const double hi = std::min(b, static_cast<double>(i + 1));
        if (hi > lo)
          acc += src[i] * (hi - lo);
      }
      dst[o] = acc / scale;
    }
  } else {
    // Bilinear, center-aligned.
    const double scale = static_cast<double>(n_src) / n_dst;
    for (int o = 0; o < n_dst; ++o) {
      const double pos = (o + 0.5) * scale - 0.5;
      int i0 = static_cast<int>(std::floor(pos));
      const double f = pos - i0;
      int i1 = i0 + 1;
      if (i0 < 0) i0 = 0;
      if (i1 < 0) i1 = 0;
      if (i0 > n_src - 1) i0 = n_src - 1;
      if (i1 > n_src - 1) i1 = n_src - 1;
      dst[o] = src[i0] * (1.0 - f) + src[i1] * f;
    }
  }
}

} // namespace

Plane rescale_plane(const Plane &src, int out_w, int out_h, bool parallel) {
  if (out_w <= 0 || out_h <= 0)
    throw InvalidInput("rescale_plane target must be positive");
  if (out_w == src.width() && out_h == src.height())
    return src;

  const int sw = src.width();
  const int sh = src.height();

  // Horizontal pass into a double buffer, then vertical, then one rounding.
  std::vector<double> mid(static_cast<size_t>(out_w) * sh);
#pragma omp parallel for schedule(static) if (parallel)
  for (int y = 0; y < sh; ++y) {
    std::vector<double> row(sw);
    const uint8_t *srow = src.row(y);
    for (int x = 0; x < sw; ++x)
      row[x] = srow[x];
    resample_axis(row.data(), sw, mid.data() + static_cast<size_t>(y) * out_w,
                  out_w);
  }

  Plane out(out_w, out_h);
#pragma omp parallel for schedule(static) if (parallel)
  for (int x = 0; x < out_w; ++x) {
    std::vector<double> col(sh), res(out_h);
    for (int y = 0; y < sh; ++y)
      col[y] = mid[static_cast<size_t>(y) * out_w + x];
    resample_axis(col.data(), sh, res.data(), out_h);
    for (int y = 0; y < out_h; ++y)
      out.at(x, y) = clamp_u8(res[y]);
  }
  return out;
}

std::vector<BlockEnergy> block_energies(const Plane &luma, bool parallel) {
  const int bx_count = luma.width() / 8;
  const int by_count = luma.height() / 8;
  const int nblocks = bx_count * by_count;
  std::vector<BlockEnergy> out(nblocks);

#pragma omp parallel for schedule(static) if (parallel)
  for (int b = 0; b < nblocks; ++b) {
    const int bx = (b % bx_count) * 8;
    const int by = (b / bx_count) * 8;
    Block8 blk;
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x)
        blk[y * 8 + x] = luma.at(bx + x, by + y) - 128.0;
    const Block8 f = dct8(blk);
    BlockEnergy e;
    for (int u = 0; u < 8; ++u)
      for (int v = 0; v < 8; ++v) {
        if (u == 0 && v == 0)
          continue;
        const double sq = f[u * 8 + v] * f[u * 8 + v];
        e.ac += sq;
        if (u + v >= 4)
          e.hf += sq;
      }
    out[b] = e;
  }
  return out;
}

} // namespace vcb::kernels
