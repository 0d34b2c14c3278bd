#pragma once

#include <cstdint>
#include <vector>

#include "vcb/frame.hpp"
#include "vcb/transform.hpp"

namespace vcb::kernels {

/// Integer-pel displacement of one 16x16 block. Prediction fetches
/// reference at (x - dx, y - dy) with edge clamping, so a vector of
/// (+2, 0) means the content moved two pixels to the right.
struct Mv {
  int8_t dx = 0;
  int8_t dy = 0;
  bool operator==(const Mv &) const = default;
};

struct MotionField {
  int blocks_x = 0;
  int blocks_y = 0;
  std::vector<Mv> mv;
};

/// Exhaustive SAD search over [-range, +range]^2 per 16x16 block of the
/// target. Ties: smallest SAD, then smallest |dx|+|dy|, then lexicographic
/// (dy, dx). Optimized path visits candidates in tie-break order with
/// early SAD abort; results are identical to the serial reference.
MotionField motion_search(const Plane &ref, const Plane &target, int range,
                          bool parallel = true);

/// pred(x, y) = ref(x - dx, y - dy) clamped; `block` is the block edge in
/// this plane (16 luma, 8 chroma), `mv_div` divides vectors (1 luma,
/// 2 chroma, truncation toward zero).
Plane motion_compensate(const Plane &ref, const MotionField &field, int block,
                        int mv_div, bool parallel = true);

/// Forward DCT + quantization of every 8x8 block of a residual plane
/// (row-major int16, dimensions multiples of 8). Emits 64 coefficients per
/// block in block raster order. Skips blocks whose energy provably
/// quantizes to all zeros (Parseval bound); output matches the reference
/// exactly.
void quantize_plane(const int16_t *residual, int w, int h,
                    const QuantMatrix &qm, double qscale,
                    std::vector<QuantBlock> &out, bool parallel = true);

/// Dequantize + inverse DCT + add prediction, rounded half-away and
/// clamped to [0,255].
Plane reconstruct_plane(const std::vector<QuantBlock> &coeffs,
                        const Plane &prediction, const QuantMatrix &qm,
                        double qscale, bool parallel = true);

/// Separable resample of one plane: area-weighted box filter on axes that
/// shrink, bilinear on axes that grow.
Plane rescale_plane(const Plane &src, int out_w, int out_h,
                    bool parallel = true);

/// Per-block AC and high-frequency (u+v >= 4) DCT energy of a luma plane,
/// level-shifted by -128. Partial edge blocks are skipped. Outputs are
/// indexed by block, so parallel and serial runs agree bitwise.
struct BlockEnergy {
  double ac = 0;
  double hf = 0;
};
std::vector<BlockEnergy> block_energies(const Plane &luma,
                                        bool parallel = true);

/// Straightforward single-threaded implementations kept as oracles for the
/// optimized kernels above.
namespace serial_ref {

MotionField motion_search(const Plane &ref, const Plane &target, int range);

void quantize_plane(const int16_t *residual, int w, int h,
                    const QuantMatrix &qm, double qscale,
                    std::vector<QuantBlock> &out);

Plane reconstruct_plane(const std::vector<QuantBlock> &coeffs,
                        const Plane &prediction, const QuantMatrix &qm,
                        double qscale);

Plane rescale_plane(const Plane &src, int out_w, int out_h);

std::vector<BlockEnergy> block_energies(const Plane &luma);

} // namespace serial_ref

} // namespace vcb::kernels
