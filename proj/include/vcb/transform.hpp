#pragma once

#include <array>
#include <cstdint>

#include "vcb/errors.hpp"
#include "vcb/frame.hpp"

namespace vcb {

/// Row-major 8x8 block of real samples.
using Block8 = std::array<double, 64>;

/// Quantized coefficients of one block.
using QuantBlock = std::array<int32_t, 64>;

/// Base quantization step per DCT coefficient; all entries >= 1.
struct QuantMatrix {
  std::array<int32_t, 64> step{};
};

/// Standard JPEG luminance / chrominance tables.
const QuantMatrix &jpeg_luma_quant();
const QuantMatrix &jpeg_chroma_quant();

/// Quality knob, 0 (best) .. 51 (worst).
struct Crf {
  int value = 23;

  Crf() = default;
  explicit Crf(int v) : value(v) {
    if (v < 0 || v > 51)
      throw InvalidInput("crf must be in [0, 51], got " + std::to_string(v));
  }
  bool operator==(const Crf &) const = default;
};

/// 2^((crf - 23) / 6): quality halves every +6, anchored at the common
/// default of 23.
double crf_to_qscale(Crf crf);

/// Orthonormal 2-D DCT-II and its inverse. idct8(dct8(x)) == x to ~1e-13.
Block8 dct8(const Block8 &block);
Block8 idct8(const Block8 &block);

/// q_i = round_half_away(c_i / max(1, qm_i * qscale)).
QuantBlock quantize(const Block8 &block, const QuantMatrix &qm, double qscale);
Block8 dequantize(const QuantBlock &block, const QuantMatrix &qm, double qscale);

/// Effective step for one coefficient: max(1, base * qscale).
inline double effective_step(int32_t base, double qscale) {
  double s = base * qscale;
  return s < 1.0 ? 1.0 : s;
}

/// JPEG zigzag scan order: zigzag_order()[scan_pos] = block index.
const std::array<int, 64> &zigzag_order();

std::array<double, 64> zigzag(const Block8 &block);
Block8 unzigzag(const std::array<double, 64> &scan);

/// Luma-plane PSNR in dB, MSE pooled over all frames. Returns +infinity
/// for identical luma content.
double psnr(const Clip &a, const Clip &b);

/// MSE over luma planes (pooled across frames).
double luma_mse(const Clip &a, const Clip &b);

} // namespace vcb
