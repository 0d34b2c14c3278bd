#include "vcb/transform.hpp"

#include <cmath>
#include <limits>

namespace vcb {

namespace {

// Orthonormal DCT-II basis: C[k][n] = a(k) * cos((2n+1) k pi / 16).
struct DctBasis {
  double c[8][8];
  DctBasis() {
    const double pi = 3.14159265358979323846264338327950288;
    for (int k = 0; k < 8; ++k) {
      const double a = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int n = 0; n < 8; ++n)
        c[k][n] = a * std::cos((2 * n + 1) * k * pi / 16.0);
    }
  }
};

const DctBasis &basis() {
  static const DctBasis b;
  return b;
}

const int kJpegLuma[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,  //
    12, 12, 14, 19, 26,  58,  60,  55,  //
    14, 13, 16, 24, 40,  57,  69,  56,  //
    14, 17, 22, 29, 51,  87,  80,  62,  //
    18, 22, 37, 56, 68,  109, 103, 77,  //
    24, 35, 55, 64, 81,  104, 113, 92,  //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99};

const int kJpegChroma[64] = {
    17, 18, 24, 47, 99, 99, 99, 99, //
    18, 21, 26, 66, 99, 99, 99, 99, //
    24, 26, 56, 99, 99, 99, 99, 99, //
    47, 66, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99};

QuantMatrix make_qm(const int *v) {
  QuantMatrix qm;
  for (int i = 0; i < 64; ++i)
    qm.step[i] = v[i];
  return qm;
}

} // namespace

const QuantMatrix &jpeg_luma_quant() {
  static const QuantMatrix qm = make_qm(kJpegLuma);
  return qm;
}

const QuantMatrix &jpeg_chroma_quant() {
  static const QuantMatrix qm = make_qm(kJpegChroma);
  return qm;
}

double crf_to_qscale(Crf crf) {
  return std::exp2((crf.value - 23) / 6.0);
}

Block8 dct8(const Block8 &block) {
  const auto &c = basis().c;
  double tmp[8][8]; // tmp[u][x] = sum_y C[u][y] X[y][x]
  for (int u = 0; u < 8; ++u) {
    for (int x = 0; x < 8; ++x) {
      double s = 0;
      for (int y = 0; y < 8; ++y)
        s += c[u][y] * block[y * 8 + x];
      tmp[u][x] = s;
    }
  }
  Block8 out;
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      double s = 0;
      for (int x = 0; x < 8; ++x)
        s += tmp[u][x] * c[v][x];
      out[u * 8 + v] = s;
    }
  }
  return out;
}

Block8 idct8(const Block8 &block) {
  const auto &c = basis().c;
  double tmp[8][8]; // tmp[y][v] = sum_u C[u][y] F[u][v]
  for (int y = 0; y < 8; ++y) {
    for (int v = 0; v < 8; ++v) {
      double s = 0;
      for (int u = 0; u < 8; ++u)
        s += c[u][y] * block[u * 8 + v];
      tmp[y][v] = s;
    }
  }
  Block8 out;
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      double s = 0;
      for (int v = 0; v < 8; ++v)
        s += tmp[y][v] * c[v][x];
      out[y * 8 + x] = s;
    }
  }
  return out;
}

QuantBlock quantize(const Block8 &block, const QuantMatrix &qm, double qscale) {
  if (!(qscale > 0))
    throw InvalidInput("qscale must be positive");
  QuantBlock out;
  for (int i = 0; i < 64; ++i)
    out[i] = static_cast<int32_t>(
        round_half_away(block[i] / effective_step(qm.step[i], qscale)));
  return out;
}

Block8 dequantize(const QuantBlock &block, const QuantMatrix &qm, double qscale) {
  if (!(qscale > 0))
    throw InvalidInput("qscale must be positive");
  Block8 out;
  for (int i = 0; i < 64; ++i)
    out[i] = block[i] * effective_step(qm.step[i], qscale);
  return out;
}

const std::array<int, 64> &zigzag_order() {
  static const std::array<int, 64> order = [] {
    std::array<int, 64> o{};
    int pos = 0;
    for (int d = 0; d < 15; ++d) {
      const int y_lo = d < 8 ? 0 : d - 7;
      const int y_hi = d < 8 ? d : 7;
      if (d % 2 == 0) {
        for (int y = y_hi; y >= y_lo; --y)
          o[pos++] = y * 8 + (d - y);
      } else {
        for (int y = y_lo; y <= y_hi; ++y)
          o[pos++] = y * 8 + (d - y);
      }
    }
    return o;
  }();
  return order;
}

std::array<double, 64> zigzag(const Block8 &block) {
  const auto &order = zigzag_order();
  std::array<double, 64> out;
  for (int i = 0; i < 64; ++i)
    out[i] = block[order[i]];
  return out;
}

Block8 unzigzag(const std::array<double, 64> &scan) {
  const auto &order = zigzag_order();
  Block8 out;
  for (int i = 0; i < 64; ++i)
    out[order[i]] = scan[i];
  return out;
}

double luma_mse(const Clip &a, const Clip &b) {
  a.validate();
  b.validate();
  if (a.width() != b.width() || a.height() != b.height() ||
      a.frame_count() != b.frame_count())
    throw InvalidInput("psnr requires identical dimensions and frame counts");

  double sum = 0;
  size_t count = 0;
  for (int f = 0; f < a.frame_count(); ++f) {
    const Plane &pa = a.frames[f].y;
    const Plane &pb = b.frames[f].y;
    for (int y = 0; y < pa.height(); ++y) {
      const uint8_t *ra = pa.row(y);
      const uint8_t *rb = pb.row(y);
      for (int x = 0; x < pa.width(); ++x) {
        const double d = static_cast<double>(ra[x]) - rb[x];
        sum += d * d;
      }
    }
    count += static_cast<size_t>(pa.width()) * pa.height();
  }
  return sum / static_cast<double>(count);
}

double psnr(const Clip &a, const Clip &b) {
  const double mse = luma_mse(a, b);
  if (mse == 0.0)
    return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

} // namespace vcb
