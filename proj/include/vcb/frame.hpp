#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "vcb/errors.hpp"

namespace vcb {

struct Fraction {
  uint32_t num = 25;
  uint32_t den = 1;

  double to_double() const { return static_cast<double>(num) / den; }
  bool operator==(const Fraction &) const = default;
};

/// Row-major 8-bit sample plane.
class Plane {
public:
  Plane() = default;
  Plane(int width, int height, uint8_t fill = 0)
      : w_(width), h_(height),
        data_(static_cast<size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0)
      throw InvalidInput("plane dimensions must be positive");
  }

  int width() const { return w_; }
  int height() const { return h_; }

  uint8_t at(int x, int y) const { return data_[idx(x, y)]; }
  uint8_t &at(int x, int y) { return data_[idx(x, y)]; }

  /// Edge-replicated fetch: coordinates clamped into the plane.
  uint8_t at_clamped(int x, int y) const {
    if (x < 0) x = 0;
    if (x >= w_) x = w_ - 1;
    if (y < 0) y = 0;
    if (y >= h_) y = h_ - 1;
    return data_[idx(x, y)];
  }

  const uint8_t *row(int y) const { return data_.data() + static_cast<size_t>(y) * w_; }
  uint8_t *row(int y) { return data_.data() + static_cast<size_t>(y) * w_; }

  const std::vector<uint8_t> &samples() const { return data_; }
  std::vector<uint8_t> &samples() { return data_; }

  bool operator==(const Plane &) const = default;

private:
  size_t idx(int x, int y) const { return static_cast<size_t>(y) * w_ + x; }

  int w_ = 0, h_ = 0;
  std::vector<uint8_t> data_;
};

/// Planar YCbCr 4:2:0 frame. Width and height are even; chroma planes are
/// half resolution in each dimension.
struct Frame {
  Plane y, cb, cr;

  Frame() = default;
  Frame(int width, int height, uint8_t luma = 0, uint8_t chroma = 128)
      : y(width, height, luma), cb(width / 2, height / 2, chroma),
        cr(width / 2, height / 2, chroma) {
    if (width % 2 != 0 || height % 2 != 0)
      throw InvalidInput("frame dimensions must be even (4:2:0)");
  }

  int width() const { return y.width(); }
  int height() const { return y.height(); }

  bool operator==(const Frame &) const = default;
};

/// Ordered frames plus a frame rate. All frames share one geometry.
struct Clip {
  std::vector<Frame> frames;
  Fraction fps{25, 1};

  int width() const { return frames.empty() ? 0 : frames.front().width(); }
  int height() const { return frames.empty() ? 0 : frames.front().height(); }
  int frame_count() const { return static_cast<int>(frames.size()); }
  double duration_seconds() const {
    return frame_count() / fps.to_double();
  }

  void validate() const;

  bool operator==(const Clip &) const = default;
};

/// Interleaved 8-bit RGB image; buffer length 3*width*height.
struct RgbImage {
  int width = 0, height = 0;
  std::vector<uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h) {
    if (w <= 0 || h <= 0)
      throw InvalidInput("image dimensions must be positive");
    data.assign(static_cast<size_t>(3) * w * h, 0);
  }

  uint8_t &at(int x, int y, int c) {
    return data[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  uint8_t at(int x, int y, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
};

/// Symmetric rounding used throughout the pipeline.
inline double round_half_away(double v) {
  return v >= 0.0 ? std::floor(v + 0.5) : std::ceil(v - 0.5);
}

inline uint8_t clamp_u8(double v) {
  double r = round_half_away(v);
  if (r < 0.0) return 0;
  if (r > 255.0) return 255;
  return static_cast<uint8_t>(r);
}

/// BT.601 full-range conversion with 2x2 box-averaged 4:2:0 chroma.
/// Odd dimensions are padded to even by edge replication.
Frame rgb_to_ycbcr(const RgbImage &img);

/// Inverse BT.601 with nearest-neighbor chroma upsampling.
RgbImage ycbcr_to_rgb(const Frame &frame);

/// Aspect-preserving rescale to the target height. Width is rounded to the
/// nearest even integer (minimum 16). Downscale uses an area-weighted box
/// filter, upscale bilinear, decided per axis.
Clip rescale(const Clip &clip, int target_height);

Frame rescale_frame(const Frame &frame, int out_width, int out_height);

} // namespace vcb
