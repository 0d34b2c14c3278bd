#include "vcb/frame.hpp"

#include "vcb/kernels.hpp"

namespace vcb {

void Clip::validate() const {
  if (frames.empty())
    throw InvalidInput("clip must contain at least one frame");
  if (fps.num == 0 || fps.den == 0)
    throw InvalidInput("clip fps must be positive");
  const int w = frames.front().width();
  const int h = frames.front().height();
  for (const Frame &f : frames) {
    if (f.width() != w || f.height() != h)
      throw InvalidInput("all frames in a clip must share dimensions");
  }
}

namespace {

// Full-range BT.601 forward coefficients.
struct Ycc {
  double y, cb, cr;
};

Ycc rgb_pixel_to_ycc(double r, double g, double b) {
  Ycc out;
  out.y = 0.299 * r + 0.587 * g + 0.114 * b;
  out.cb = -0.168735891647856 * r - 0.331264108352144 * g + 0.5 * b + 128.0;
  out.cr = 0.5 * r - 0.418687589158345 * g - 0.081312410841655 * b + 128.0;
  return out;
}

} // namespace

Frame rgb_to_ycbcr(const RgbImage &img) {
  if (img.width <= 0 || img.height <= 0)
    throw InvalidInput("rgb image has zero dimension");
  if (img.data.size() != static_cast<size_t>(3) * img.width * img.height)
    throw InvalidInput("rgb buffer length does not match dimensions");

  // Pad odd dimensions to even by replicating the last row/column.
  const int w = img.width + (img.width & 1);
  const int h = img.height + (img.height & 1);

  Frame frame(w, h);
  std::vector<double> cb_full(static_cast<size_t>(w) * h);
  std::vector<double> cr_full(static_cast<size_t>(w) * h);

  for (int y = 0; y < h; ++y) {
    const int sy = y < img.height ? y : img.height - 1;
    for (int x = 0; x < w; ++x) {
      const int sx = x < img.width ? x : img.width - 1;
      const Ycc p = rgb_pixel_to_ycc(img.at(sx, sy, 0), img.at(sx, sy, 1),
                                     img.at(sx, sy, 2));
      frame.y.at(x, y) = clamp_u8(p.y);
      cb_full[static_cast<size_t>(y) * w + x] = p.cb;
      cr_full[static_cast<size_t>(y) * w + x] = p.cr;
    }
  }

  // 2x2 box average before the single rounding step.
  for (int cy = 0; cy < h / 2; ++cy) {
    for (int cx = 0; cx < w / 2; ++cx) {
      const size_t i00 = static_cast<size_t>(2 * cy) * w + 2 * cx;
      const size_t i10 = i00 + 1;
      const size_t i01 = i00 + w;
      const size_t i11 = i01 + 1;
      frame.cb.at(cx, cy) =
          clamp_u8((cb_full[i00] + cb_full[i10] + cb_full[i01] + cb_full[i11]) / 4.0);
      frame.cr.at(cx, cy) =
          clamp_u8((cr_full[i00] + cr_full[i10] + cr_full[i01] + cr_full[i11]) / 4.0);
    }
  }
  return frame;
}

RgbImage ycbcr_to_rgb(const Frame &frame) {
  RgbImage img(frame.width(), frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const double yy = frame.y.at(x, y);
      const double cb = frame.cb.at(x / 2, y / 2) - 128.0;
      const double cr = frame.cr.at(x / 2, y / 2) - 128.0;
      img.at(x, y, 0) = clamp_u8(yy + 1.402 * cr);
      img.at(x, y, 1) = clamp_u8(yy - 0.344136286201022 * cb - 0.714136286201022 * cr);
      img.at(x, y, 2) = clamp_u8(yy + 1.772 * cb);
    }
  }
  return img;
}

namespace {

// Round-half-up of num/den, in exact integer arithmetic.
int64_t div_round(int64_t num, int64_t den) { return (num + den / 2) / den; }

// Nearest even integer to num/den (ties away from zero), floored at 16.
int nearest_even_dim(int64_t num, int64_t den) {
  int64_t half = div_round(num, 2 * den);
  int64_t v = 2 * half;
  return static_cast<int>(v < 16 ? 16 : v);
}

} // namespace

Frame rescale_frame(const Frame &frame, int out_width, int out_height) {
  if (out_width % 2 != 0 || out_height % 2 != 0)
    throw InvalidInput("rescale target dimensions must be even");
  Frame out;
  out.y = kernels::rescale_plane(frame.y, out_width, out_height);
  out.cb = kernels::rescale_plane(frame.cb, out_width / 2, out_height / 2);
  out.cr = kernels::rescale_plane(frame.cr, out_width / 2, out_height / 2);
  return out;
}

Clip rescale(const Clip &clip, int target_height) {
  clip.validate();
  if (target_height < 16)
    throw InvalidInput("rescale target height must be >= 16, got " +
                       std::to_string(target_height));

  const int src_w = clip.width();
  const int src_h = clip.height();
  const int out_h = nearest_even_dim(target_height, 1);
  const int out_w = nearest_even_dim(static_cast<int64_t>(src_w) * out_h, src_h);

  if (out_w == src_w && out_h == src_h)
    return clip;

  Clip out;
  out.fps = clip.fps;
  out.frames.resize(clip.frames.size());
  for (size_t i = 0; i < clip.frames.size(); ++i)
    out.frames[i] = rescale_frame(clip.frames[i], out_w, out_h);
  return out;
}

} // namespace vcb
