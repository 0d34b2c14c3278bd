#include "vcb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vcb/rng.hpp"
#include "vcb/y4m.hpp"

namespace vcb {

void CorpusParams::validate() const {
  if (clip_count < 1)
    throw InvalidInput("clip_count must be >= 1");
  if (frames < 1)
    throw InvalidInput("frames must be >= 1");
  if (width < 32 || height < 32 || width % 2 != 0 || height % 2 != 0)
    throw InvalidInput("corpus dimensions must be even and >= 32");
  if (!(artifact_strength > 0) || artifact_strength > 1)
    throw InvalidInput("artifact_strength must be in (0, 1]");
  if (fps.num == 0 || fps.den == 0)
    throw InvalidInput("fps must be positive");
}

namespace {

// Band-limited random field sampled with bilinear interpolation. Values are
// centered on zero.
class NoiseField {
public:
  NoiseField(Rng &rng, int w, int h, double amplitude, int blur_passes)
      : w_(w), h_(h), v_(static_cast<size_t>(w) * h) {
    for (double &x : v_)
      x = rng.uniform(-amplitude, amplitude);
    // 1-3-1 binomial blur per axis, repeated to shape the spectrum.
    std::vector<double> tmp(v_.size());
    for (int pass = 0; pass < blur_passes; ++pass) {
      for (int y = 0; y < h_; ++y)
        for (int x = 0; x < w_; ++x)
          tmp[idx(x, y)] = (at_c(x - 1, y) + 2 * at_c(x, y) + at_c(x + 1, y)) / 4.0;
      v_.swap(tmp);
      for (int y = 0; y < h_; ++y)
        for (int x = 0; x < w_; ++x)
          tmp[idx(x, y)] = (at_c(x, y - 1) + 2 * at_c(x, y) + at_c(x, y + 1)) / 4.0;
      v_.swap(tmp);
    }
  }

  double sample(double x, double y) const {
    if (x < 0) x = 0;
    if (y < 0) y = 0;
    if (x > w_ - 1.0) x = w_ - 1.0;
    if (y > h_ - 1.0) y = h_ - 1.0;
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, w_ - 1);
    const int y1 = std::min(y0 + 1, h_ - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = v_[idx(x0, y0)] * (1 - fx) + v_[idx(x1, y0)] * fx;
    const double bot = v_[idx(x0, y1)] * (1 - fx) + v_[idx(x1, y1)] * fx;
    return top * (1 - fy) + bot * fy;
  }

private:
  size_t idx(int x, int y) const { return static_cast<size_t>(y) * w_ + x; }
  double at_c(int x, int y) const {
    x = std::clamp(x, 0, w_ - 1);
    y = std::clamp(y, 0, h_ - 1);
    return v_[idx(x, y)];
  }

  int w_, h_;
  std::vector<double> v_;
};

struct EllipsePath {
  double cx0, cy0;   // rest position
  double ax, ay;     // oscillation amplitudes, px
  double wx, wy;     // angular speeds, rad/frame
  double px, py;     // phases
  double rx, ry;     // radii

  double cx(int t) const { return cx0 + ax * std::sin(wx * t + px); }
  double cy(int t) const { return cy0 + ay * std::sin(wy * t + py); }
};

struct SceneSpec {
  EllipsePath path;
  double bg_vx, bg_vy;       // background drift, px/frame
  double obj_cb, obj_cr;     // object tint
  double bg_cb, bg_cr;       // background tint
  uint64_t bg_seed, obj_seed, chroma_seed;
};

constexpr int kFieldPad = 40;

SceneSpec make_scene_spec(uint64_t seed, const CorpusParams &p) {
  Rng rng(mix_seed(seed, 0x5ce0e));
  SceneSpec s;
  s.path.rx = p.width * rng.uniform(0.13, 0.17);
  s.path.ry = p.height * rng.uniform(0.24, 0.32);
  s.path.cx0 = p.width * rng.uniform(0.40, 0.60);
  s.path.cy0 = p.height * rng.uniform(0.42, 0.58);
  s.path.ax = rng.uniform(8.0, 18.0);
  s.path.ay = rng.uniform(3.0, 8.0);
  s.path.wx = rng.uniform(0.08, 0.22);
  s.path.wy = rng.uniform(0.08, 0.22);
  s.path.px = rng.uniform(0.0, 6.28318);
  s.path.py = rng.uniform(0.0, 6.28318);
  s.bg_vx = rng.uniform(-0.35, 0.35);
  s.bg_vy = rng.uniform(-0.25, 0.25);
  s.obj_cb = rng.uniform(108.0, 122.0);
  s.obj_cr = rng.uniform(136.0, 150.0);
  s.bg_cb = rng.uniform(120.0, 136.0);
  s.bg_cr = rng.uniform(118.0, 132.0);
  s.bg_seed = mix_seed(seed, 1);
  s.obj_seed = mix_seed(seed, 2);
  s.chroma_seed = mix_seed(seed, 3);
  return s;
}

// Coverage alpha of the ellipse at a luma pixel; ~1.3px anti-aliased rim.
double ellipse_alpha(const EllipsePath &e, double cx, double cy, double x,
                     double y) {
  const double nx = (x - cx) / e.rx;
  const double ny = (y - cy) / e.ry;
  const double d = nx * nx + ny * ny;
  const double soft = 2.6 / std::min(e.rx, e.ry);
  const double t = (1.0 - d) / soft;
  return std::clamp(t, 0.0, 1.0);
}

} // namespace

Clip gen_real_clip(uint64_t seed, const CorpusParams &params) {
  params.validate();
  const SceneSpec s = make_scene_spec(seed, params);
  const int w = params.width;
  const int h = params.height;

  Rng bg_rng(s.bg_seed), obj_rng(s.obj_seed), chroma_rng(s.chroma_seed);
  const NoiseField bg(bg_rng, w + 2 * kFieldPad, h + 2 * kFieldPad, 60.0, 2);
  const NoiseField obj(obj_rng, static_cast<int>(2 * s.path.rx) + 8,
                       static_cast<int>(2 * s.path.ry) + 8, 46.0, 1);
  const NoiseField bg_chroma(chroma_rng, w / 2 + kFieldPad, h / 2 + kFieldPad,
                             18.0, 2);

  Clip clip;
  clip.fps = params.fps;
  clip.frames.resize(params.frames);

  for (int t = 0; t < params.frames; ++t) {
    Frame frame(w, h);
    const double cx = s.path.cx(t);
    const double cy = s.path.cy(t);
    const double offx = kFieldPad + s.bg_vx * t;
    const double offy = kFieldPad + s.bg_vy * t;

    std::vector<double> alpha(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double a = ellipse_alpha(s.path, cx, cy, x, y);
        alpha[static_cast<size_t>(y) * w + x] = a;
        const double bgl = 126.0 + bg.sample(x + offx, y + offy);
        double v = bgl;
        if (a > 0) {
          // Shaded, textured head proxy; texture rides with the ellipse.
          const double ox = x - cx + s.path.rx + 4;
          const double oy = y - cy + s.path.ry + 4;
          const double nx = (x - cx) / s.path.rx;
          const double ny = (y - cy) / s.path.ry;
          const double shade = 1.0 - 0.35 * (nx * nx + ny * ny);
          const double objl = 150.0 * shade + obj.sample(ox, oy);
          v = bgl * (1 - a) + objl * a;
        }
        frame.y.at(x, y) = clamp_u8(v);
      }
    }
    for (int yc = 0; yc < h / 2; ++yc) {
      for (int xc = 0; xc < w / 2; ++xc) {
        const size_t i = static_cast<size_t>(2 * yc) * w + 2 * xc;
        const double a =
            (alpha[i] + alpha[i + 1] + alpha[i + w] + alpha[i + w + 1]) / 4.0;
        const double ncb = bg_chroma.sample(xc + offx / 2, yc + offy / 2);
        const double cbv = (s.bg_cb + ncb) * (1 - a) + s.obj_cb * a;
        const double crv = (s.bg_cr - ncb) * (1 - a) + s.obj_cr * a;
        frame.cb.at(xc, yc) = clamp_u8(cbv);
        frame.cr.at(xc, yc) = clamp_u8(crv);
      }
    }
    clip.frames[t] = std::move(frame);
  }
  return clip;
}

Clip gen_fake_clip(const Clip &real, uint64_t seed, const CorpusParams &params) {
  real.validate();
  params.validate();
  const SceneSpec s = make_scene_spec(seed, params);
  const double strength = params.artifact_strength;

  Rng rng(mix_seed(seed, 0xFA4E));
  // Per-channel affine mismatch, the classic blend color error. The donor
  // region reads slightly contrastier than its surroundings.
  const double gain_y = 1.0 + strength * rng.uniform(0.08, 0.18);
  const double off_y = strength * rng.uniform(-12.0, 12.0);
  const double gain_cb = 1.0 + strength * rng.uniform(-0.12, 0.12);
  const double off_cb = strength * rng.uniform(-9.0, 9.0);
  const double gain_cr = 1.0 + strength * rng.uniform(-0.12, 0.12);
  const double off_cr = strength * rng.uniform(-9.0, 9.0);
  const double blur_mix = 0.18 * strength;        // slight luma low-pass
  const double chroma_blur_mix = 0.65 * strength; // chroma smears harder

  // The swapped patch sits strictly inside the head rim (blend seams hide
  // in the face interior), feathering over ~3 px without touching the rim.
  EllipsePath patch = s.path;
  patch.rx *= 0.78;
  patch.ry *= 0.78;
  const double feather_px = 3.0;

  Clip fake = real;
  const int w = real.width();
  const int h = real.height();

  for (int t = 0; t < real.frame_count(); ++t) {
    const Frame &src = real.frames[t];
    Frame &dst = fake.frames[t];
    const double cx = patch.cx(t);
    const double cy = patch.cy(t);
    const double soft = feather_px * 2.0 / std::min(patch.rx, patch.ry);

    const int x_lo = std::max(0, static_cast<int>(cx - patch.rx - feather_px - 2));
    const int x_hi = std::min(w - 1, static_cast<int>(cx + patch.rx + feather_px + 2));
    const int y_lo = std::max(0, static_cast<int>(cy - patch.ry - feather_px - 2));
    const int y_hi = std::min(h - 1, static_cast<int>(cy + patch.ry + feather_px + 2));

    auto patch_alpha = [&](double x, double y) {
      const double nx = (x - cx) / patch.rx;
      const double ny = (y - cy) / patch.ry;
      const double t2 = (1.0 - (nx * nx + ny * ny)) / soft;
      return std::clamp(t2, 0.0, 1.0);
    };
    auto blur33 = [](const Plane &p, int x, int y) {
      double acc = 0;
      static const int kw[9] = {1, 2, 1, 2, 4, 2, 1, 2, 1};
      int k = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          acc += kw[k++] * p.at_clamped(x + dx, y + dy);
      return acc / 16.0;
    };

    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = x_lo; x <= x_hi; ++x) {
        const double a = patch_alpha(x, y);
        if (a <= 0)
          continue;
        const double orig = src.y.at(x, y);
        const double soft_v = (1 - blur_mix) * orig + blur_mix * blur33(src.y, x, y);
        const double swapped = gain_y * (soft_v - 128.0) + 128.0 + off_y;
        dst.y.at(x, y) = clamp_u8(orig * (1 - a) + swapped * a);
      }
    }
    const int cx_lo = x_lo / 2, cx_hi = x_hi / 2;
    const int cy_lo = y_lo / 2, cy_hi = y_hi / 2;
    for (int yc = cy_lo; yc <= cy_hi; ++yc) {
      for (int xc = cx_lo; xc <= cx_hi; ++xc) {
        const double a = patch_alpha(2 * xc + 0.5, 2 * yc + 0.5);
        if (a <= 0)
          continue;
        const double ocb = src.cb.at(xc, yc);
        const double ocr = src.cr.at(xc, yc);
        const double scb =
            (1 - chroma_blur_mix) * ocb + chroma_blur_mix * blur33(src.cb, xc, yc);
        const double scr =
            (1 - chroma_blur_mix) * ocr + chroma_blur_mix * blur33(src.cr, xc, yc);
        const double vcb_ = gain_cb * (scb - 128.0) + 128.0 + off_cb;
        const double vcr_ = gain_cr * (scr - 128.0) + 128.0 + off_cr;
        dst.cb.at(xc, yc) = clamp_u8(ocb * (1 - a) + vcb_ * a);
        dst.cr.at(xc, yc) = clamp_u8(ocr * (1 - a) + vcr_ * a);
      }
    }
  }
  return fake;
}

std::vector<LabeledClip> gen_corpus(const CorpusParams &params,
                                    CorpusManifest *manifest) {
  params.validate();
  std::vector<LabeledClip> corpus(static_cast<size_t>(params.clip_count) * 2);

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < params.clip_count; ++i) {
    const uint64_t clip_seed = mix_seed(params.seed, 1000 + i);
    Clip real = gen_real_clip(clip_seed, params);
    Clip fake = gen_fake_clip(real, clip_seed, params);
    corpus[2 * i] = LabeledClip{std::move(real), Label::real, i, clip_seed};
    corpus[2 * i + 1] = LabeledClip{std::move(fake), Label::fake, i, clip_seed};
  }

  if (manifest) {
    manifest->rows.clear();
    for (const LabeledClip &lc : corpus)
      manifest->rows.push_back(ManifestRow{lc.pair_id, lc.label, lc.seed,
                                           lc.clip.width(), lc.clip.height(),
                                           lc.clip.frame_count(), lc.clip.fps});
  }
  return corpus;
}

std::string CorpusManifest::to_tsv() const {
  std::ostringstream out;
  out << "pair_id\tlabel\tseed\twidth\theight\tframes\tfps\n";
  for (const ManifestRow &r : rows)
    out << r.pair_id << '\t' << label_name(r.label) << '\t' << r.seed << '\t'
        << r.width << '\t' << r.height << '\t' << r.frames << '\t' << r.fps.num
        << '/' << r.fps.den << '\n';
  return out.str();
}

CorpusManifest CorpusManifest::from_tsv(const std::string &text) {
  CorpusManifest m;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("pair_id\t", 0) != 0)
    throw ParseError(ParseError::Kind::bad_header,
                     "manifest lacks expected TSV header", 0);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty())
      continue;
    ManifestRow r;
    char label[16] = {0};
    unsigned long long seed = 0;
    unsigned fps_num = 0, fps_den = 0;
    const int got =
        std::sscanf(line.c_str(), "%d\t%15[^\t]\t%llu\t%d\t%d\t%d\t%u/%u",
                    &r.pair_id, label, &seed, &r.width, &r.height, &r.frames,
                    &fps_num, &fps_den);
    if (got != 8)
      throw ParseError(ParseError::Kind::bad_header,
                       "manifest line " + std::to_string(line_no) +
                           " is malformed: '" + line + "'");
    const std::string lab(label);
    if (lab != "real" && lab != "fake")
      throw ParseError(ParseError::Kind::bad_header,
                       "manifest line " + std::to_string(line_no) +
                           " has unknown label '" + lab + "'");
    r.label = lab == "real" ? Label::real : Label::fake;
    r.seed = seed;
    r.fps = Fraction{fps_num, fps_den};
    m.rows.push_back(r);
  }
  return m;
}

namespace {

std::string clip_filename(int pair_id, Label label) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d_%s.y4m", pair_id, label_name(label));
  return buf;
}

} // namespace

void write_corpus(const std::vector<LabeledClip> &corpus,
                  const CorpusManifest &manifest, const std::string &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create corpus directory " + dir + ": " + ec.message());
  for (const LabeledClip &lc : corpus)
    write_y4m(lc.clip,
              (std::filesystem::path(dir) / clip_filename(lc.pair_id, lc.label))
                  .string());
  std::ofstream mf(std::filesystem::path(dir) / "manifest.tsv",
                   std::ios::binary);
  if (!mf)
    throw IoError("cannot write manifest in " + dir);
  mf << manifest.to_tsv();
}

std::vector<LabeledClip> load_corpus(const std::string &dir,
                                     CorpusManifest *manifest_out) {
  const auto mpath = std::filesystem::path(dir) / "manifest.tsv";
  std::ifstream mf(mpath, std::ios::binary);
  if (!mf)
    throw IoError("cannot open manifest: " + mpath.string());
  std::ostringstream ss;
  ss << mf.rdbuf();
  const CorpusManifest manifest = CorpusManifest::from_tsv(ss.str());

  std::vector<LabeledClip> corpus;
  corpus.reserve(manifest.rows.size());
  for (const ManifestRow &r : manifest.rows) {
    const auto cpath =
        std::filesystem::path(dir) / clip_filename(r.pair_id, r.label);
    LabeledClip lc;
    lc.clip = read_y4m(cpath.string());
    lc.label = r.label;
    lc.pair_id = r.pair_id;
    lc.seed = r.seed;
    if (lc.clip.width() != r.width || lc.clip.height() != r.height ||
        lc.clip.frame_count() != r.frames)
      throw InvalidInput("clip " + cpath.string() +
                         " does not match its manifest row");
    corpus.push_back(std::move(lc));
  }
  if (manifest_out)
    *manifest_out = manifest;
  return corpus;
}

uint64_t fnv1a64(const void *data, size_t len) {
  const uint8_t *p = static_cast<const uint8_t *>(data);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string manifest_hash_hex(const CorpusManifest &manifest) {
  const std::string tsv = manifest.to_tsv();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(tsv.data(), tsv.size())));
  return buf;
}

} // namespace vcb
