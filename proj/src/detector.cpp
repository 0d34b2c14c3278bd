#include "vcb/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vcb/kernels.hpp"
#include "vcb/rng.hpp"

namespace vcb {

namespace {

struct FrameStats {
  double hf_ratio = 0;
  double blockiness = 0;
  double edge_skew = 0;
  double chroma_corr = 0;
  double luma_mean = 0;
  double luma_std = 0;
  double cb_mean = 0;
  double cr_mean = 0;
  double grad_mean = 0;
};

double plane_mean(const Plane &p) {
  double s = 0;
  for (uint8_t v : p.samples())
    s += v;
  return s / static_cast<double>(p.samples().size());
}

FrameStats measure_frame(const Frame &f) {
  FrameStats st;
  const Plane &Y = f.y;
  const int w = Y.width();
  const int h = Y.height();

  // High-frequency energy ratio over full 8x8 blocks.
  const auto energies = kernels::block_energies(Y, /*parallel=*/false);
  if (!energies.empty()) {
    double acc = 0;
    for (const auto &e : energies)
      acc += e.hf / (e.ac + 1e-9);
    st.hf_ratio = acc / static_cast<double>(energies.size());
  }

  // Blockiness: 8-aligned steps minus the off-grid baseline.
  {
    double grid = 0, off = 0;
    long long n_grid = 0, n_off = 0;
    for (int y = 0; y < h; ++y) {
      const uint8_t *row = Y.row(y);
      for (int x = 1; x < w; ++x) {
        const double d = std::abs(static_cast<int>(row[x]) - row[x - 1]);
        if (x % 8 == 0) {
          grid += d;
          ++n_grid;
        } else {
          off += d;
          ++n_off;
        }
      }
    }
    for (int y = 1; y < h; ++y) {
      const uint8_t *row = Y.row(y);
      const uint8_t *prev = Y.row(y - 1);
      for (int x = 0; x < w; ++x) {
        const double d = std::abs(static_cast<int>(row[x]) - prev[x]);
        if (y % 8 == 0) {
          grid += d;
          ++n_grid;
        } else {
          off += d;
          ++n_off;
        }
      }
    }
    if (n_grid > 0 && n_off > 0)
      st.blockiness = grid / n_grid - off / n_off;
  }

  // Gradient magnitude moments -> mean and histogram skewness.
  {
    double s1 = 0, s2 = 0, s3 = 0;
    long long n = 0;
    for (int y = 0; y + 1 < h; ++y) {
      const uint8_t *row = Y.row(y);
      const uint8_t *next = Y.row(y + 1);
      for (int x = 0; x + 1 < w; ++x) {
        const double g = std::abs(static_cast<int>(row[x + 1]) - row[x]) +
                         std::abs(static_cast<int>(next[x]) - row[x]);
        s1 += g;
        s2 += g * g;
        s3 += g * g * g;
        ++n;
      }
    }
    if (n > 0) {
      const double m = s1 / n;
      const double var = s2 / n - m * m;
      const double m3 = s3 / n - 3 * m * (s2 / n) + 2 * m * m * m;
      st.grad_mean = m;
      if (var > 1e-12)
        st.edge_skew = m3 / std::pow(var, 1.5);
    }
  }

  // Correlation between luma structure (at chroma resolution) and chroma
  // structure; blend color mismatch decouples the two.
  {
    const Plane &Cb = f.cb;
    const Plane &Cr = f.cr;
    const int cw = Cb.width();
    const int ch = Cb.height();
    double sy = 0, sc = 0, syy = 0, scc = 0, syc = 0;
    long long n = 0;
    for (int y = 0; y + 1 < ch; ++y) {
      for (int x = 0; x + 1 < cw; ++x) {
        auto down = [&](int xc, int yc) {
          return (static_cast<int>(Y.at(2 * xc, 2 * yc)) + Y.at(2 * xc + 1, 2 * yc) +
                  Y.at(2 * xc, 2 * yc + 1) + Y.at(2 * xc + 1, 2 * yc + 1)) /
                 4.0;
        };
        const double gy = std::abs(down(x + 1, y) - down(x, y)) +
                          std::abs(down(x, y + 1) - down(x, y));
        const double gc =
            std::abs(static_cast<int>(Cb.at(x + 1, y)) - Cb.at(x, y)) +
            std::abs(static_cast<int>(Cb.at(x, y + 1)) - Cb.at(x, y)) +
            std::abs(static_cast<int>(Cr.at(x + 1, y)) - Cr.at(x, y)) +
            std::abs(static_cast<int>(Cr.at(x, y + 1)) - Cr.at(x, y));
        sy += gy;
        sc += gc;
        syy += gy * gy;
        scc += gc * gc;
        syc += gy * gc;
        ++n;
      }
    }
    if (n > 0) {
      const double vy = syy / n - (sy / n) * (sy / n);
      const double vc = scc / n - (sc / n) * (sc / n);
      const double cov = syc / n - (sy / n) * (sc / n);
      if (vy > 1e-12 && vc > 1e-12)
        st.chroma_corr = cov / std::sqrt(vy * vc);
    }
  }

  // Plane levels.
  {
    double s = 0, ss = 0;
    for (uint8_t v : Y.samples()) {
      s += v;
      ss += static_cast<double>(v) * v;
    }
    const double n = static_cast<double>(Y.samples().size());
    st.luma_mean = s / n;
    const double var = ss / n - st.luma_mean * st.luma_mean;
    st.luma_std = var > 0 ? std::sqrt(var) : 0.0;
  }
  st.cb_mean = plane_mean(f.cb) - 128.0;
  st.cr_mean = plane_mean(f.cr) - 128.0;
  return st;
}

void mean_var(const std::vector<double> &v, double &mean, double &var) {
  mean = 0;
  var = 0;
  if (v.empty())
    return;
  for (double x : v)
    mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v)
    var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
}

double sigmoid(double z) {
  if (z >= 0)
    return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z), stable for large |z|.
double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

} // namespace

FeatureVector extract_features(const Clip &clip) {
  clip.validate();
  const int n = clip.frame_count();
  std::vector<FrameStats> stats(n);

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i)
    stats[i] = measure_frame(clip.frames[i]);

  std::vector<double> temporal(n > 1 ? n - 1 : 0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n - 1; ++i) {
    const Plane &a = clip.frames[i].y;
    const Plane &b = clip.frames[i + 1].y;
    double s = 0;
    const size_t len = a.samples().size();
    for (size_t k = 0; k < len; ++k) {
      const double d =
          static_cast<double>(a.samples()[k]) - b.samples()[k];
      s += d * d;
    }
    temporal[i] = s / static_cast<double>(len);
  }

  auto collect = [&](auto member) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
      v[i] = stats[i].*member;
    return v;
  };

  FeatureVector f{};
  double m = 0, var = 0;
  mean_var(collect(&FrameStats::hf_ratio), m, var);
  f[0] = m;
  f[1] = var;
  mean_var(collect(&FrameStats::blockiness), m, var);
  f[2] = m;
  f[3] = var;
  mean_var(collect(&FrameStats::edge_skew), m, var);
  f[4] = m;
  f[5] = var;
  mean_var(temporal, m, var);
  f[6] = m;
  f[7] = var;
  mean_var(collect(&FrameStats::chroma_corr), m, var);
  f[8] = m;
  f[9] = var;
  mean_var(collect(&FrameStats::luma_mean), m, var);
  f[10] = m;
  f[15] = var;
  mean_var(collect(&FrameStats::luma_std), m, var);
  f[11] = m;
  mean_var(collect(&FrameStats::cb_mean), m, var);
  f[12] = m;
  mean_var(collect(&FrameStats::cr_mean), m, var);
  f[13] = m;
  mean_var(collect(&FrameStats::grad_mean), m, var);
  f[14] = m;
  return f;
}

void AugmentationSpec::validate() const {
  if (noise_sigma < 0 || blur_radius < 0)
    throw InvalidInput("augmentation sigma/radius must be >= 0");
  if (flip_probability < 0 || flip_probability > 1 || gray_probability < 0 ||
      gray_probability > 1)
    throw InvalidInput("augmentation probabilities must be in [0, 1]");
  if (brightness_range < 0 || contrast_range < 0 || contrast_range >= 1)
    throw InvalidInput("augmentation ranges out of domain");
}

std::string AugmentationSpec::describe() const {
  if (!any())
    return "off";
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "noise=%.4g,blur=%.4g,flip=%.4g,gray=%.4g,brightness=%.4g,"
                "contrast=%.4g",
                noise_sigma, blur_radius, flip_probability, gray_probability,
                brightness_range, contrast_range);
  return buf;
}

AugmentationSpec AugmentationSpec::defaults() {
  AugmentationSpec s;
  s.noise_sigma = 3.0;
  s.blur_radius = 0.9;
  s.flip_probability = 0.5;
  s.gray_probability = 0.1;
  s.brightness_range = 10.0;
  s.contrast_range = 0.12;
  return s;
}

namespace {

void add_noise_plane(Plane &p, double sigma, uint64_t seed) {
  const int h = p.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    Rng rng(mix_seed(seed, static_cast<uint64_t>(y)));
    uint8_t *row = p.row(y);
    for (int x = 0; x < p.width(); ++x)
      row[x] = clamp_u8(row[x] + sigma * rng.gaussian());
  }
}

void blur_plane(Plane &p, double sigma) {
  const int half = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * half + 1);
  double sum = 0;
  for (int i = -half; i <= half; ++i) {
    k[i + half] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + half];
  }
  for (double &v : k)
    v /= sum;

  const int w = p.width();
  const int h = p.height();
  std::vector<double> mid(static_cast<size_t>(w) * h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = -half; i <= half; ++i)
        acc += k[i + half] * p.at_clamped(x + i, y);
      mid[static_cast<size_t>(y) * w + x] = acc;
    }
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = -half; i <= half; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        acc += k[i + half] * mid[static_cast<size_t>(yy) * w + x];
      }
      p.at(x, y) = clamp_u8(acc);
    }
}

void flip_plane(Plane &p) {
  const int w = p.width();
  for (int y = 0; y < p.height(); ++y) {
    uint8_t *row = p.row(y);
    std::reverse(row, row + w);
  }
}

} // namespace

Clip augment(const Clip &clip, const AugmentationSpec &spec, uint64_t seed) {
  clip.validate();
  spec.validate();
  Clip out = clip;

  if (spec.noise_sigma > 0) {
    for (int i = 0; i < out.frame_count(); ++i) {
      Frame &f = out.frames[i];
      add_noise_plane(f.y, spec.noise_sigma, mix_seed(seed, 3 * i + 0));
      add_noise_plane(f.cb, spec.noise_sigma, mix_seed(seed, 3 * i + 1));
      add_noise_plane(f.cr, spec.noise_sigma, mix_seed(seed, 3 * i + 2));
    }
  }
  if (spec.blur_radius > 0) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < out.frame_count(); ++i) {
      blur_plane(out.frames[i].y, spec.blur_radius);
      blur_plane(out.frames[i].cb, spec.blur_radius);
      blur_plane(out.frames[i].cr, spec.blur_radius);
    }
  }
  if (spec.flip_probability > 0) {
    Rng rng(mix_seed(seed, 0xF11F));
    if (rng.next_double() < spec.flip_probability) {
      for (Frame &f : out.frames) {
        flip_plane(f.y);
        flip_plane(f.cb);
        flip_plane(f.cr);
      }
    }
  }
  if (spec.gray_probability > 0) {
    Rng rng(mix_seed(seed, 0x96A7));
    if (rng.next_double() < spec.gray_probability) {
      for (Frame &f : out.frames) {
        std::fill(f.cb.samples().begin(), f.cb.samples().end(), 128);
        std::fill(f.cr.samples().begin(), f.cr.samples().end(), 128);
      }
    }
  }
  if (spec.brightness_range > 0 || spec.contrast_range > 0) {
    Rng rng(mix_seed(seed, 0xBC01));
    const double gain = 1.0 + rng.uniform(-spec.contrast_range, spec.contrast_range);
    const double offset = rng.uniform(-spec.brightness_range, spec.brightness_range);
    for (Frame &f : out.frames)
      for (uint8_t &v : f.y.samples())
        v = clamp_u8((v - 128.0) * gain + 128.0 + offset);
  }
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0))
    throw InvalidInput("learning rate must be positive");
  if (epochs < 0)
    throw InvalidInput("epochs must be >= 0");
  if (l2_penalty < 0)
    throw InvalidInput("l2 penalty must be >= 0");
  if (augmented_copies < 1)
    throw InvalidInput("augmented_copies must be >= 1");
  augmentation.validate();
}

double logistic_loss(const std::vector<FeatureVector> &x,
                     const std::vector<double> &y,
                     const std::array<double, kFeatureDim> &w, double b,
                     double l2) {
  double loss = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double z = b;
    for (int d = 0; d < kFeatureDim; ++d)
      z += w[d] * x[i][d];
    loss += softplus(z) - y[i] * z;
  }
  loss /= static_cast<double>(x.size());
  double reg = 0;
  for (double wd : w)
    reg += wd * wd;
  return loss + 0.5 * l2 * reg;
}

void logistic_gradient(const std::vector<FeatureVector> &x,
                       const std::vector<double> &y,
                       const std::array<double, kFeatureDim> &w, double b,
                       double l2, std::array<double, kFeatureDim> &grad_w,
                       double &grad_b) {
  grad_w.fill(0);
  grad_b = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double z = b;
    for (int d = 0; d < kFeatureDim; ++d)
      z += w[d] * x[i][d];
    const double err = sigmoid(z) - y[i];
    for (int d = 0; d < kFeatureDim; ++d)
      grad_w[d] += err * x[i][d];
    grad_b += err;
  }
  const double inv_n = 1.0 / static_cast<double>(x.size());
  for (int d = 0; d < kFeatureDim; ++d)
    grad_w[d] = grad_w[d] * inv_n + l2 * w[d];
  grad_b *= inv_n;
}

DetectorModel train(const std::vector<LabeledClip> &corpus,
                    const TrainConfig &cfg) {
  cfg.validate();
  if (corpus.empty())
    throw InvalidInput("training corpus is empty");
  bool has_real = false, has_fake = false;
  for (const LabeledClip &lc : corpus)
    (lc.label == Label::real ? has_real : has_fake) = true;
  if (!has_real || !has_fake)
    throw InvalidInput("training corpus must contain both classes");

  // Feature rows: every clip, plus augmented replicas when enabled.
  const int copies = cfg.augmentation.any() ? cfg.augmented_copies : 0;
  const int n_clips = static_cast<int>(corpus.size());
  const int rows_per_clip = 1 + copies;
  std::vector<FeatureVector> x(static_cast<size_t>(n_clips) * rows_per_clip);
  std::vector<double> y(x.size());

  for (int i = 0; i < n_clips; ++i) {
    const double label = corpus[i].label == Label::fake ? 1.0 : 0.0;
    x[static_cast<size_t>(i) * rows_per_clip] = extract_features(corpus[i].clip);
    y[static_cast<size_t>(i) * rows_per_clip] = label;
    for (int k = 0; k < copies; ++k) {
      const uint64_t aug_seed =
          mix_seed(mix_seed(cfg.seed, 0xA46), static_cast<uint64_t>(i) * 31 + k);
      x[static_cast<size_t>(i) * rows_per_clip + 1 + k] =
          extract_features(augment(corpus[i].clip, cfg.augmentation, aug_seed));
      y[static_cast<size_t>(i) * rows_per_clip + 1 + k] = label;
    }
  }

  DetectorModel model;
  model.train_seed = cfg.seed;
  model.augmentation_desc = cfg.augmentation.describe();

  // Normalization frozen from the training rows.
  for (int d = 0; d < kFeatureDim; ++d) {
    double mean = 0;
    for (const FeatureVector &f : x)
      mean += f[d];
    mean /= static_cast<double>(x.size());
    double var = 0;
    for (const FeatureVector &f : x)
      var += (f[d] - mean) * (f[d] - mean);
    var /= static_cast<double>(x.size());
    model.feat_mean[d] = mean;
    model.feat_scale[d] = var > 1e-16 ? std::sqrt(var) : 1.0;
  }
  std::vector<FeatureVector> xn = x;
  for (FeatureVector &f : xn)
    for (int d = 0; d < kFeatureDim; ++d)
      f[d] = (f[d] - model.feat_mean[d]) / model.feat_scale[d];

  // Zero weights, bias at the class-prior log-odds.
  double p = 0;
  for (double yi : y)
    p += yi;
  p /= static_cast<double>(y.size());
  model.weights.fill(0);
  model.bias = std::log(p / (1.0 - p));

  double lr = cfg.learning_rate;
  double prev_loss = logistic_loss(xn, y, model.weights, model.bias, cfg.l2_penalty);
  std::array<double, kFeatureDim> grad_w;
  double grad_b = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    logistic_gradient(xn, y, model.weights, model.bias, cfg.l2_penalty, grad_w,
                      grad_b);
    for (int d = 0; d < kFeatureDim; ++d)
      model.weights[d] -= lr * grad_w[d];
    model.bias -= lr * grad_b;
    const double loss =
        logistic_loss(xn, y, model.weights, model.bias, cfg.l2_penalty);
    if (loss > prev_loss) {
      lr *= 0.5;
      ++model.lr_halvings;
    }
    prev_loss = loss;
  }
  model.final_loss = prev_loss;
  return model;
}

double score_features(const DetectorModel &model, const FeatureVector &f) {
  double z = model.bias;
  for (int d = 0; d < kFeatureDim; ++d)
    z += model.weights[d] * (f[d] - model.feat_mean[d]) / model.feat_scale[d];
  return sigmoid(z);
}

double score(const DetectorModel &model, const Clip &clip) {
  return score_features(model, extract_features(clip));
}

Label classify_score(double s, double threshold) {
  return s > threshold ? Label::fake : Label::real;
}

Label classify(const DetectorModel &model, const Clip &clip, double threshold) {
  return classify_score(score(model, clip), threshold);
}

std::string DetectorModel::describe() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "logistic-16d seed=%llu augment=%s final_loss=%.6g",
                static_cast<unsigned long long>(train_seed),
                augmentation_desc.c_str(), final_loss);
  std::string out = buf;
  if (lr_halvings > 0)
    out += " lr_halvings=" + std::to_string(lr_halvings);
  return out;
}

namespace {

void write_doubles(std::ostream &out, const char *key, const double *v, int n) {
  out << key;
  char buf[40];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), " %.17g", v[i]);
    out << buf;
  }
  out << '\n';
}

} // namespace

void save_model(const DetectorModel &model, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open for writing: " + path);
  out << "vcbench detector model v1\n";
  out << "dim " << kFeatureDim << '\n';
  write_doubles(out, "weights", model.weights.data(), kFeatureDim);
  write_doubles(out, "bias", &model.bias, 1);
  write_doubles(out, "feat_mean", model.feat_mean.data(), kFeatureDim);
  write_doubles(out, "feat_scale", model.feat_scale.data(), kFeatureDim);
  out << "train_seed " << model.train_seed << '\n';
  out << "augmentation " << model.augmentation_desc << '\n';
  write_doubles(out, "final_loss", &model.final_loss, 1);
  out << "lr_halvings " << model.lr_halvings << '\n';
  if (!out)
    throw IoError("write failed: " + path);
}

DetectorModel load_model(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open model file: " + path);

  auto fail = [&](const std::string &why) {
    throw ParseError(ParseError::Kind::bad_header,
                     path + ": " + why);
  };
  std::string line;
  if (!std::getline(in, line) || line != "vcbench detector model v1")
    fail("unknown model file version");

  DetectorModel model;
  auto read_key = [&](const char *key, std::istringstream &ss) {
    if (!std::getline(in, line))
      fail(std::string("missing field ") + key);
    ss.str(line);
    std::string k;
    ss >> k;
    if (k != key)
      fail("expected field '" + std::string(key) + "', found '" + k + "'");
  };
  {
    std::istringstream ss;
    read_key("dim", ss);
    int dim = 0;
    ss >> dim;
    if (dim != kFeatureDim)
      fail("model dimension mismatch");
  }
  auto read_doubles = [&](const char *key, double *v, int n) {
    std::istringstream ss;
    read_key(key, ss);
    for (int i = 0; i < n; ++i)
      if (!(ss >> v[i]))
        fail(std::string("short value list for ") + key);
  };
  read_doubles("weights", model.weights.data(), kFeatureDim);
  read_doubles("bias", &model.bias, 1);
  read_doubles("feat_mean", model.feat_mean.data(), kFeatureDim);
  read_doubles("feat_scale", model.feat_scale.data(), kFeatureDim);
  {
    std::istringstream ss;
    read_key("train_seed", ss);
    ss >> model.train_seed;
  }
  {
    std::istringstream ss;
    read_key("augmentation", ss);
    ss >> model.augmentation_desc;
  }
  read_doubles("final_loss", &model.final_loss, 1);
  {
    std::istringstream ss;
    read_key("lr_halvings", ss);
    ss >> model.lr_halvings;
  }
  for (double s : model.feat_scale)
    if (!(s > 0))
      fail("feature scales must be positive");
  return model;
}

} // namespace vcb
