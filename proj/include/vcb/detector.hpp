#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vcb/frame.hpp"
#include "vcb/synth.hpp"

namespace vcb {

inline constexpr int kFeatureDim = 16;
using FeatureVector = std::array<double, kFeatureDim>;

/// Per-clip statistics over hand-crafted frame measurements:
///   0/1  mean/var of per-block high-frequency DCT energy ratio
///   2/3  mean/var of blockiness (8-grid luma step minus off-grid baseline)
///   4/5  mean/var of gradient-magnitude histogram skewness
///   6/7  mean/var of temporal residual energy (consecutive luma MSE)
///   8/9  mean/var of chroma/luma local gradient correlation
///   10   mean luma level            11  mean per-frame luma std
///   12   mean Cb offset from 128    13  mean Cr offset from 128
///   14   mean gradient magnitude    15  var of per-frame luma mean
/// Statistics are over frames, so all but 6/7 are frame-order invariant.
FeatureVector extract_features(const Clip &clip);

struct AugmentationSpec {
  double noise_sigma = 0;       // gaussian noise on all planes
  double blur_radius = 0;       // gaussian blur sigma, all planes
  double flip_probability = 0;  // whole-clip horizontal mirror
  double gray_probability = 0;  // chroma planes forced to 128
  double brightness_range = 0;  // luma offset drawn from [-r, +r]
  double contrast_range = 0;    // luma gain drawn from [1-r, 1+r]

  bool any() const {
    return noise_sigma > 0 || blur_radius > 0 || flip_probability > 0 ||
           gray_probability > 0 || brightness_range > 0 || contrast_range > 0;
  }
  void validate() const;
  std::string describe() const;

  /// Mirrors a subset of the reference training recipe.
  static AugmentationSpec defaults();
};

/// Applies each enabled transform with randomness derived from `seed`.
Clip augment(const Clip &clip, const AugmentationSpec &spec, uint64_t seed);

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 200;
  double l2_penalty = 1e-3;
  uint64_t seed = 0;
  AugmentationSpec augmentation;
  int augmented_copies = 2; // per clip, when augmentation is enabled

  void validate() const;
};

/// Logistic regression over normalized features; scores near 1 mean fake.
struct DetectorModel {
  std::array<double, kFeatureDim> weights{};
  double bias = 0;
  std::array<double, kFeatureDim> feat_mean{};
  std::array<double, kFeatureDim> feat_scale{}; // all > 0
  uint64_t train_seed = 0;
  std::string augmentation_desc = "off";
  double final_loss = 0;
  int lr_halvings = 0;

  std::string describe() const;
};

/// L2-regularized cross-entropy loss and its gradient for
/// sigmoid(w.x + b); labels fake=1, real=0. Exposed so tests can check the
/// analytic gradient against finite differences.
double logistic_loss(const std::vector<FeatureVector> &x,
                     const std::vector<double> &y,
                     const std::array<double, kFeatureDim> &w, double b,
                     double l2);
void logistic_gradient(const std::vector<FeatureVector> &x,
                       const std::vector<double> &y,
                       const std::array<double, kFeatureDim> &w, double b,
                       double l2, std::array<double, kFeatureDim> &grad_w,
                       double &grad_b);

/// Full-batch gradient descent from weights 0 / bias at the class-prior
/// log-odds. The learning rate is halved (and noted on the model) if the
/// loss ever rises between epochs.
DetectorModel train(const std::vector<LabeledClip> &corpus,
                    const TrainConfig &cfg);

double score_features(const DetectorModel &model, const FeatureVector &f);
double score(const DetectorModel &model, const Clip &clip);

/// fake iff score > threshold (strictly).
Label classify_score(double score, double threshold = 0.5);
Label classify(const DetectorModel &model, const Clip &clip,
               double threshold = 0.5);

void save_model(const DetectorModel &model, const std::string &path);
DetectorModel load_model(const std::string &path);

} // namespace vcb
