#pragma once

#include <string>
#include <vector>

#include "vcb/corrupt.hpp"
#include "vcb/detector.hpp"
#include "vcb/synth.hpp"

namespace vcb {

/// One table row. Accuracies are exact rational tallies rendered as
/// doubles on demand.
struct EvalResult {
  std::string regime_name;
  int n_real = 0; // evaluated (excluded clips removed from denominator)
  int n_fake = 0;
  int auth_correct = 0; // real clips classified real
  int det_correct = 0;  // fake clips classified fake
  int excluded = 0;     // corruption failures, both classes
  double mean_real_score = 0;
  double mean_fake_score = 0;

  double auth_accuracy() const {
    return n_real == 0 ? 0.0 : static_cast<double>(auth_correct) / n_real;
  }
  double detect_accuracy() const {
    return n_fake == 0 ? 0.0 : static_cast<double>(det_correct) / n_fake;
  }
};

struct EvalReport {
  std::vector<EvalResult> rows; // catalog order, Uncorrupted last
  std::string detector_meta;
  std::string corpus_hash;
  std::string timestamp; // in-memory only; never serialized

  const EvalResult *find(const std::string &regime_name) const;
};

struct EvalConfig {
  double threshold = 0.5;
  int workers = 0; // <= 0: one job thread per hardware thread
};

/// Corrupts every clip under every regime, scores, tallies per-class
/// accuracy. Jobs run concurrently; aggregation folds a canonically
/// sorted job list so the report is identical for any worker count and
/// any corpus ordering.
EvalReport evaluate(const DetectorModel &detector,
                    const std::vector<LabeledClip> &corpus,
                    const std::vector<Regime> &regimes,
                    const EvalConfig &cfg = {});

/// Same pass for several detectors at once: each (clip, regime) pair is
/// corrupted and featurized once, then scored per detector.
std::vector<EvalReport> evaluate_many(const std::vector<DetectorModel> &dets,
                                      const std::vector<LabeledClip> &corpus,
                                      const std::vector<Regime> &regimes,
                                      const EvalConfig &cfg = {});

std::string render_report_markdown(const EvalReport &report);
std::string render_report_csv(const EvalReport &report);
void emit_report(const EvalReport &report, const std::string &format,
                 const std::string &path);

struct CaseStudyResult {
  std::string clip_id;
  std::string regime_name;
  double score_uncorrupted = 0;
  double score_corrupted = 0;
  Label label_uncorrupted = Label::real;
  Label label_corrupted = Label::real;
};

/// Scores one clip before and after a regime (default "240p + CRF50").
CaseStudyResult gabon_case(const DetectorModel &detector, const Clip &clip,
                           const Regime &regime, double threshold = 0.5,
                           const std::string &clip_id = "clip");

struct AlignmentStudy {
  EvalReport with_augmentation;
  EvalReport without_augmentation;
  std::vector<double> detect_delta; // augmented minus plain, per regime
  std::vector<double> auth_delta;
  double mean_bitrate_detect_delta = 0; // over the BR1.0 / BR0.5 rows
};

/// Trains two detectors on identical seeds, one with augmentations and
/// one without, evaluates both across the regimes, and reports the
/// per-regime accuracy deltas.
AlignmentStudy augmentation_alignment_study(
    const std::vector<LabeledClip> &corpus, const std::vector<Regime> &regimes,
    const TrainConfig &base_cfg, const EvalConfig &eval_cfg = {});

std::string render_study_markdown(const AlignmentStudy &study);

} // namespace vcb
