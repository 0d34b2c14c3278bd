#include "vcb/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numeric>
#include <omp.h>
#include <sstream>

namespace vcb {

const EvalResult *EvalReport::find(const std::string &regime_name) const {
  for (const EvalResult &r : rows)
    if (r.regime_name == regime_name)
      return &r;
  return nullptr;
}

namespace {

std::string now_string() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

CorpusManifest manifest_of(const std::vector<LabeledClip> &corpus) {
  CorpusManifest m;
  for (const LabeledClip &lc : corpus)
    m.rows.push_back(ManifestRow{lc.pair_id, lc.label, lc.seed,
                                 lc.clip.width(), lc.clip.height(),
                                 lc.clip.frame_count(), lc.clip.fps});
  return m;
}

struct JobResult {
  bool ok = false;
  std::vector<double> scores; // one per detector
};

} // namespace

std::vector<EvalReport> evaluate_many(const std::vector<DetectorModel> &dets,
                                      const std::vector<LabeledClip> &corpus,
                                      const std::vector<Regime> &regimes,
                                      const EvalConfig &cfg) {
  if (dets.empty())
    throw InvalidInput("need at least one detector");
  if (corpus.empty())
    throw InvalidInput("evaluation corpus is empty");
  bool has_real = false, has_fake = false;
  for (const LabeledClip &lc : corpus)
    (lc.label == Label::real ? has_real : has_fake) = true;
  if (!has_real || !has_fake)
    throw InvalidInput("evaluation corpus must contain both classes");
  if (regimes.empty())
    throw InvalidInput("no regimes to evaluate");

  // Canonical clip order: (pair_id, real-before-fake). Results fold in this
  // order no matter how the corpus was passed in or how jobs are scheduled.
  std::vector<int> clip_order(corpus.size());
  std::iota(clip_order.begin(), clip_order.end(), 0);
  std::sort(clip_order.begin(), clip_order.end(), [&](int a, int b) {
    if (corpus[a].pair_id != corpus[b].pair_id)
      return corpus[a].pair_id < corpus[b].pair_id;
    return static_cast<int>(corpus[a].label) < static_cast<int>(corpus[b].label);
  });

  const int n_clips = static_cast<int>(corpus.size());
  const int n_regimes = static_cast<int>(regimes.size());
  const int n_jobs = n_clips * n_regimes;
  std::vector<JobResult> results(n_jobs);

  const int workers = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (int j = 0; j < n_jobs; ++j) {
    const int r = j / n_clips;
    const int c = clip_order[j % n_clips];
    JobResult &out = results[j];
    try {
      const Clip corrupted = apply_pipeline(corpus[c].clip, regimes[r]);
      const FeatureVector f = extract_features(corrupted);
      out.scores.resize(dets.size());
      for (size_t d = 0; d < dets.size(); ++d)
        out.scores[d] = score_features(dets[d], f);
      out.ok = true;
    } catch (const Error &) {
      out.ok = false; // recorded as an exclusion for this regime
    }
  }

  const std::string corpus_hash = manifest_hash_hex(manifest_of(corpus));
  const std::string stamp = now_string();

  std::vector<EvalReport> reports(dets.size());
  for (size_t d = 0; d < dets.size(); ++d) {
    EvalReport &rep = reports[d];
    rep.detector_meta = dets[d].describe();
    rep.corpus_hash = corpus_hash;
    rep.timestamp = stamp;
    rep.rows.resize(n_regimes);
    for (int r = 0; r < n_regimes; ++r) {
      EvalResult &row = rep.rows[r];
      row.regime_name = regimes[r].name;
      double sum_real = 0, sum_fake = 0;
      for (int k = 0; k < n_clips; ++k) {
        const JobResult &jr = results[r * n_clips + k];
        const LabeledClip &lc = corpus[clip_order[k]];
        if (!jr.ok) {
          ++row.excluded;
          continue;
        }
        const double s = jr.scores[d];
        const Label predicted = classify_score(s, cfg.threshold);
        if (lc.label == Label::real) {
          ++row.n_real;
          sum_real += s;
          if (predicted == Label::real)
            ++row.auth_correct;
        } else {
          ++row.n_fake;
          sum_fake += s;
          if (predicted == Label::fake)
            ++row.det_correct;
        }
      }
      row.mean_real_score = row.n_real ? sum_real / row.n_real : 0.0;
      row.mean_fake_score = row.n_fake ? sum_fake / row.n_fake : 0.0;
    }
  }
  return reports;
}

EvalReport evaluate(const DetectorModel &detector,
                    const std::vector<LabeledClip> &corpus,
                    const std::vector<Regime> &regimes, const EvalConfig &cfg) {
  return evaluate_many({detector}, corpus, regimes, cfg)[0];
}

namespace {

std::string pct(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * v);
  return buf;
}

} // namespace

std::string render_report_markdown(const EvalReport &report) {
  std::ostringstream out;
  out << "# Evaluation report\n\n";
  out << "Detector: " << report.detector_meta << "\n\n";
  out << "Corpus: " << report.corpus_hash << "\n\n";

  out << "## Video authentication accuracy\n\n";
  out << "| Corruptions | Accuracy |\n|---|---|\n";
  for (const EvalResult &r : report.rows)
    out << "| " << r.regime_name << " | " << pct(r.auth_accuracy()) << " |\n";

  out << "\n## Deepfake detection accuracy\n\n";
  out << "| Corruptions | Accuracy |\n|---|---|\n";
  for (const EvalResult &r : report.rows)
    out << "| " << r.regime_name << " | " << pct(r.detect_accuracy()) << " |\n";

  int excluded = 0;
  for (const EvalResult &r : report.rows)
    excluded += r.excluded;
  if (excluded > 0) {
    out << "\n## Warnings\n\n";
    for (const EvalResult &r : report.rows)
      if (r.excluded > 0)
        out << "- " << r.regime_name << ": " << r.excluded
            << " clip(s) excluded after corruption failure\n";
  }
  return out.str();
}

std::string render_report_csv(const EvalReport &report) {
  std::ostringstream out;
  out << "regime,auth_accuracy,detect_accuracy,n_real,n_fake,excluded\n";
  char buf[64];
  for (const EvalResult &r : report.rows) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f", r.auth_accuracy(),
                  r.detect_accuracy());
    out << r.regime_name << ',' << buf << ',' << r.n_real << ',' << r.n_fake
        << ',' << r.excluded << '\n';
  }
  return out.str();
}

void emit_report(const EvalReport &report, const std::string &format,
                 const std::string &path) {
  std::string text;
  if (format == "csv")
    text = render_report_csv(report);
  else if (format == "markdown" || format == "md")
    text = render_report_markdown(report);
  else
    throw InvalidInput("unknown report format '" + format + "'");
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out)
    throw IoError("write failed: " + path);
}

CaseStudyResult gabon_case(const DetectorModel &detector, const Clip &clip,
                           const Regime &regime, double threshold,
                           const std::string &clip_id) {
  CaseStudyResult res;
  res.clip_id = clip_id;
  res.regime_name = regime.name;
  res.score_uncorrupted = score(detector, clip);
  res.score_corrupted = score(detector, apply_pipeline(clip, regime));
  res.label_uncorrupted = classify_score(res.score_uncorrupted, threshold);
  res.label_corrupted = classify_score(res.score_corrupted, threshold);
  return res;
}

AlignmentStudy augmentation_alignment_study(
    const std::vector<LabeledClip> &corpus, const std::vector<Regime> &regimes,
    const TrainConfig &base_cfg, const EvalConfig &eval_cfg) {
  TrainConfig with_aug = base_cfg;
  if (!with_aug.augmentation.any())
    with_aug.augmentation = AugmentationSpec::defaults();
  TrainConfig without_aug = base_cfg;
  without_aug.augmentation = AugmentationSpec{};

  const DetectorModel aug_model = train(corpus, with_aug);
  const DetectorModel plain_model = train(corpus, without_aug);

  std::vector<EvalReport> reports =
      evaluate_many({aug_model, plain_model}, corpus, regimes, eval_cfg);

  AlignmentStudy study;
  study.with_augmentation = std::move(reports[0]);
  study.without_augmentation = std::move(reports[1]);

  double bitrate_sum = 0;
  int bitrate_rows = 0;
  for (size_t i = 0; i < regimes.size(); ++i) {
    const double dd = study.with_augmentation.rows[i].detect_accuracy() -
                      study.without_augmentation.rows[i].detect_accuracy();
    const double da = study.with_augmentation.rows[i].auth_accuracy() -
                      study.without_augmentation.rows[i].auth_accuracy();
    study.detect_delta.push_back(dd);
    study.auth_delta.push_back(da);
    const auto &steps = regimes[i].steps;
    if (steps.size() == 1 && steps[0].kind == CorruptionSpec::Kind::bitrate) {
      bitrate_sum += dd;
      ++bitrate_rows;
    }
  }
  study.mean_bitrate_detect_delta =
      bitrate_rows ? bitrate_sum / bitrate_rows : 0.0;
  return study;
}

std::string render_study_markdown(const AlignmentStudy &study) {
  std::ostringstream out;
  out << "# Augmentation alignment study\n\n";
  out << "Augmented detector: " << study.with_augmentation.detector_meta
      << "\n\n";
  out << "Plain detector: " << study.without_augmentation.detector_meta
      << "\n\n";
  out << "| Corruptions | auth delta | detect delta |\n|---|---|---|\n";
  char buf[64];
  for (size_t i = 0; i < study.detect_delta.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%+.3f | %+.3f", study.auth_delta[i],
                  study.detect_delta[i]);
    out << "| " << study.with_augmentation.rows[i].regime_name << " | " << buf
        << " |\n";
  }
  std::snprintf(buf, sizeof(buf), "%+.4f", study.mean_bitrate_detect_delta);
  out << "\nMean detect-accuracy delta on bitrate regimes: " << buf << " (sign "
      << (study.mean_bitrate_detect_delta >= 0 ? "non-negative" : "negative")
      << ")\n";
  return out.str();
}

} // namespace vcb
