#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vcb/frame.hpp"

namespace vcb {

enum class Label { real, fake };

inline const char *label_name(Label l) { return l == Label::real ? "real" : "fake"; }

struct CorpusParams {
  int clip_count = 20; // per class
  int frames = 48;
  int width = 256;
  int height = 144;
  Fraction fps{25, 1};
  uint64_t seed = 7;
  double artifact_strength = 0.5;

  void validate() const;
};

struct LabeledClip {
  Clip clip;
  Label label = Label::real;
  int pair_id = 0;
  uint64_t seed = 0;
};

struct ManifestRow {
  int pair_id = 0;
  Label label = Label::real;
  uint64_t seed = 0;
  int width = 0, height = 0, frames = 0;
  Fraction fps{25, 1};
};

struct CorpusManifest {
  std::vector<ManifestRow> rows;

  std::string to_tsv() const;
  static CorpusManifest from_tsv(const std::string &text);
};

/// Deterministic synthetic scene: drifting band-limited background plus a
/// translating textured ellipse.
Clip gen_real_clip(uint64_t seed, const CorpusParams &params);

/// Copies the real clip and re-composites the ellipse region with the
/// three classic blend artifacts: feathered alpha boundary, per-channel
/// affine color mismatch (scaled by artifact_strength), and a slight
/// interior low-pass. `seed` must be the real clip's generation seed so
/// the patch tracks the ellipse.
Clip gen_fake_clip(const Clip &real, uint64_t seed, const CorpusParams &params);

/// clip_count real clips and their paired fakes, ordered by pair id with
/// real before fake.
std::vector<LabeledClip> gen_corpus(const CorpusParams &params,
                                    CorpusManifest *manifest = nullptr);

/// Directory layout: <pair_id>_{real|fake}.y4m plus manifest.tsv.
void write_corpus(const std::vector<LabeledClip> &corpus,
                  const CorpusManifest &manifest, const std::string &dir);
std::vector<LabeledClip> load_corpus(const std::string &dir,
                                     CorpusManifest *manifest = nullptr);

uint64_t fnv1a64(const void *data, size_t len);
std::string manifest_hash_hex(const CorpusManifest &manifest);

} // namespace vcb
