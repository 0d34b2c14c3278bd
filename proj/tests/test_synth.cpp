#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <doctest.h>

#include <filesystem>
#include <set>

#include "vcb/synth.hpp"
#include "vcb/transform.hpp"

using namespace vcb;

namespace {

CorpusParams small_params() {
  CorpusParams p;
  p.clip_count = 3;
  p.frames = 8;
  p.width = 128;
  p.height = 72;
  p.seed = 77;
  return p;
}

} // namespace

TEST_CASE("same seed regenerates bit-identical clips") {
  const CorpusParams p = small_params();
  CHECK(gen_real_clip(5, p) == gen_real_clip(5, p));
  const Clip real = gen_real_clip(5, p);
  CHECK(gen_fake_clip(real, 5, p) == gen_fake_clip(real, 5, p));
}

TEST_CASE("different seeds give mostly different luma") {
  const CorpusParams p = small_params();
  const Clip a = gen_real_clip(1, p);
  const Clip b = gen_real_clip(2, p);
  size_t differing = 0, total = 0;
  for (int i = 0; i < a.frame_count(); ++i) {
    const auto &sa = a.frames[i].y.samples();
    const auto &sb = b.frames[i].y.samples();
    for (size_t k = 0; k < sa.size(); ++k) {
      differing += sa[k] != sb[k];
      ++total;
    }
  }
  CHECK(differing > total / 2);
}

TEST_CASE("generated geometry matches the params") {
  const CorpusParams p = small_params();
  const Clip c = gen_real_clip(9, p);
  CHECK(c.width() == 128);
  CHECK(c.height() == 72);
  CHECK(c.frame_count() == 8);
  CHECK(c.fps == Fraction{25, 1});
}

TEST_CASE("vanishing artifact strength approaches the real clip") {
  CorpusParams p = small_params();
  const Clip real = gen_real_clip(11, p);
  p.artifact_strength = 0.01;
  const Clip fake = gen_fake_clip(real, 11, p);
  CHECK(psnr(real, fake) > 45.0);
}

TEST_CASE("fakes differ inside the patch and nowhere else") {
  CorpusParams p = small_params();
  const Clip real = gen_real_clip(13, p);
  const Clip fake = gen_fake_clip(real, 13, p);

  size_t diff = 0;
  for (int t = 0; t < real.frame_count(); ++t) {
    const auto &ry = real.frames[t].y.samples();
    const auto &fy = fake.frames[t].y.samples();
    for (size_t k = 0; k < ry.size(); ++k)
      diff += ry[k] != fy[k];
    // Corners lie far outside the ellipse: untouched.
    CHECK(real.frames[t].y.at(0, 0) == fake.frames[t].y.at(0, 0));
    CHECK(real.frames[t].y.at(127, 71) == fake.frames[t].y.at(127, 71));
    CHECK(real.frames[t].cb.at(0, 0) == fake.frames[t].cb.at(0, 0));
  }
  CHECK(diff > 0);
}

TEST_CASE("fake differences form one compact patch per frame") {
  CorpusParams p = small_params();
  const Clip real = gen_real_clip(15, p);
  const Clip fake = gen_fake_clip(real, 15, p);
  // All differing pixels must sit inside one ellipse-sized neighborhood:
  // max patch radius + feather + slack.
  const double max_extent = 42.0;
  for (int t = 0; t < real.frame_count(); ++t) {
    const Plane &ry = real.frames[t].y;
    const Plane &fy = fake.frames[t].y;
    double sx = 0, sy = 0;
    int n = 0;
    for (int y = 0; y < ry.height(); ++y)
      for (int x = 0; x < ry.width(); ++x)
        if (ry.at(x, y) != fy.at(x, y)) {
          sx += x;
          sy += y;
          ++n;
        }
    REQUIRE(n > 0);
    const double cx = sx / n, cy = sy / n;
    for (int y = 0; y < ry.height(); ++y)
      for (int x = 0; x < ry.width(); ++x)
        if (ry.at(x, y) != fy.at(x, y)) {
          const double d = std::hypot(x - cx, y - cy);
          CHECK(d <= max_extent);
        }
  }
}

TEST_CASE("corpus pairs are balanced and linked") {
  CorpusParams p = small_params();
  CorpusManifest manifest;
  const auto corpus = gen_corpus(p, &manifest);
  REQUIRE(corpus.size() == 6);
  REQUIRE(manifest.rows.size() == 6);
  int reals = 0, fakes = 0;
  std::set<int> pair_ids;
  for (const auto &lc : corpus) {
    (lc.label == Label::real ? reals : fakes)++;
    pair_ids.insert(lc.pair_id);
  }
  CHECK(reals == 3);
  CHECK(fakes == 3);
  CHECK(pair_ids.size() == 3);
  // Paired clips share a seed and dimensions.
  for (size_t i = 0; i + 1 < corpus.size(); i += 2) {
    CHECK(corpus[i].label == Label::real);
    CHECK(corpus[i + 1].label == Label::fake);
    CHECK(corpus[i].pair_id == corpus[i + 1].pair_id);
    CHECK(corpus[i].seed == corpus[i + 1].seed);
  }
}

TEST_CASE("regeneration is bit-exact, manifest hash stable") {
  const CorpusParams p = small_params();
  CorpusManifest m1, m2;
  const auto c1 = gen_corpus(p, &m1);
  const auto c2 = gen_corpus(p, &m2);
  REQUIRE(c1.size() == c2.size());
  for (size_t i = 0; i < c1.size(); ++i)
    CHECK(c1[i].clip == c2[i].clip);
  CHECK(manifest_hash_hex(m1) == manifest_hash_hex(m2));
}

TEST_CASE("manifest text round trips") {
  CorpusParams p = small_params();
  CorpusManifest m;
  gen_corpus(p, &m);
  const std::string tsv = m.to_tsv();
  const CorpusManifest back = CorpusManifest::from_tsv(tsv);
  CHECK(back.to_tsv() == tsv);
  CHECK_THROWS_AS(CorpusManifest::from_tsv("garbage\n1\t2\n"), ParseError);
}

TEST_CASE("corpus written to disk loads back identically") {
  const auto dir =
      (std::filesystem::temp_directory_path() / "vcb_corpus_test").string();
  std::filesystem::remove_all(dir);
  const CorpusParams p = small_params();
  CorpusManifest manifest;
  const auto corpus = gen_corpus(p, &manifest);
  write_corpus(corpus, manifest, dir);
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "0000_real.y4m"));
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "0002_fake.y4m"));

  CorpusManifest loaded_manifest;
  const auto loaded = load_corpus(dir, &loaded_manifest);
  REQUIRE(loaded.size() == corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    CHECK(loaded[i].clip == corpus[i].clip);
    CHECK(loaded[i].label == corpus[i].label);
    CHECK(loaded[i].pair_id == corpus[i].pair_id);
    CHECK(loaded[i].seed == corpus[i].seed);
  }
  CHECK(loaded_manifest.to_tsv() == manifest.to_tsv());
  std::filesystem::remove_all(dir);
}

TEST_CASE("params are validated") {
  CorpusParams p = small_params();
  p.clip_count = 0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = small_params();
  p.width = 30;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = small_params();
  p.artifact_strength = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = small_params();
  p.artifact_strength = 1.5;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
}
