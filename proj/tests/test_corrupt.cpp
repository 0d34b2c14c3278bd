#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vcb/corrupt.hpp"
#include "vcb/synth.hpp"
#include "vcb/transform.hpp"

using namespace vcb;

namespace {

Clip textured_clip(uint64_t seed, int w, int h, int frames) {
  CorpusParams p;
  p.width = w;
  p.height = h;
  p.frames = frames;
  return gen_real_clip(seed, p);
}

// Constant in time, textured in space.
Clip static_clip(uint64_t seed, int w, int h, int frames) {
  Clip one = textured_clip(seed, w, h, 1);
  Clip out;
  out.fps = one.fps;
  for (int i = 0; i < frames; ++i)
    out.frames.push_back(one.frames[0]);
  return out;
}

int count_iframes(const Bitstream &bs) {
  int n = 0;
  for (const auto &f : bs.frames)
    n += f.kind == kFrameKindI;
  return n;
}

} // namespace

TEST_CASE("regime strings parse and render canonically") {
  for (const char *name :
       {"720p", "BR1.0", "BR0.5", "CRF50", "Datamosh", "240p + CRF50 + Datamosh",
        "480p + BR0.5", "Uncorrupted"}) {
    const Regime r = parse_regime(name);
    CHECK(r.name == name);
  }
  CHECK(parse_regime("").name == "Uncorrupted");
  CHECK(parse_regime("  240p+CRF50+  Datamosh ").name ==
        "240p + CRF50 + Datamosh");
  CHECK(parse_regime("BR2.5").steps[0].target_mbps == doctest::Approx(2.5));
}

TEST_CASE("malformed regimes are rejected") {
  CHECK_THROWS_AS(parse_regime("snow"), InvalidInput);
  CHECK_THROWS_AS(parse_regime("CRF99"), InvalidInput);
  CHECK_THROWS_AS(parse_regime("CRFx"), InvalidInput);
  CHECK_THROWS_AS(parse_regime("BR"), InvalidInput);
  CHECK_THROWS_AS(parse_regime("BR-2"), InvalidInput);
  CHECK_THROWS_AS(parse_regime("8p"), InvalidInput);
  CHECK_THROWS_AS(parse_regime("240p +"), InvalidInput);
  CHECK_THROWS_AS(parse_regime("Datamosh + CRF30"), InvalidInput);
  CHECK_THROWS_AS(parse_regime("CRF30 + CRF40"), InvalidInput);
  CHECK_THROWS_AS(parse_regime("240p + 480p"), InvalidInput);
}

TEST_CASE("catalog matches the table rows in order") {
  const auto &cat = regime_catalog();
  REQUIRE(cat.size() == 21);
  CHECK(cat[0].name == "720p");
  CHECK(cat[1].name == "480p");
  CHECK(cat[2].name == "240p");
  CHECK(cat[3].name == "BR1.0");
  CHECK(cat[7].name == "CRF50");
  CHECK(cat[11].name == "720p + CRF30 + Datamosh");
  CHECK(cat[19].name == "240p + CRF50 + Datamosh");
  CHECK(cat[20].name == "Uncorrupted");
  CHECK(cat[20].steps.empty());

  const Regime &r = cat[15]; // 480p + CRF40 + Datamosh
  REQUIRE(r.steps.size() == 3);
  CHECK(r.steps[0].kind == CorruptionSpec::Kind::resolution);
  CHECK(r.steps[0].target_height == 480);
  CHECK(r.steps[1].kind == CorruptionSpec::Kind::crf_encode);
  CHECK(r.steps[1].crf.value == 40);
  CHECK(r.steps[2].kind == CorruptionSpec::Kind::datamosh);

  for (const Regime &reg : cat)
    CHECK(parse_regime(reg.name).name == reg.name);
}

TEST_CASE("resolution operator is identity at the current height") {
  const Clip c = textured_clip(3, 64, 720, 2);
  CHECK(apply_resolution(c, 720) == c);
  const Clip down = apply_resolution(c, 240);
  CHECK(down.height() == 240);
  const Clip up = apply_resolution(down, 480);
  CHECK(up.height() == 480);
}

TEST_CASE("crf 0 round trip is exact on constant clips") {
  Clip c;
  for (int i = 0; i < 6; ++i)
    c.frames.emplace_back(48, 32, 90, 120);
  CHECK(apply_crf(c, Crf{0}) == c);
}

TEST_CASE("crf 30 beats crf 50 in fidelity") {
  const Clip c = textured_clip(5, 96, 64, 10);
  const double p30 = psnr(c, apply_crf(c, Crf{30}));
  const double p50 = psnr(c, apply_crf(c, Crf{50}));
  CHECK(p30 > p50);
}

TEST_CASE("repeated crf application does not improve quality") {
  const Clip c = textured_clip(6, 96, 64, 6);
  const Clip once = apply_crf(c, Crf{35});
  const Clip twice = apply_crf(once, Crf{35});
  CHECK(psnr(c, twice) <= psnr(c, once) + 1e-9);
}

TEST_CASE("pure crf family is strictly ordered on test clips") {
  for (uint64_t seed : {7ULL, 8ULL}) {
    const Clip c = textured_clip(seed, 96, 64, 8);
    const double p30 = psnr(c, apply_crf(c, Crf{30}));
    const double p40 = psnr(c, apply_crf(c, Crf{40}));
    const double p50 = psnr(c, apply_crf(c, Crf{50}));
    CHECK(p30 > p40);
    CHECK(p40 > p50);
  }
}

TEST_CASE("bitrate operator hits its target and degrades with it") {
  const Clip c = textured_clip(9, 96, 64, 8);
  const Bitstream bs = encode_at_bitrate(c, 1.0e6);
  CHECK(measure_bitrate(bs) <= 1.05e6);
  const double p_high = psnr(c, apply_bitrate(c, 1.0));
  const double p_low = psnr(c, apply_bitrate(c, 0.5));
  CHECK(p_low <= p_high);
}

TEST_CASE("unreachable bitrate propagates out of the pipeline") {
  const Clip c = textured_clip(10, 96, 64, 8);
  CHECK_THROWS_AS(apply_pipeline(c, parse_regime("BR0.0000001")),
                  UnreachableBitrate);
}

TEST_CASE("datamosh on a short clip equals the plain round trip") {
  const Clip c = textured_clip(11, 64, 48, 10); // single GOP: only frame 0 is I
  CHECK(apply_datamosh(c, Crf{23}) == apply_crf(c, Crf{23}));
}

TEST_CASE("datamosh drops one of two I-frames on a 24-frame clip") {
  const Clip c = textured_clip(12, 64, 48, 24);
  const Bitstream bs = encode(c, Crf{23});
  REQUIRE(count_iframes(bs) == 2);
  const Bitstream moshed = delete_iframes(bs);
  CHECK(count_iframes(moshed) == 1);
  CHECK(moshed.frame_count() == 23);
  const Clip out = apply_datamosh(c, Crf{23});
  CHECK(out.frame_count() == 23);
}

TEST_CASE("datamosh rejects single-frame clips") {
  const Clip c = textured_clip(13, 64, 48, 1);
  CHECK_THROWS_AS(apply_datamosh(c, Crf{23}), InvalidInput);
}

TEST_CASE("static clip moshes to within 1 dB of the plain round trip") {
  const Clip c = static_clip(14, 64, 48, 30);
  const Clip moshed = apply_datamosh(c, Crf{23});   // 28 frames (2 I dropped)
  const Clip plain = apply_crf(c, Crf{23});         // 30 frames
  REQUIRE(moshed.frame_count() == 28);
  Clip ref_m, ref_p;
  ref_m.fps = ref_p.fps = c.fps;
  for (int i = 0; i < 28; ++i) {
    ref_m.frames.push_back(c.frames[i]);
    ref_p.frames.push_back(plain.frames[i]);
  }
  Clip moshed_cut = moshed;
  const double p_mosh = psnr(ref_m, moshed_cut);
  Clip plain_cut = ref_p;
  const double p_plain = psnr(ref_m, plain_cut);
  CHECK(std::abs(p_mosh - p_plain) <= 1.0);
  // On static content the moshed decode also stays close to the unmoshed one.
  CHECK(psnr(plain_cut, moshed_cut) > 30.0);
}

TEST_CASE("empty pipeline is the identity") {
  const Clip c = textured_clip(15, 64, 48, 4);
  CHECK(apply_pipeline(c, parse_regime("Uncorrupted")) == c);
}

TEST_CASE("identity resolution step collapses to the bitrate operator") {
  const Clip c = textured_clip(16, 64, 720, 4);
  const Clip via_pipeline = apply_pipeline(c, parse_regime("720p + BR1.0"));
  const Clip direct = apply_bitrate(c, 1.0);
  CHECK(via_pipeline == direct);
}

TEST_CASE("combined regime lands at 240p with exactly one I-frame") {
  const Clip c = textured_clip(17, 128, 96, 24);
  const Clip out = apply_pipeline(c, parse_regime("240p + CRF50 + Datamosh"));
  CHECK(out.height() == 240);
  CHECK(out.frame_count() == 23);
  // The shared encode: inspect the intermediate stream directly.
  const Clip at_res = apply_resolution(c, 240);
  const Bitstream inter = delete_iframes(encode(at_res, Crf{50}));
  CHECK(count_iframes(inter) == 1);
  CHECK(decode(inter) == out);
}

TEST_CASE("crf before datamosh shares one encode, no double round trip") {
  const Clip c = textured_clip(18, 64, 48, 24);
  const Clip piped = apply_pipeline(c, parse_regime("CRF30 + Datamosh"));
  const Clip shared = decode(delete_iframes(encode(c, Crf{30})));
  CHECK(piped == shared);
  // A double round trip would differ: decode(encode) then mosh again.
  const Clip doubled = apply_datamosh(apply_crf(c, Crf{30}), Crf{30});
  CHECK(piped.frame_count() == 23);
  CHECK(doubled.frame_count() == 23);
}

TEST_CASE("resolution family fidelity is ordered at matched dimensions") {
  const Clip c = textured_clip(19, 320, 180, 4);
  double prev = 1e18;
  for (int target : {168, 120, 60}) {
    const Clip down = apply_resolution(c, target);
    Clip back;
    back.fps = c.fps;
    for (const Frame &f : down.frames)
      back.frames.push_back(rescale_frame(f, 320, 180));
    const double p = psnr(c, back);
    CHECK(p <= prev + 1e-12);
    prev = p;
  }
}

TEST_CASE("pipelines are deterministic") {
  const Clip c = textured_clip(20, 64, 48, 24);
  const Regime r = parse_regime("240p + CRF50 + Datamosh");
  CHECK(apply_pipeline(c, r) == apply_pipeline(c, r));
}

TEST_CASE("every catalog regime terminates on a small textured clip") {
  const Clip c = textured_clip(21, 64, 48, 13);
  for (const Regime &r : regime_catalog()) {
    const Clip out = apply_pipeline(c, r);
    CHECK(out.frame_count() >= 12);
    out.validate();
  }
}

TEST_CASE("pipeline step errors carry the step index") {
  Clip single = textured_clip(22, 64, 48, 1);
  try {
    apply_pipeline(single, parse_regime("240p + Datamosh"));
    FAIL("expected step failure");
  } catch (const InvalidInput &e) {
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}
