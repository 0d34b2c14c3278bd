#include "vcb/corrupt.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace vcb {

CorruptionSpec CorruptionSpec::resolution(int height) {
  if (height < 16)
    throw InvalidInput("resolution step target height must be >= 16");
  CorruptionSpec s;
  s.kind = Kind::resolution;
  s.target_height = height;
  return s;
}

CorruptionSpec CorruptionSpec::bitrate(double mbps) {
  if (!(mbps > 0))
    throw InvalidInput("bitrate step target must be positive");
  CorruptionSpec s;
  s.kind = Kind::bitrate;
  s.target_mbps = mbps;
  return s;
}

CorruptionSpec CorruptionSpec::crf_encode(Crf crf) {
  CorruptionSpec s;
  s.kind = Kind::crf_encode;
  s.crf = crf;
  return s;
}

CorruptionSpec CorruptionSpec::datamosh() {
  CorruptionSpec s;
  s.kind = Kind::datamosh;
  return s;
}

namespace {

std::string format_mbps(double mbps) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", mbps);
  std::string s(buf);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos)
    s += ".0";
  return s;
}

std::string format_step(const CorruptionSpec &s) {
  switch (s.kind) {
  case CorruptionSpec::Kind::resolution:
    return std::to_string(s.target_height) + "p";
  case CorruptionSpec::Kind::bitrate:
    return "BR" + format_mbps(s.target_mbps);
  case CorruptionSpec::Kind::crf_encode:
    return "CRF" + std::to_string(s.crf.value);
  case CorruptionSpec::Kind::datamosh:
    return "Datamosh";
  }
  return "?";
}

} // namespace

std::string format_steps(const std::vector<CorruptionSpec> &steps) {
  if (steps.empty())
    return "Uncorrupted";
  std::string out;
  for (size_t i = 0; i < steps.size(); ++i) {
    if (i)
      out += " + ";
    out += format_step(steps[i]);
  }
  return out;
}

Regime make_regime(std::vector<CorruptionSpec> steps) {
  int counts[4] = {0, 0, 0, 0};
  for (size_t i = 0; i < steps.size(); ++i) {
    counts[static_cast<int>(steps[i].kind)]++;
    if (steps[i].kind == CorruptionSpec::Kind::datamosh &&
        i + 1 != steps.size())
      throw InvalidInput("Datamosh must be the final pipeline step");
  }
  for (int c : counts)
    if (c > 1)
      throw InvalidInput("at most one step of each kind per regime");
  Regime r;
  r.name = format_steps(steps);
  r.steps = std::move(steps);
  return r;
}

Regime parse_regime(std::string_view text) {
  std::string compact;
  compact.reserve(text.size());
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)))
      compact += c;

  if (compact.empty() || compact == "Uncorrupted")
    return make_regime({});

  std::vector<CorruptionSpec> steps;
  size_t pos = 0;
  while (pos <= compact.size()) {
    size_t plus = compact.find('+', pos);
    if (plus == std::string::npos)
      plus = compact.size();
    const std::string tok = compact.substr(pos, plus - pos);
    if (tok.empty())
      throw InvalidInput("empty step in regime string '" + std::string(text) + "'");

    if (tok == "Datamosh") {
      steps.push_back(CorruptionSpec::datamosh());
    } else if (tok.rfind("CRF", 0) == 0) {
      int v = 0;
      const char *b = tok.data() + 3;
      const char *e = tok.data() + tok.size();
      auto [p, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || p != e)
        throw InvalidInput("bad CRF step '" + tok + "'");
      steps.push_back(CorruptionSpec::crf_encode(Crf{v}));
    } else if (tok.rfind("BR", 0) == 0) {
      char *end = nullptr;
      const std::string num = tok.substr(2);
      const double v = std::strtod(num.c_str(), &end);
      if (num.empty() || end != num.c_str() + num.size())
        throw InvalidInput("bad BR step '" + tok + "'");
      steps.push_back(CorruptionSpec::bitrate(v));
    } else if (tok.back() == 'p') {
      int v = 0;
      const char *b = tok.data();
      const char *e = tok.data() + tok.size() - 1;
      auto [p, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || p != e)
        throw InvalidInput("bad resolution step '" + tok + "'");
      steps.push_back(CorruptionSpec::resolution(v));
    } else {
      throw InvalidInput("unknown regime step '" + tok + "'");
    }
    if (plus == compact.size())
      break;
    pos = plus + 1;
  }
  return make_regime(std::move(steps));
}

Clip apply_resolution(const Clip &clip, int target_height) {
  return rescale(clip, target_height);
}

Clip apply_crf(const Clip &clip, Crf crf) {
  return decode(encode(clip, crf, GopConfig{}));
}

Clip apply_bitrate(const Clip &clip, double target_mbps) {
  if (!(target_mbps > 0))
    throw InvalidInput("bitrate target must be positive");
  return decode(encode_at_bitrate(clip, target_mbps * 1e6, GopConfig{}));
}

Bitstream delete_iframes(const Bitstream &bs) {
  Bitstream out;
  out.width = bs.width;
  out.height = bs.height;
  out.fps = bs.fps;
  out.gop_size = bs.gop_size;
  out.crf = bs.crf;
  for (size_t i = 0; i < bs.frames.size(); ++i)
    if (i == 0 || bs.frames[i].kind != kFrameKindI)
      out.frames.push_back(bs.frames[i]);
  return out;
}

Clip apply_datamosh(const Clip &clip, Crf crf) {
  clip.validate();
  if (clip.frame_count() < 2)
    throw InvalidInput("datamosh needs at least two frames");
  return decode(delete_iframes(encode(clip, crf, GopConfig{})));
}

namespace {

Clip apply_step(const Clip &clip, const CorruptionSpec &step) {
  switch (step.kind) {
  case CorruptionSpec::Kind::resolution:
    return apply_resolution(clip, step.target_height);
  case CorruptionSpec::Kind::bitrate:
    return apply_bitrate(clip, step.target_mbps);
  case CorruptionSpec::Kind::crf_encode:
    return apply_crf(clip, step.crf);
  case CorruptionSpec::Kind::datamosh:
    return apply_datamosh(clip);
  }
  throw InvalidInput("unknown corruption step");
}

} // namespace

Clip apply_pipeline(const Clip &clip, const Regime &regime) {
  Clip cur = clip;
  for (size_t i = 0; i < regime.steps.size(); ++i) {
    const CorruptionSpec &step = regime.steps[i];
    const bool mosh_next =
        i + 1 < regime.steps.size() &&
        regime.steps[i + 1].kind == CorruptionSpec::Kind::datamosh;
    try {
      if (mosh_next && (step.kind == CorruptionSpec::Kind::crf_encode ||
                        step.kind == CorruptionSpec::Kind::bitrate)) {
        // One shared encode: the mosh reuses the step's stream instead of
        // a second lossy round-trip.
        cur.validate();
        if (cur.frame_count() < 2)
          throw InvalidInput("datamosh needs at least two frames");
        Bitstream bs = step.kind == CorruptionSpec::Kind::crf_encode
                           ? encode(cur, step.crf, GopConfig{})
                           : encode_at_bitrate(cur, step.target_mbps * 1e6,
                                               GopConfig{});
        cur = decode(delete_iframes(bs));
        ++i;
      } else {
        cur = apply_step(cur, step);
      }
    } catch (const UnreachableBitrate &) {
      throw; // callers branch on this one; it already names the cause
    } catch (const Error &e) {
      throw InvalidInput("pipeline step " + std::to_string(i) + " (" +
                         format_step(step) + ") failed: " + e.what());
    }
  }
  return cur;
}

const std::vector<Regime> &regime_catalog() {
  static const std::vector<Regime> catalog = [] {
    const char *names[] = {
        "720p",
        "480p",
        "240p",
        "BR1.0",
        "BR0.5",
        "CRF30",
        "CRF40",
        "CRF50",
        "720p + BR1.0",
        "720p + BR0.5",
        "720p + CRF30",
        "720p + CRF30 + Datamosh",
        "480p + BR1.0",
        "480p + BR0.5",
        "480p + CRF40",
        "480p + CRF40 + Datamosh",
        "240p + BR1.0",
        "240p + BR0.5",
        "240p + CRF50",
        "240p + CRF50 + Datamosh",
        "Uncorrupted",
    };
    std::vector<Regime> list;
    for (const char *n : names)
      list.push_back(parse_regime(n));
    return list;
  }();
  return catalog;
}

} // namespace vcb
