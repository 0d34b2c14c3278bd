#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vcb/codec.hpp"
#include "vcb/frame.hpp"

namespace vcb {

/// One declarative corruption step.
struct CorruptionSpec {
  enum class Kind { resolution, bitrate, crf_encode, datamosh };

  Kind kind = Kind::datamosh;
  int target_height = 0;   // resolution
  double target_mbps = 0;  // bitrate
  Crf crf{23};             // crf_encode

  static CorruptionSpec resolution(int height);
  static CorruptionSpec bitrate(double mbps);
  static CorruptionSpec crf_encode(Crf crf);
  static CorruptionSpec datamosh();

  bool operator==(const CorruptionSpec &) const = default;
};

/// Named ordered pipeline of steps (one table row). The name is always the
/// canonical rendering of the steps; "Uncorrupted" is the empty pipeline.
struct Regime {
  std::string name;
  std::vector<CorruptionSpec> steps;
};

/// Builds a regime with the canonical name; validates that Datamosh is
/// last and each step kind appears at most once.
Regime make_regime(std::vector<CorruptionSpec> steps);

/// Canonical rendering: "240p + CRF50 + Datamosh", "BR1.0", "Uncorrupted".
std::string format_steps(const std::vector<CorruptionSpec> &steps);

/// Grammar: regime := step ("+" step)*, step := <height>"p" | "BR"<mbps> |
/// "CRF"<int> | "Datamosh"; whitespace-insensitive. "Uncorrupted" and the
/// empty string parse to the empty pipeline.
Regime parse_regime(std::string_view text);

Clip apply_resolution(const Clip &clip, int target_height);
Clip apply_crf(const Clip &clip, Crf crf);
Clip apply_bitrate(const Clip &clip, double target_mbps);

/// Encode at `crf`, delete every I-frame except frame 0, decode. Needs at
/// least two frames.
Clip apply_datamosh(const Clip &clip, Crf crf = Crf{23});

/// Drops all intra frames after frame 0 from the stream.
Bitstream delete_iframes(const Bitstream &bs);

/// Left-to-right application. A CrfEncode or Bitrate step immediately
/// followed by Datamosh shares its single encode with the mosh.
Clip apply_pipeline(const Clip &clip, const Regime &regime);

/// The 20 corruption rows of the evaluation tables, in table order, plus
/// the terminal "Uncorrupted" empty pipeline. Exactly 21 entries.
const std::vector<Regime> &regime_catalog();

} // namespace vcb
