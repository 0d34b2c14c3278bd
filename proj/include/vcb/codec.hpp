#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vcb/frame.hpp"
#include "vcb/kernels.hpp"
#include "vcb/transform.hpp"

namespace vcb {

struct GopConfig {
  int gop_size = 12;
  static constexpr int block_size = 16;
  int search_range = 7;

  void validate() const {
    if (gop_size < 1)
      throw InvalidInput("gop_size must be >= 1");
    if (search_range < 0 || search_range > 15)
      throw InvalidInput("search_range must be in [0, 15]");
  }
};

inline constexpr uint8_t kFrameKindI = 'I';
inline constexpr uint8_t kFrameKindP = 'P';

struct FrameRecord {
  uint8_t kind = kFrameKindI;
  std::vector<uint8_t> payload;
};

/// Serialized encoded video. File form (.tvc): magic "TVC1", seven
/// little-endian u32 header fields, then frame records
/// {u8 kind, u32 payload_len, payload}. See docs/tvc_format.md.
struct Bitstream {
  uint32_t width = 0;
  uint32_t height = 0;
  Fraction fps{25, 1};
  uint32_t gop_size = 12;
  uint32_t crf = 23;
  std::vector<FrameRecord> frames;

  uint32_t frame_count() const { return static_cast<uint32_t>(frames.size()); }
};

/// Per-16x16-block exhaustive SAD motion field (delegates to kernels).
kernels::MotionField estimate_motion(const Frame &reference,
                                     const Frame &target,
                                     const GopConfig &cfg);

/// Closed-loop encoder: frame 0 and every gop_size-th frame are intra;
/// the rest are predicted from the previously reconstructed frame.
Bitstream encode(const Clip &clip, Crf crf, const GopConfig &cfg = {});

/// Exact inverse of the encoder's reconstruction loop.
Clip decode(const Bitstream &bs);

/// Payload bits times fps over frame count.
double measure_bitrate(const Bitstream &bs);

/// Smallest crf in [0, 51] whose measured bitrate is <= 1.05 * target,
/// found by binary search. Throws UnreachableBitrate when even crf 51 is
/// too large.
Bitstream encode_at_bitrate(const Clip &clip, double target_bps,
                            const GopConfig &cfg = {});

std::vector<uint8_t> serialize_bitstream(const Bitstream &bs);
Bitstream parse_bitstream(const std::vector<uint8_t> &bytes);

Bitstream read_tvc(const std::string &path);
void write_tvc(const Bitstream &bs, const std::string &path);

/// CRC-32 (IEEE, reflected); guards each frame payload.
uint32_t crc32(const uint8_t *data, size_t len);

} // namespace vcb
