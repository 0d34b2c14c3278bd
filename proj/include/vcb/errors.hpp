#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vcb {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad argument or malformed domain object (wrong dimensions, empty clip, ...).
class InvalidInput : public Error {
public:
  using Error::Error;
};

/// Filesystem failure: open/read/write/create.
class IoError : public Error {
public:
  using Error::Error;
};

/// Malformed file content (.y4m or .tvc). Carries enough position info to
/// point at the offending byte or frame.
class ParseError : public Error {
public:
  enum class Kind {
    bad_signature,
    bad_header,
    unsupported_chroma,
    missing_frame_marker,
    truncated_frame,
    bad_magic,
    truncated_stream,
    bad_frame_kind,
    checksum_mismatch,
    coefficient_overflow,
    motion_vector_range,
    bad_run,
    trailing_bytes,
  };

  ParseError(Kind kind, const std::string &msg, long long byte_offset = -1,
             int frame_index = -1)
      : Error(msg), kind(kind), byte_offset(byte_offset),
        frame_index(frame_index) {}

  Kind kind;
  long long byte_offset; // -1 when not applicable
  int frame_index;       // -1 when not applicable
};

/// encode_at_bitrate cannot reach the target even at the worst quality.
class UnreachableBitrate : public Error {
public:
  UnreachableBitrate(double target_bps, double crf51_bps)
      : Error("target bitrate " + std::to_string(target_bps) +
              " bit/s unreachable; crf 51 yields " +
              std::to_string(crf51_bps) + " bit/s"),
        target_bps(target_bps), crf51_bps(crf51_bps) {}

  double target_bps;
  double crf51_bps;
};

} // namespace vcb
