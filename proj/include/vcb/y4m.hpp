#pragma once

#include <string>

#include "vcb/frame.hpp"

namespace vcb {

/// Reads a YUV4MPEG2 stream. Accepts the C420 chroma family
/// (C420, C420jpeg, C420mpeg2, C420paldv); anything else is an
/// unsupported_chroma parse error. Frames are read until end of file;
/// a short final frame raises truncated_frame naming the frame index.
Clip read_y4m(const std::string &path);

/// Writes `YUV4MPEG2 W<w> H<h> F<num>:<den> Ip A1:1 C420jpeg` followed by
/// FRAME-delimited planar payloads. read_y4m(write_y4m(clip)) == clip.
void write_y4m(const Clip &clip, const std::string &path);

} // namespace vcb
