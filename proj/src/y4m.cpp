#include "vcb/y4m.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace vcb {

namespace {

constexpr const char *kSignature = "YUV4MPEG2";

std::vector<uint8_t> read_all(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open for reading: " + path);
  in.seekg(0, std::ios::end);
  const std::streamoff len = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<uint8_t> buf(static_cast<size_t>(len));
  if (len > 0)
    in.read(reinterpret_cast<char *>(buf.data()), len);
  if (!in)
    throw IoError("read failed: " + path);
  return buf;
}

bool parse_u32(const std::string &s, uint32_t &out) {
  if (s.empty() || s.size() > 9)
    return false;
  uint32_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9')
      return false;
    v = v * 10 + static_cast<uint32_t>(c - '0');
  }
  out = v;
  return true;
}

} // namespace

Clip read_y4m(const std::string &path) {
  const std::vector<uint8_t> buf = read_all(path);

  // Stream header line.
  size_t eol = 0;
  while (eol < buf.size() && buf[eol] != '\n')
    ++eol;
  if (eol == buf.size())
    throw ParseError(ParseError::Kind::bad_header,
                     path + ": no newline-terminated stream header", 0);
  const std::string header(reinterpret_cast<const char *>(buf.data()), eol);
  if (header.rfind(kSignature, 0) != 0)
    throw ParseError(ParseError::Kind::bad_signature,
                     path + ": missing YUV4MPEG2 signature", 0);

  uint32_t w = 0, h = 0;
  Fraction fps{25, 1};
  bool have_w = false, have_h = false;
  size_t pos = std::strlen(kSignature);
  while (pos < header.size()) {
    if (header[pos] == ' ') {
      ++pos;
      continue;
    }
    size_t end = header.find(' ', pos);
    if (end == std::string::npos)
      end = header.size();
    const std::string tag = header.substr(pos, end - pos);
    const long long tag_offset = static_cast<long long>(pos);
    const std::string val = tag.substr(1);
    switch (tag[0]) {
    case 'W':
      if (!parse_u32(val, w) || w == 0)
        throw ParseError(ParseError::Kind::bad_header,
                         path + ": bad width tag '" + tag + "'", tag_offset);
      have_w = true;
      break;
    case 'H':
      if (!parse_u32(val, h) || h == 0)
        throw ParseError(ParseError::Kind::bad_header,
                         path + ": bad height tag '" + tag + "'", tag_offset);
      have_h = true;
      break;
    case 'F': {
      const size_t colon = val.find(':');
      uint32_t num = 0, den = 0;
      if (colon == std::string::npos || !parse_u32(val.substr(0, colon), num) ||
          !parse_u32(val.substr(colon + 1), den) || num == 0 || den == 0)
        throw ParseError(ParseError::Kind::bad_header,
                         path + ": bad frame rate tag '" + tag + "'",
                         tag_offset);
      fps = Fraction{num, den};
      break;
    }
    case 'C':
      if (val != "420" && val != "420jpeg" && val != "420mpeg2" &&
          val != "420paldv")
        throw ParseError(ParseError::Kind::unsupported_chroma,
                         path + ": unsupported chroma tag '" + tag +
                             "' (only the C420 family is handled)",
                         tag_offset);
      break;
    case 'I':
    case 'A':
    case 'X':
      break; // interlacing/aspect/comments: accepted and ignored
    default:
      throw ParseError(ParseError::Kind::bad_header,
                       path + ": unknown header tag '" + tag + "'", tag_offset);
    }
    pos = end;
  }
  if (!have_w || !have_h)
    throw ParseError(ParseError::Kind::bad_header,
                     path + ": header lacks W or H tag", 0);
  if (w % 2 != 0 || h % 2 != 0)
    throw ParseError(ParseError::Kind::bad_header,
                     path + ": odd dimensions unsupported with 4:2:0", 0);

  const size_t luma_len = static_cast<size_t>(w) * h;
  const size_t chroma_len = static_cast<size_t>(w / 2) * (h / 2);
  const size_t frame_len = luma_len + 2 * chroma_len;

  Clip clip;
  clip.fps = fps;
  size_t cur = eol + 1;
  int frame_index = 0;
  while (cur < buf.size()) {
    // FRAME marker line, optional parameters tolerated.
    size_t marker_end = cur;
    while (marker_end < buf.size() && buf[marker_end] != '\n')
      ++marker_end;
    const std::string marker(reinterpret_cast<const char *>(buf.data() + cur),
                             marker_end - cur);
    if (marker_end == buf.size() || marker.rfind("FRAME", 0) != 0)
      throw ParseError(ParseError::Kind::missing_frame_marker,
                       path + ": expected FRAME marker for frame " +
                           std::to_string(frame_index),
                       static_cast<long long>(cur), frame_index);
    cur = marker_end + 1;
    if (buf.size() - cur < frame_len)
      throw ParseError(ParseError::Kind::truncated_frame,
                       path + ": truncated payload for frame " +
                           std::to_string(frame_index) + " (need " +
                           std::to_string(frame_len) + " bytes, have " +
                           std::to_string(buf.size() - cur) + ")",
                       static_cast<long long>(cur), frame_index);

    Frame frame(static_cast<int>(w), static_cast<int>(h));
    std::memcpy(frame.y.samples().data(), buf.data() + cur, luma_len);
    std::memcpy(frame.cb.samples().data(), buf.data() + cur + luma_len,
                chroma_len);
    std::memcpy(frame.cr.samples().data(),
                buf.data() + cur + luma_len + chroma_len, chroma_len);
    clip.frames.push_back(std::move(frame));
    cur += frame_len;
    ++frame_index;
  }
  if (clip.frames.empty())
    throw ParseError(ParseError::Kind::truncated_frame,
                     path + ": stream contains no frames",
                     static_cast<long long>(cur), 0);
  return clip;
}

void write_y4m(const Clip &clip, const std::string &path) {
  clip.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open for writing: " + path);

  char header[128];
  std::snprintf(header, sizeof(header), "YUV4MPEG2 W%d H%d F%u:%u Ip A1:1 C420jpeg\n",
                clip.width(), clip.height(), clip.fps.num, clip.fps.den);
  out << header;
  for (const Frame &f : clip.frames) {
    out << "FRAME\n";
    out.write(reinterpret_cast<const char *>(f.y.samples().data()),
              static_cast<std::streamsize>(f.y.samples().size()));
    out.write(reinterpret_cast<const char *>(f.cb.samples().data()),
              static_cast<std::streamsize>(f.cb.samples().size()));
    out.write(reinterpret_cast<const char *>(f.cr.samples().data()),
              static_cast<std::streamsize>(f.cr.samples().size()));
  }
  if (!out)
    throw IoError("write failed: " + path);
}

} // namespace vcb
