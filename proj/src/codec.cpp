#include "vcb/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

namespace vcb {

namespace {

constexpr char kMagic[4] = {'T', 'V', 'C', '1'};

// ---- byte stream helpers ---------------------------------------------------

class ByteWriter {
public:
  std::vector<uint8_t> bytes;

  void u8(uint8_t v) { bytes.push_back(v); }
  void u32(uint32_t v) {
    bytes.push_back(static_cast<uint8_t>(v));
    bytes.push_back(static_cast<uint8_t>(v >> 8));
    bytes.push_back(static_cast<uint8_t>(v >> 16));
    bytes.push_back(static_cast<uint8_t>(v >> 24));
  }
  void varint(uint64_t v) {
    while (v >= 0x80) {
      bytes.push_back(static_cast<uint8_t>(v) | 0x80);
      v >>= 7;
    }
    bytes.push_back(static_cast<uint8_t>(v));
  }
  void svarint(int64_t v) {
    varint((static_cast<uint64_t>(v) << 1) ^ static_cast<uint64_t>(v >> 63));
  }
};

// Reader over one frame body; failures name the owning frame.
class BodyReader {
public:
  BodyReader(const uint8_t *data, size_t len, int frame_index)
      : data_(data), len_(len), frame_(frame_index) {}

  uint64_t varint() {
    uint64_t v = 0;
    int shift = 0;
    while (true) {
      if (pos_ >= len_)
        throw ParseError(ParseError::Kind::truncated_frame,
                         "frame " + std::to_string(frame_) +
                             ": payload ends inside a varint",
                         -1, frame_);
      const uint8_t b = data_[pos_++];
      v |= static_cast<uint64_t>(b & 0x7f) << shift;
      if (!(b & 0x80))
        return v;
      shift += 7;
      if (shift > 63)
        throw ParseError(ParseError::Kind::truncated_frame,
                         "frame " + std::to_string(frame_) +
                             ": varint longer than 64 bits",
                         -1, frame_);
    }
  }
  int64_t svarint() {
    const uint64_t raw = varint();
    return static_cast<int64_t>(raw >> 1) ^ -static_cast<int64_t>(raw & 1);
  }
  bool done() const { return pos_ == len_; }
  int frame_index() const { return frame_; }

private:
  const uint8_t *data_;
  size_t len_;
  size_t pos_ = 0;
  int frame_;
};

// ---- run-length coding -------------------------------------------------------
//
// Within a coded block: (zero_run, level) pairs in zigzag order with an
// end-of-block pair (0, 0) unless the block fills to position 64. Across a
// plane: a varint run of all-zero blocks precedes every coded block, so
// empty regions cost about a byte instead of a marker per block. Motion
// fields are runs of identical vectors: (count, dx, dy).

void write_block_runs(ByteWriter &w, const QuantBlock &coeffs) {
  const auto &order = zigzag_order();
  int run = 0;
  int pos = 0;
  for (int i = 0; i < 64; ++i) {
    const int32_t v = coeffs[order[i]];
    if (v == 0) {
      ++run;
      continue;
    }
    w.varint(static_cast<uint64_t>(run));
    w.svarint(v);
    run = 0;
    pos = i + 1;
  }
  if (pos < 64) { // end-of-block: level 0 is reserved for this marker
    w.varint(0);
    w.svarint(0);
  }
}

QuantBlock read_block_runs(BodyReader &r) {
  const auto &order = zigzag_order();
  QuantBlock out{};
  int pos = 0;
  while (pos < 64) {
    const uint64_t run = r.varint();
    const int64_t level = r.svarint();
    if (level == 0)
      return out; // end of block
    if (run > static_cast<uint64_t>(63 - pos))
      throw ParseError(ParseError::Kind::coefficient_overflow,
                       "frame " + std::to_string(r.frame_index()) +
                           ": coefficient run past position 64",
                       -1, r.frame_index());
    pos += static_cast<int>(run);
    out[order[pos]] = static_cast<int32_t>(level);
    ++pos;
  }
  return out;
}

bool block_is_zero(const QuantBlock &b) {
  for (int32_t v : b)
    if (v != 0)
      return false;
  return true;
}

void write_plane_blocks(ByteWriter &w, const std::vector<QuantBlock> &blocks) {
  size_t i = 0;
  while (i < blocks.size()) {
    size_t zrun = 0;
    while (i + zrun < blocks.size() && block_is_zero(blocks[i + zrun]))
      ++zrun;
    w.varint(zrun);
    i += zrun;
    if (i == blocks.size())
      break;
    write_block_runs(w, blocks[i]);
    ++i;
  }
}

void read_plane_blocks(BodyReader &r, std::vector<QuantBlock> &blocks) {
  size_t i = 0;
  while (i < blocks.size()) {
    const uint64_t zrun = r.varint();
    if (zrun > blocks.size() - i)
      throw ParseError(ParseError::Kind::bad_run,
                       "frame " + std::to_string(r.frame_index()) +
                           ": zero-block run past plane end",
                       -1, r.frame_index());
    for (uint64_t k = 0; k < zrun; ++k)
      blocks[i++].fill(0);
    if (i == blocks.size())
      break;
    blocks[i++] = read_block_runs(r);
  }
}

void write_motion_runs(ByteWriter &w, const std::vector<kernels::Mv> &mv) {
  size_t i = 0;
  while (i < mv.size()) {
    size_t run = 1;
    while (i + run < mv.size() && mv[i + run] == mv[i])
      ++run;
    w.varint(run);
    w.svarint(mv[i].dx);
    w.svarint(mv[i].dy);
    i += run;
  }
}

void read_motion_runs(BodyReader &r, std::vector<kernels::Mv> &mv) {
  size_t i = 0;
  while (i < mv.size()) {
    const uint64_t run = r.varint();
    if (run == 0 || run > mv.size() - i)
      throw ParseError(ParseError::Kind::bad_run,
                       "frame " + std::to_string(r.frame_index()) +
                           ": motion run of length " + std::to_string(run),
                       -1, r.frame_index());
    const int64_t dx = r.svarint();
    const int64_t dy = r.svarint();
    if (dx < -15 || dx > 15 || dy < -15 || dy > 15)
      throw ParseError(ParseError::Kind::motion_vector_range,
                       "frame " + std::to_string(r.frame_index()) +
                           ": motion vector out of range",
                       -1, r.frame_index());
    const kernels::Mv v{static_cast<int8_t>(dx), static_cast<int8_t>(dy)};
    for (uint64_t k = 0; k < run; ++k)
      mv[i++] = v;
  }
}

// ---- plane geometry ---------------------------------------------------------

struct CodedGeometry {
  int w, h;       // declared luma dimensions
  int lw, lh;     // padded luma (multiple of 16)
  int cw, ch;     // padded chroma (multiple of 8)

  explicit CodedGeometry(int width, int height)
      : w(width), h(height), lw((width + 15) / 16 * 16),
        lh((height + 15) / 16 * 16), cw(lw / 2), ch(lh / 2) {}
};

Plane pad_plane(const Plane &src, int pw, int ph) {
  if (src.width() == pw && src.height() == ph)
    return src;
  Plane out(pw, ph);
  const int sw = src.width();
  const int sh = src.height();
  for (int y = 0; y < ph; ++y) {
    const uint8_t *srow = src.row(y < sh ? y : sh - 1);
    uint8_t *drow = out.row(y);
    std::memcpy(drow, srow, static_cast<size_t>(sw));
    std::memset(drow + sw, srow[sw - 1], static_cast<size_t>(pw - sw));
  }
  return out;
}

Plane crop_plane(const Plane &src, int w, int h) {
  if (src.width() == w && src.height() == h)
    return src;
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    std::memcpy(out.row(y), src.row(y), static_cast<size_t>(w));
  return out;
}

std::vector<int16_t> plane_diff(const Plane &target, const Plane &pred) {
  std::vector<int16_t> out(static_cast<size_t>(target.width()) *
                           target.height());
  const int64_t n = static_cast<int64_t>(out.size());
  const uint8_t *t = target.samples().data();
  const uint8_t *p = pred.samples().data();
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i)
    out[i] = static_cast<int16_t>(static_cast<int>(t[i]) - p[i]);
  return out;
}

struct RefPlanes {
  Plane y, cb, cr;
};

// Shared by encoder and decoder so reconstructions cannot drift.
RefPlanes reconstruct_frame(const std::vector<QuantBlock> &cy,
                            const std::vector<QuantBlock> &ccb,
                            const std::vector<QuantBlock> &ccr,
                            const RefPlanes &pred, double qscale) {
  RefPlanes out;
  out.y = kernels::reconstruct_plane(cy, pred.y, jpeg_luma_quant(), qscale);
  out.cb = kernels::reconstruct_plane(ccb, pred.cb, jpeg_chroma_quant(), qscale);
  out.cr = kernels::reconstruct_plane(ccr, pred.cr, jpeg_chroma_quant(), qscale);
  return out;
}

RefPlanes predict(const RefPlanes &ref, const kernels::MotionField &field) {
  RefPlanes out;
  out.y = kernels::motion_compensate(ref.y, field, 16, 1);
  out.cb = kernels::motion_compensate(ref.cb, field, 8, 2);
  out.cr = kernels::motion_compensate(ref.cr, field, 8, 2);
  return out;
}

RefPlanes flat_prediction(const CodedGeometry &g) {
  return RefPlanes{Plane(g.lw, g.lh, 128), Plane(g.cw, g.ch, 128),
                   Plane(g.cw, g.ch, 128)};
}

} // namespace

uint32_t crc32(const uint8_t *data, size_t len) {
  static const auto table = [] {
    std::array<uint32_t, 256> t{};
    for (uint32_t i = 0; i < 256; ++i) {
      uint32_t c = i;
      for (int k = 0; k < 8; ++k)
        c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  uint32_t crc = 0xFFFFFFFFu;
  for (size_t i = 0; i < len; ++i)
    crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

kernels::MotionField estimate_motion(const Frame &reference,
                                     const Frame &target,
                                     const GopConfig &cfg) {
  cfg.validate();
  if (reference.width() != target.width() ||
      reference.height() != target.height())
    throw InvalidInput("motion estimation requires identical frame dimensions");
  const CodedGeometry g(target.width(), target.height());
  return kernels::motion_search(pad_plane(reference.y, g.lw, g.lh),
                                pad_plane(target.y, g.lw, g.lh),
                                cfg.search_range);
}

Bitstream encode(const Clip &clip, Crf crf, const GopConfig &cfg) {
  clip.validate();
  cfg.validate();
  const CodedGeometry g(clip.width(), clip.height());
  const double qscale = crf_to_qscale(crf);

  Bitstream bs;
  bs.width = static_cast<uint32_t>(clip.width());
  bs.height = static_cast<uint32_t>(clip.height());
  bs.fps = clip.fps;
  bs.gop_size = static_cast<uint32_t>(cfg.gop_size);
  bs.crf = static_cast<uint32_t>(crf.value);
  bs.frames.reserve(clip.frames.size());

  RefPlanes ref;
  for (size_t i = 0; i < clip.frames.size(); ++i) {
    const bool intra = (i % static_cast<size_t>(cfg.gop_size)) == 0;
    const Frame &src = clip.frames[i];
    RefPlanes target{pad_plane(src.y, g.lw, g.lh),
                     pad_plane(src.cb, g.cw, g.ch),
                     pad_plane(src.cr, g.cw, g.ch)};

    kernels::MotionField field;
    RefPlanes pred;
    if (intra) {
      pred = flat_prediction(g);
    } else {
      field = kernels::motion_search(ref.y, target.y, cfg.search_range);
      pred = predict(ref, field);
    }

    const std::vector<int16_t> ry = plane_diff(target.y, pred.y);
    const std::vector<int16_t> rcb = plane_diff(target.cb, pred.cb);
    const std::vector<int16_t> rcr = plane_diff(target.cr, pred.cr);

    std::vector<QuantBlock> cy, ccb, ccr;
    kernels::quantize_plane(ry.data(), g.lw, g.lh, jpeg_luma_quant(), qscale, cy);
    kernels::quantize_plane(rcb.data(), g.cw, g.ch, jpeg_chroma_quant(), qscale, ccb);
    kernels::quantize_plane(rcr.data(), g.cw, g.ch, jpeg_chroma_quant(), qscale, ccr);

    ByteWriter body;
    if (!intra)
      write_motion_runs(body, field.mv);
    write_plane_blocks(body, cy);
    write_plane_blocks(body, ccb);
    write_plane_blocks(body, ccr);

    FrameRecord rec;
    rec.kind = intra ? kFrameKindI : kFrameKindP;
    ByteWriter payload;
    payload.u32(crc32(body.bytes.data(), body.bytes.size()));
    payload.bytes.insert(payload.bytes.end(), body.bytes.begin(),
                         body.bytes.end());
    rec.payload = std::move(payload.bytes);
    bs.frames.push_back(std::move(rec));

    ref = reconstruct_frame(cy, ccb, ccr, pred, qscale);
  }
  return bs;
}

Clip decode(const Bitstream &bs) {
  if (bs.width == 0 || bs.height == 0 || bs.width % 2 != 0 ||
      bs.height % 2 != 0 || bs.width > 16384 || bs.height > 16384)
    throw ParseError(ParseError::Kind::bad_header,
                     "bitstream header has invalid dimensions");
  if (bs.fps.num == 0 || bs.fps.den == 0 || bs.gop_size == 0 || bs.crf > 51)
    throw ParseError(ParseError::Kind::bad_header,
                     "bitstream header has invalid fps/gop/crf fields");
  if (bs.frames.empty())
    throw ParseError(ParseError::Kind::bad_header, "bitstream has no frames");
  if (bs.frames.front().kind != kFrameKindI)
    throw ParseError(ParseError::Kind::bad_frame_kind,
                     "frame 0 must be intra-coded", -1, 0);

  const CodedGeometry g(static_cast<int>(bs.width), static_cast<int>(bs.height));
  const double qscale = crf_to_qscale(Crf{static_cast<int>(bs.crf)});
  const int luma_blocks = (g.lw / 8) * (g.lh / 8);
  const int chroma_blocks = (g.cw / 8) * (g.ch / 8);
  const int mv_count = (g.lw / 16) * (g.lh / 16);

  Clip clip;
  clip.fps = bs.fps;
  clip.frames.reserve(bs.frames.size());

  RefPlanes ref;
  for (size_t i = 0; i < bs.frames.size(); ++i) {
    const FrameRecord &rec = bs.frames[i];
    const int fi = static_cast<int>(i);
    if (rec.kind != kFrameKindI && rec.kind != kFrameKindP)
      throw ParseError(ParseError::Kind::bad_frame_kind,
                       "frame " + std::to_string(fi) + ": unknown kind byte " +
                           std::to_string(static_cast<int>(rec.kind)),
                       -1, fi);
    if (rec.payload.size() < 4)
      throw ParseError(ParseError::Kind::truncated_frame,
                       "frame " + std::to_string(fi) +
                           ": payload too short for checksum",
                       -1, fi);
    uint32_t stored = 0;
    std::memcpy(&stored, rec.payload.data(), 4);
    const uint8_t *body = rec.payload.data() + 4;
    const size_t body_len = rec.payload.size() - 4;
    if (crc32(body, body_len) != stored)
      throw ParseError(ParseError::Kind::checksum_mismatch,
                       "frame " + std::to_string(fi) + ": payload checksum mismatch",
                       -1, fi);

    BodyReader r(body, body_len, fi);
    RefPlanes pred;
    if (rec.kind == kFrameKindI) {
      pred = flat_prediction(g);
    } else {
      kernels::MotionField field;
      field.blocks_x = g.lw / 16;
      field.blocks_y = g.lh / 16;
      field.mv.resize(mv_count);
      read_motion_runs(r, field.mv);
      pred = predict(ref, field);
    }

    std::vector<QuantBlock> cy(luma_blocks), ccb(chroma_blocks), ccr(chroma_blocks);
    read_plane_blocks(r, cy);
    read_plane_blocks(r, ccb);
    read_plane_blocks(r, ccr);
    if (!r.done())
      throw ParseError(ParseError::Kind::trailing_bytes,
                       "frame " + std::to_string(fi) +
                           ": trailing bytes after coefficient data",
                       -1, fi);

    ref = reconstruct_frame(cy, ccb, ccr, pred, qscale);

    Frame out;
    out.y = crop_plane(ref.y, g.w, g.h);
    out.cb = crop_plane(ref.cb, g.w / 2, g.h / 2);
    out.cr = crop_plane(ref.cr, g.w / 2, g.h / 2);
    clip.frames.push_back(std::move(out));
  }
  return clip;
}

double measure_bitrate(const Bitstream &bs) {
  if (bs.frames.empty())
    return 0.0;
  uint64_t payload_bytes = 0;
  for (const FrameRecord &f : bs.frames)
    payload_bytes += f.payload.size();
  const double bits = static_cast<double>(payload_bytes) * 8.0;
  return bits * bs.fps.num / (static_cast<double>(bs.fps.den) * bs.frame_count());
}

Bitstream encode_at_bitrate(const Clip &clip, double target_bps,
                            const GopConfig &cfg) {
  if (!(target_bps > 0))
    throw InvalidInput("target bitrate must be positive");
  const double limit = 1.05 * target_bps;

  std::map<int, Bitstream> cache;
  auto rate_at = [&](int crf) -> double {
    auto it = cache.find(crf);
    if (it == cache.end())
      it = cache.emplace(crf, encode(clip, Crf{crf}, cfg)).first;
    return measure_bitrate(it->second);
  };

  // Smallest crf whose rate fits (rate is non-increasing in crf).
  int lo = 0, hi = 51;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (rate_at(mid) <= limit)
      hi = mid;
    else
      lo = mid + 1;
  }
  if (rate_at(lo) > limit)
    throw UnreachableBitrate(target_bps, rate_at(51));
  return std::move(cache.at(lo));
}

// ---- container --------------------------------------------------------------

std::vector<uint8_t> serialize_bitstream(const Bitstream &bs) {
  ByteWriter w;
  w.bytes.insert(w.bytes.end(), kMagic, kMagic + 4);
  w.u32(bs.width);
  w.u32(bs.height);
  w.u32(bs.fps.num);
  w.u32(bs.fps.den);
  w.u32(bs.frame_count());
  w.u32(bs.gop_size);
  w.u32(bs.crf);
  for (const FrameRecord &f : bs.frames) {
    w.u8(f.kind);
    w.u32(static_cast<uint32_t>(f.payload.size()));
    w.bytes.insert(w.bytes.end(), f.payload.begin(), f.payload.end());
  }
  return w.bytes;
}

Bitstream parse_bitstream(const std::vector<uint8_t> &bytes) {
  size_t pos = 0;
  auto need = [&](size_t n, const char *what) {
    if (bytes.size() - pos < n)
      throw ParseError(ParseError::Kind::truncated_stream,
                       std::string("stream ends inside ") + what,
                       static_cast<long long>(pos));
  };
  auto u32 = [&]() {
    uint32_t v;
    std::memcpy(&v, bytes.data() + pos, 4);
    pos += 4;
    return v;
  };

  need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw ParseError(ParseError::Kind::bad_magic, "not a TVC1 stream", 0);
  pos = 4;

  need(28, "header");
  Bitstream bs;
  bs.width = u32();
  bs.height = u32();
  bs.fps.num = u32();
  bs.fps.den = u32();
  const uint32_t frame_count = u32();
  bs.gop_size = u32();
  bs.crf = u32();

  // Each record needs at least 5 bytes; reject impossible counts before
  // reserving anything.
  if (frame_count > (bytes.size() - pos) / 5)
    throw ParseError(ParseError::Kind::truncated_stream,
                     "declared frame count cannot fit in remaining bytes",
                     static_cast<long long>(pos));
  bs.frames.reserve(frame_count);
  for (uint32_t i = 0; i < frame_count; ++i) {
    need(5, "frame record header");
    FrameRecord rec;
    rec.kind = bytes[pos++];
    const uint32_t len = u32();
    if (bytes.size() - pos < len)
      throw ParseError(ParseError::Kind::truncated_stream,
                       "frame " + std::to_string(i) +
                           ": payload extends past end of stream",
                       static_cast<long long>(pos), static_cast<int>(i));
    rec.payload.assign(bytes.begin() + static_cast<long>(pos),
                       bytes.begin() + static_cast<long>(pos + len));
    pos += len;
    bs.frames.push_back(std::move(rec));
  }
  if (pos != bytes.size())
    throw ParseError(ParseError::Kind::trailing_bytes,
                     "trailing bytes after final frame record",
                     static_cast<long long>(pos));
  return bs;
}

Bitstream read_tvc(const std::string &path) {
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
  return parse_bitstream(buf);
}

void write_tvc(const Bitstream &bs, const std::string &path) {
  const std::vector<uint8_t> bytes = serialize_bitstream(bs);
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw IoError("write failed: " + path);
}

} // namespace vcb
