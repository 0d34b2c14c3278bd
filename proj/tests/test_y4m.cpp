#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "vcb/rng.hpp"
#include "vcb/y4m.hpp"

using namespace vcb;

namespace {

std::string temp_path(const char *name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

Clip random_clip(uint64_t seed, int w, int h, int frames) {
  Rng rng(seed);
  Clip c;
  for (int i = 0; i < frames; ++i) {
    Frame f(w, h);
    for (auto &v : f.y.samples())
      v = static_cast<uint8_t>(rng.next_u64());
    for (auto &v : f.cb.samples())
      v = static_cast<uint8_t>(rng.next_u64());
    for (auto &v : f.cr.samples())
      v = static_cast<uint8_t>(rng.next_u64());
    c.frames.push_back(std::move(f));
  }
  return c;
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

} // namespace

TEST_CASE("write then read round-trips a 4-frame clip bit-exactly") {
  const std::string path = temp_path("vcb_roundtrip.y4m");
  const Clip c = random_clip(99, 32, 32, 4);
  write_y4m(c, path);
  const Clip back = read_y4m(path);
  CHECK(back == c);
  std::filesystem::remove(path);
}

TEST_CASE("header fields parse directly") {
  const std::string path = temp_path("vcb_header.y4m");
  std::string payload(32 * 32 + 2 * 16 * 16, '\x80');
  write_text(path, "YUV4MPEG2 W32 H32 F25:1 Ip A1:1 C420jpeg\nFRAME\n" + payload);
  const Clip c = read_y4m(path);
  CHECK(c.width() == 32);
  CHECK(c.height() == 32);
  CHECK(c.fps == Fraction{25, 1});
  CHECK(c.frame_count() == 1);
  std::filesystem::remove(path);
}

TEST_CASE("truncated payload names the failing frame") {
  const std::string path = temp_path("vcb_trunc.y4m");
  const Clip c = random_clip(7, 32, 32, 4);
  write_y4m(c, path);
  // Chop the file to 3.5 frames of payload.
  const auto full = std::filesystem::file_size(path);
  const size_t frame_bytes = 32 * 32 + 2 * 16 * 16 + 6; // plus FRAME marker
  std::filesystem::resize_file(path, full - frame_bytes / 2);
  try {
    read_y4m(path);
    FAIL("expected truncation error");
  } catch (const ParseError &e) {
    CHECK(e.kind == ParseError::Kind::truncated_frame);
    CHECK(e.frame_index == 3);
    CHECK(e.byte_offset > 0);
    CHECK(std::string(e.what()).find("frame 3") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("missing signature is a distinct error with offset") {
  const std::string path = temp_path("vcb_sig.y4m");
  write_text(path, "JUNK W32 H32\n");
  try {
    read_y4m(path);
    FAIL("expected signature error");
  } catch (const ParseError &e) {
    CHECK(e.kind == ParseError::Kind::bad_signature);
    CHECK(e.byte_offset == 0);
  }
  std::filesystem::remove(path);
}

TEST_CASE("unsupported chroma tag is rejected by name") {
  const std::string path = temp_path("vcb_chroma.y4m");
  write_text(path, "YUV4MPEG2 W32 H32 F25:1 C444\nFRAME\n");
  try {
    read_y4m(path);
    FAIL("expected chroma error");
  } catch (const ParseError &e) {
    CHECK(e.kind == ParseError::Kind::unsupported_chroma);
    CHECK(e.byte_offset > 0);
  }
  std::filesystem::remove(path);
}

TEST_CASE("C420 family variants are all accepted") {
  for (const char *tag : {"C420", "C420jpeg", "C420mpeg2", "C420paldv"}) {
    const std::string path = temp_path("vcb_c420.y4m");
    std::string payload(16 * 16 + 2 * 8 * 8, '\x40');
    write_text(path, std::string("YUV4MPEG2 W16 H16 F30:1 ") + tag + "\nFRAME\n" +
                         payload);
    CHECK(read_y4m(path).fps == Fraction{30, 1});
    std::filesystem::remove(path);
  }
}

TEST_CASE("garbage between frames is a missing-marker error") {
  const std::string path = temp_path("vcb_marker.y4m");
  std::string payload(16 * 16 + 2 * 8 * 8, '\x40');
  write_text(path, "YUV4MPEG2 W16 H16 F25:1\nFRAME\n" + payload + "BOGUS\n" +
                       payload);
  try {
    read_y4m(path);
    FAIL("expected marker error");
  } catch (const ParseError &e) {
    CHECK(e.kind == ParseError::Kind::missing_frame_marker);
    CHECK(e.frame_index == 1);
  }
  std::filesystem::remove(path);
}

TEST_CASE("missing file is an io error, not a parse error") {
  CHECK_THROWS_AS(read_y4m(temp_path("vcb_does_not_exist.y4m")), IoError);
}

TEST_CASE("fps metadata survives the round trip") {
  const std::string path = temp_path("vcb_fps.y4m");
  Clip c = random_clip(3, 16, 16, 2);
  c.fps = Fraction{30000, 1001};
  write_y4m(c, path);
  CHECK(read_y4m(path).fps == Fraction{30000, 1001});
  std::filesystem::remove(path);
}
