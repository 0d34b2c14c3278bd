// Timing harness comparing the OpenMP kernels against the serial reference
// implementations, plus end-to-end encoder throughput at the evaluation
// resolutions. Run: build/bench/bench_kernels [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <omp.h>
#include <string>
#include <vector>

#include "vcb/codec.hpp"
#include "vcb/corrupt.hpp"
#include "vcb/detector.hpp"
#include "vcb/kernels.hpp"
#include "vcb/synth.hpp"

using namespace vcb;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F> double time_best_of(int repeats, F &&fn) {
  double best = 1e18;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = Clock::now();
    fn();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

void report(const char *name, double serial_s, double parallel_s) {
  std::printf("%-28s serial %8.2f ms   openmp %8.2f ms   speedup %.2fx\n",
              name, serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s);
}

} // namespace

int main(int argc, char **argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
  std::printf("threads: %d\n\n", omp_get_max_threads());

  CorpusParams p;
  p.width = 256;
  p.height = 144;
  p.frames = 48;
  const Clip clip144 = gen_real_clip(7, p);
  const Clip clip720 = rescale(clip144, 720);

  const Plane &ref = clip720.frames[0].y;
  const Plane &tgt = clip720.frames[1].y;

  {
    kernels::MotionField out;
    const double ser = time_best_of(repeats, [&] {
      out = kernels::serial_ref::motion_search(ref, tgt, 7);
    });
    const double par = time_best_of(repeats, [&] {
      out = kernels::motion_search(ref, tgt, 7, true);
    });
    report("motion_search 720p", ser, par);
  }
  {
    std::vector<int16_t> residual(static_cast<size_t>(ref.width()) * ref.height());
    for (size_t i = 0; i < residual.size(); ++i)
      residual[i] = static_cast<int16_t>((i * 2654435761u >> 13) % 61) - 30;
    std::vector<QuantBlock> out;
    const double ser = time_best_of(repeats, [&] {
      kernels::serial_ref::quantize_plane(residual.data(), ref.width(),
                                          ref.height(), jpeg_luma_quant(), 2.0,
                                          out);
    });
    const double par = time_best_of(repeats, [&] {
      kernels::quantize_plane(residual.data(), ref.width(), ref.height(),
                              jpeg_luma_quant(), 2.0, out, true);
    });
    report("quantize_plane 720p", ser, par);

    const Plane pred(ref.width(), ref.height(), 128);
    std::vector<QuantBlock> coeffs;
    kernels::quantize_plane(residual.data(), ref.width(), ref.height(),
                            jpeg_luma_quant(), 2.0, coeffs, true);
    Plane rec;
    const double rser = time_best_of(repeats, [&] {
      rec = kernels::serial_ref::reconstruct_plane(coeffs, pred,
                                                   jpeg_luma_quant(), 2.0);
    });
    const double rpar = time_best_of(repeats, [&] {
      rec = kernels::reconstruct_plane(coeffs, pred, jpeg_luma_quant(), 2.0, true);
    });
    report("reconstruct_plane 720p", rser, rpar);
  }
  {
    Plane out;
    const double ser = time_best_of(repeats, [&] {
      out = kernels::serial_ref::rescale_plane(ref, 426, 240);
    });
    const double par = time_best_of(repeats, [&] {
      out = kernels::rescale_plane(ref, 426, 240, true);
    });
    report("rescale_plane 720p->240p", ser, par);
  }
  {
    std::vector<kernels::BlockEnergy> out;
    const double ser = time_best_of(repeats, [&] {
      out = kernels::serial_ref::block_energies(ref);
    });
    const double par = time_best_of(repeats, [&] {
      out = kernels::block_energies(ref, true);
    });
    report("block_energies 720p", ser, par);
  }

  std::printf("\nend to end (wall time, OpenMP enabled):\n");
  for (auto [label, clip] :
       {std::pair<const char *, const Clip &>{"encode 48f 256x144 crf30", clip144},
        {"encode 48f 1280x720 crf30", clip720}}) {
    const auto t0 = Clock::now();
    const Bitstream bs = encode(clip, Crf{30});
    const double enc = seconds_since(t0);
    const auto t1 = Clock::now();
    const Clip dec = decode(bs);
    const double decs = seconds_since(t1);
    std::printf("%-28s encode %7.1f ms  decode %7.1f ms  %7.0f kbit/s\n", label,
                enc * 1e3, decs * 1e3, measure_bitrate(bs) / 1e3);
  }
  {
    const auto t0 = Clock::now();
    const FeatureVector f = extract_features(clip720);
    std::printf("%-28s %7.1f ms (f0=%.4f)\n", "extract_features 48f 720p",
                seconds_since(t0) * 1e3, f[0]);
  }
  {
    const auto t0 = Clock::now();
    const Clip out = apply_pipeline(clip144, parse_regime("720p + BR1.0"));
    std::printf("%-28s %7.1f s  (%dx%d)\n", "pipeline 720p + BR1.0",
                seconds_since(t0), out.width(), out.height());
  }
  return 0;
}
