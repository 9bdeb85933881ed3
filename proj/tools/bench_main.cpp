// Times the OpenMP replicate kernels against the serial reference loop and
// checks they produce identical results.

#include <chrono>
#include <cstdio>

#include "pogamp/parallel.hpp"
#include "pogamp/pogamp.hpp"

using namespace pogamp;

namespace {

double seconds(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

PogampModel demo_model() {
  PogampModel m;
  m.domain = Domain::square(4.0);
  m.kernel = CovKernel{KernelFamily::exponential, 1.0, 0.8, 0.0, 0.0};
  m.f.family = FFamily::skew_t;
  m.f.alpha = 3.0;
  m.f.nu = 6.0;
  m.f.scale_kernel = m.kernel;
  m.intensity = Intensity::homogeneous_rate(1.5);
  return m;
}

}  // namespace

int main() {
  const PogampModel model = demo_model();
  const long reps = 4000;
  const int threads = hardware_threads();
  Rng rng(42);

  LocationSet site;
  site.append(model.domain.centroid());

  std::printf("replicate kernel benchmark (%ld replicates, %d thread(s))\n\n", reps,
              threads);
  std::printf("%-24s %12s %12s %8s %8s\n", "kernel", "serial [s]", "parallel [s]",
              "speedup", "equal");

  {
    Matrix serial(reps, 1), parallel(reps, 1);
    const auto body = [&](Matrix& out) {
      return [&model, &site, &rng, &out](long i) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(i));
        out(i, 0) = simulate(sub, model, site).y_r(0);
      };
    };
    const double ts = seconds([&] { run_replicates_serial(reps, body(serial)); });
    const double tp = seconds([&] { run_replicates(reps, body(parallel), threads); });
    const bool equal = (serial - parallel).cwiseAbs().maxCoeff() == 0.0;
    std::printf("%-24s %12.3f %12.3f %8.2f %8s\n", "simulate", ts, tp, ts / tp,
                equal ? "yes" : "NO");
  }

  {
    Rng r1(7), r2(7);
    double vs = 0.0, vp = 0.0;
    const double ts = seconds(
        [&] { vs = empirical_cov(model, Site{1.0, 1.0}, Site{1.6, 1.4}, 20000, r1, 1).value; });
    const double tp = seconds([&] {
      vp = empirical_cov(model, Site{1.0, 1.0}, Site{1.6, 1.4}, 20000, r2, threads).value;
    });
    std::printf("%-24s %12.3f %12.3f %8.2f %8s\n", "empirical_cov", ts, tp, ts / tp,
                vs == vp ? "yes" : "NO");
  }

  {
    Rng r1(9), r2(9);
    double vs = 0.0, vp = 0.0;
    const double ts = seconds([&] { vs = kld_mc(model, 20000, r1, 1).value; });
    const double tp = seconds([&] { vp = kld_mc(model, 20000, r2, threads).value; });
    std::printf("%-24s %12.3f %12.3f %8.2f %8s\n", "kld_mc", ts, tp, ts / tp,
                vs == vp ? "yes" : "NO");
  }

  return 0;
}
