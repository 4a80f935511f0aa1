// Benchmark: serial reference vs OpenMP-parallel execution of the main
// batch workloads. Results must agree bit-for-bit; the table reports wall
// times, speedup, and the max absolute difference (expected 0).

#include <chrono>
#include <cstdio>
#include <vector>

#include "dbs/airy.hpp"
#include "dbs/exec.hpp"
#include "dbs/hamiltonian.hpp"
#include "dbs/kernels.hpp"
#include "dbs/reconstruct.hpp"
#include "dbs/spectrum.hpp"

using dbs::Complex;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Row {
  const char* name;
  double t_serial;
  double t_parallel;
  double max_diff;
};

void print(const Row& r) {
  std::printf("%-28s %10.3fs %10.3fs %8.2fx %12.3e\n", r.name, r.t_serial, r.t_parallel,
              r.t_serial / r.t_parallel, r.max_diff);
}

}  // namespace

int main() {
  std::printf("%-28s %11s %11s %9s %12s\n", "workload", "serial", "parallel", "speedup",
              "max|diff|");
  std::printf("threads available: %d\n", dbs::max_threads());

  // 1. Spectrum of the diag(1, x) system via the generic bisection solver.
  {
    const dbs::Hamiltonian h = dbs::make_airy(1.0);
    dbs::SpectrumOptions so;
    so.with_k_diag = false;
    so.exec = dbs::Exec::Serial;
    auto t0 = Clock::now();
    const auto es = dbs::eigenvalues(h, M_PI / 2, -10, 10, so);
    const double ts = seconds_since(t0);
    so.exec = dbs::Exec::Parallel;
    t0 = Clock::now();
    const auto ep = dbs::eigenvalues(h, M_PI / 2, -10, 10, so);
    const double tp = seconds_since(t0);
    double d = 0;
    for (std::size_t i = 0; i < es.size(); ++i)
      d = std::max(d, std::abs(es[i].lambda - ep[i].lambda));
    print({"spectrum diag(1,x) |n|<=10", ts, tp, d});
  }

  // 2. Grid reconstruction from oversampled values, constant Hamiltonian.
  {
    const dbs::Hamiltonian h = dbs::make_constant(0.0, 2.0);
    dbs::SpectrumOptions so;
    so.exec = dbs::Exec::Parallel;
    const auto spec = dbs::eigenvalues(h, M_PI / 2, -200, 200, so);
    dbs::SampleSource src{Complex(0.4, 0.2), 0.8};
    const auto samples = dbs::make_samples(h, spec, src, 0.8, dbs::Exec::Parallel);
    dbs::GridSpec grid;
    grid.n_re = 201;
    grid.n_im = 21;
    dbs::ReconOptions ro;
    ro.mode = dbs::ReconMode::Oversampling;
    ro.taper = dbs::Taper{0.8, 1.4};
    ro.exec = dbs::Exec::Serial;
    auto t0 = Clock::now();
    const auto rs = dbs::reconstruct_on_grid(h, samples, grid, ro);
    const double ts = seconds_since(t0);
    ro.exec = dbs::Exec::Parallel;
    t0 = Clock::now();
    const auto rp = dbs::reconstruct_on_grid(h, samples, grid, ro);
    const double tp = seconds_since(t0);
    double d = 0;
    for (std::size_t i = 0; i < rs.size(); ++i) d = std::max(d, std::abs(rs[i] - rp[i]));
    print({"recon grid 201x21, N=200", ts, tp, d});
  }

  // 3. Oversampling kernel rows for the diag(1, x) system (generic solver).
  {
    const dbs::Hamiltonian h = dbs::make_airy(1.0);
    const auto spec = dbs::airy_spectrum(1.0, M_PI / 2, -12, 12);
    std::vector<dbs::Eigenvalue> tbl;
    for (const auto& e : spec) tbl.push_back({e.n, e.lambda, e.k_diag});
    dbs::SampleSet s;
    s.points = tbl;
    s.values.assign(tbl.size(), Complex(1.0, 0.0));
    const dbs::Taper taper{0.5, 0.8};
    dbs::GridSpec grid;
    grid.n_re = 41;
    grid.n_im = 3;
    auto build_rows = [&](dbs::Exec ex) {
      dbs::CoefficientKernel ck(h, s, dbs::ReconMode::Oversampling, taper, dbs::KernelOptions{},
                                ex);
      std::vector<double> out;
      for (const auto& z : grid.points()) {
        const auto row = ck.row(z);
        for (const auto& v : row) {
          out.push_back(v.real());
          out.push_back(v.imag());
        }
      }
      return out;
    };
    auto t0 = Clock::now();
    const auto rs = build_rows(dbs::Exec::Serial);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const auto rp = build_rows(dbs::Exec::Parallel);
    const double tp = seconds_since(t0);
    double d = 0;
    for (std::size_t i = 0; i < rs.size(); ++i) d = std::max(d, std::abs(rs[i] - rp[i]));
    print({"kernel rows diag(1,x) 41x3", ts, tp, d});
  }

  return 0;
}
