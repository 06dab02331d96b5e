// Denoise a noisy c2 sample and report the mean squared log-Euclidean error
// of the raw data and of the linear estimate for a range of J0.
//
//   demo_denoise_curve [seed]

#include <cstdio>
#include <cstdlib>

#include "spdwave/harness.hpp"

namespace sw = spdwave;

namespace {

double mean_sq_error(const sw::LogSequence& a, const sw::LogSequence& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double e = sw::frobenius_norm(a[k] - b[k]);
    s += e * e;
  }
  return s / static_cast<double>(a.size());
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const int J = 10;
  const auto grid = sw::make_grid(sw::CurveSpec::c2(), J);
  sw::RngStream rng(seed, {0});
  const auto data = sw::sample_noisy_curve_log(grid.logs, sw::NoiseSpec::for_curve("c2"), rng);

  std::printf("c2, J=%d, seed=%llu\n", J, static_cast<unsigned long long>(seed));
  std::printf("raw data      mse %.6f\n", mean_sq_error(data, grid.logs));
  for (int N : {1, 3, 5})
    for (int J0 = 3; J0 <= 8; ++J0) {
      const auto est = sw::linear_estimate_log(data, J0, sw::RefinementOrder::from_N(N));
      std::printf("N=%d J0=%d     mse %.6f\n", N, J0, mean_sq_error(est, grid.logs));
    }
}
