// Prints the variance constant kappa_N and the number of power iterations
// needed for the limiting transition matrix, for N = 1, 3, ..., 11.

#include <cstdio>

#include "spdwave/refinement.hpp"

int main() {
  std::printf("%4s %22s %6s\n", "N", "kappa_N", "iters");
  for (int N = 1; N <= 11; N += 2) {
    const auto t = spdwave::build_transition(spdwave::RefinementOrder::from_N(N));
    std::printf("%4d %22.17f %6d\n", N, t.kappa, t.iterations);
  }
}
