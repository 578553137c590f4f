#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "types.hpp"

namespace galmono {

// All randomness in an analysis flows from a single 64-bit seed through one
// of these. Uniform and Gaussian draws are built from raw engine output so
// replays are bit-identical across standard libraries.
class Rng {
public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t raw() { return eng_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller
  double gauss() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  Complex cgauss() { return Complex(gauss(), gauss()); }

  CVec cgauss_vec(int n) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v[i] = cgauss();
    return v;
  }

  CMat cgauss_mat(int rows, int cols) {
    CMat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = cgauss();
    return m;
  }

private:
  std::mt19937_64 eng_;
};

}  // namespace galmono
