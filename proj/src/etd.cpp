#include "etd.hpp"

#include <cmath>

namespace visconv::detail {

EtdWeights etd_weights(double lambda, double h) {
  const double z = lambda * h;
  EtdWeights w{};
  w.e = std::exp(z);
  if (std::abs(z) < 1e-2) {
    // Taylor series; the closed forms cancel catastrophically here.
    w.p1 = h * (1.0 + z * (1.0 / 2 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120 + z / 720)))));
    w.p2 = h * (1.0 / 2 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120 + z * (1.0 / 720 + z / 5040)))));
  } else {
    const double em1 = std::expm1(z);
    w.p1 = h * em1 / z;
    w.p2 = h * (em1 - z) / (z * z);
  }
  return w;
}

}  // namespace visconv::detail
