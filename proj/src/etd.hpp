#pragma once

namespace visconv::detail {

/// Weights of a linear mode du/dt = lambda u + n(t) over one step h:
/// e = exp(lambda h), p1 = h phi1(lambda h), p2 = h phi2(lambda h) with
/// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2.
struct EtdWeights {
  double e;
  double p1;
  double p2;
};

EtdWeights etd_weights(double lambda, double h);

}  // namespace visconv::detail
