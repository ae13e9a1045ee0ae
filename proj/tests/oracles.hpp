#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "nll/dataset.hpp"
#include "nll/noise.hpp"

namespace nll::testing {

using Rational = boost::multiprecision::cpp_rational;
using BigFloat = boost::multiprecision::cpp_dec_float_50;

/// Every double is a dyadic rational, so this conversion is exact.
inline Rational exact(double v) {
  int e = 0;
  const double f = std::frexp(v, &e);
  const auto mantissa = static_cast<long long>(std::ldexp(f, 53));
  e -= 53;
  const boost::multiprecision::cpp_int scale = boost::multiprecision::cpp_int(1) << std::abs(e);
  return e >= 0 ? Rational(mantissa * scale) : Rational(mantissa) / Rational(scale);
}

/// Pr[h(X) = Y~] by summing the joint law of (X, Y~) over every outcome, in
/// exact rational arithmetic.
inline double joint_noisy_accuracy(const std::vector<Label>& h, const DiscreteDistribution& d,
                                   const TransitionMatrix& t) {
  Rational total = 0;
  for (std::size_t x = 0; x < d.size(); ++x) {
    for (int noisy = 0; noisy < t.k(); ++noisy) {
      if (h[x] == noisy) total += exact(d.prob(x)) * exact(t(d.true_label(x), noisy));
    }
  }
  return static_cast<double>(total);
}

/// Pr[h(X) = Y] in exact arithmetic.
inline double joint_clean_accuracy(const std::vector<Label>& h, const DiscreteDistribution& d) {
  Rational total = 0;
  for (std::size_t x = 0; x < d.size(); ++x) {
    if (h[x] == d.true_label(x)) total += exact(d.prob(x));
  }
  return static_cast<double>(total);
}

/// VC deviation bound evaluated with 50 decimal digits.
inline BigFloat vc_bound_reference(double m, double d_vc, double delta) {
  const BigFloat bm(m), bd(d_vc), bdelta(delta);
  const BigFloat inner = bd * (log(BigFloat(2) * bm / bd) + 1) + log(BigFloat(4) / bdelta);
  return sqrt(BigFloat(8) * inner / bm);
}

/// Hoeffding deviation bound evaluated with 50 decimal digits.
inline BigFloat hoeffding_reference(double n, double delta) {
  return sqrt(log(BigFloat(1) / BigFloat(delta)) / (BigFloat(2) * BigFloat(n)));
}

}  // namespace nll::testing
