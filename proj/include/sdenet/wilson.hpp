#pragma once

#include <cmath>

namespace sdenet {

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

// binomial score interval; default z is the two-sided 95% normal quantile
inline WilsonInterval wilson_interval(long long successes, long long trials,
                                      double z = 1.959963984540054) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = phat + z2 / (2.0 * n);
  const double spread = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return {(center - spread) / denom, (center + spread) / denom};
}

}  // namespace sdenet
