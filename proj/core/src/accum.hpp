#pragma once

namespace chcrit::detail {

// Kahan compensated accumulator.
struct Kahan {
  double s = 0.0, c = 0.0;
  void add(double v) {
    double y = v - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

}  // namespace chcrit::detail
