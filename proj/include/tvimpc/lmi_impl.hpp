#pragma once

#include "tvimpc/errors.hpp"

namespace tvimpc {

template <typename Pred>
GammaSearch bisect_gamma(Pred&& feasible, double lo, double hi, double tolerance) {
  GammaSearch out;
  ++out.evaluations;
  if (!feasible(hi)) throw Infeasible("no feasible gamma up to " + std::to_string(hi));
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    ++out.evaluations;
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.gamma = hi;
  return out;
}

}  // namespace tvimpc
