#include "sdg/fastmath.hpp"

#include <cmath>

namespace sdg::detail {

void exp_batch(double* xs, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) xs[i] = std::exp(xs[i]);
}

}  // namespace sdg::detail
