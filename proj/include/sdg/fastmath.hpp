#pragma once

#include <cstddef>

namespace sdg::detail {

// In-place exp over a buffer. Compiled separately with aggressive math flags
// so the compiler can use the vectorized libm entry points; callers must
// guarantee every input is finite (clamp before calling).
void exp_batch(double* xs, std::size_t n);

}  // namespace sdg::detail
