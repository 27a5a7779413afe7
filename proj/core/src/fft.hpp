#pragma once

#include "kinscat/types.hpp"

namespace kinscat::detail {

/// In-place unnormalized DFT: sign -1 computes X_j = sum_n x_n e^{-2 pi i j n / N},
/// sign +1 the conjugate kernel. Plans are cached per (size, sign).
void dft(CVector& data, int sign);

}  // namespace kinscat::detail
