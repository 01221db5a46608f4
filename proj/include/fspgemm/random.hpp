#pragma once

#include <cstdint>
#include <random>

#include "fspgemm/matrix.hpp"

namespace fspgemm {

// Random sparse matrix: each row draws Binomial(cols, density) distinct
// columns; values are uniform in [lo, hi).
CsrMatrix random_sparse(Index rows, Index cols, double density, std::mt19937_64& rng,
                        float lo = -1.0f, float hi = 1.0f);

}  // namespace fspgemm
