#pragma once

#include <cstdint>

#include "fspgemm/matrix.hpp"

namespace fspgemm {

// Counters collected while running the reference engine.
struct EngineCounters {
    std::uint64_t multiplications = 0;
    std::uint64_t merge_additions = 0;
};

SparseRow scale_row(float alpha, const SparseRow& row);

// Two-pointer union of sorted rows; colliding values are added as acc + row.
SparseRow merge_rows(const SparseRow& acc, const SparseRow& row);

// Row-wise Gustavson: C(i,:) is the left fold of merge_rows over the scaled
// rows A(i,j) * B(j,:) in ascending j. Values that cancel to zero stay stored.
CsrMatrix spgemm_rowwise(const CsrMatrix& a, const CsrMatrix& b,
                         EngineCounters* counters = nullptr);

// Independent check of spgemm_rowwise using an ordered-map accumulator per row.
CsrMatrix spgemm_oracle(const CsrMatrix& a, const CsrMatrix& b);

// 2 * sum over nonzeros A(i,j) of nnz(B(j,:)).
std::uint64_t count_flops(const CsrMatrix& a, const CsrMatrix& b);

}  // namespace fspgemm
