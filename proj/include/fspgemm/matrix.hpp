#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fspgemm {

using Index = std::uint32_t;
using Offset = std::uint64_t;

struct CooEntry {
    Index row = 0;
    Index col = 0;
    float val = 0.0f;

    friend bool operator==(const CooEntry&, const CooEntry&) = default;
};

// Coordinate list. Entries may be in any order; (row, col) pairs are unique.
struct CooMatrix {
    Index rows = 0;
    Index cols = 0;
    std::vector<CooEntry> entries;

    std::size_t nnz() const { return entries.size(); }
    friend bool operator==(const CooMatrix&, const CooMatrix&) = default;
};

// Compressed sparse row. Columns are strictly increasing within each row.
struct CsrMatrix {
    Index rows = 0;
    Index cols = 0;
    std::vector<Offset> row_ptr{0};
    std::vector<Index> col_index;
    std::vector<float> values;

    std::size_t nnz() const { return col_index.size(); }
    Offset row_begin(Index i) const { return row_ptr[i]; }
    Offset row_end(Index i) const { return row_ptr[i + 1]; }
    std::size_t row_length(Index i) const
    {
        return static_cast<std::size_t>(row_ptr[i + 1] - row_ptr[i]);
    }

    friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;
};

struct RowEntry {
    Index col = 0;
    float val = 0.0f;

    friend bool operator==(const RowEntry&, const RowEntry&) = default;
};

// Sparse row with strictly increasing column indices.
using SparseRow = std::vector<RowEntry>;

struct MatrixMeta {
    std::string name;
    Index rows = 0;
    Index cols = 0;
    std::size_t nnz = 0;
    double density = 0.0;
};

MatrixMeta describe(const CsrMatrix& m, std::string name = {});

// First violated CooMatrix invariant, or nullopt.
std::optional<std::string> validate_coo(const CooMatrix& m);

// First violated CsrMatrix invariant, or nullopt when the matrix is valid.
std::optional<std::string> validate_csr(const CsrMatrix& m);

// Throws InvalidMatrix carrying the violation text.
void require_valid(const CsrMatrix& m);

CsrMatrix coo_to_csr(const CooMatrix& m);
CooMatrix csr_to_coo(const CsrMatrix& m);

SparseRow csr_row(const CsrMatrix& m, Index i);

// Same shape, same structure and bit-identical values.
bool bitwise_equal(const CsrMatrix& a, const CsrMatrix& b);

// Builders for tests and tooling.
CsrMatrix identity(Index n);
CsrMatrix diagonal(const std::vector<float>& diag);
CsrMatrix from_dense(const std::vector<std::vector<float>>& dense);

}  // namespace fspgemm
