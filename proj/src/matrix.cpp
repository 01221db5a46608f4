#include "fspgemm/matrix.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>
#include <tuple>

#include "fspgemm/error.hpp"

namespace fspgemm {

MatrixMeta describe(const CsrMatrix& m, std::string name)
{
    MatrixMeta meta;
    meta.name = std::move(name);
    meta.rows = m.rows;
    meta.cols = m.cols;
    meta.nnz = m.nnz();
    const double size = static_cast<double>(m.rows) * static_cast<double>(m.cols);
    meta.density = size > 0 ? static_cast<double>(m.nnz()) / size : 0.0;
    return meta;
}

std::optional<std::string> validate_coo(const CooMatrix& m)
{
    for (std::size_t k = 0; k < m.entries.size(); ++k) {
        const auto& e = m.entries[k];
        if (e.row >= m.rows || e.col >= m.cols) {
            std::ostringstream os;
            os << "entry " << k << " at (" << e.row << ", " << e.col
               << ") outside " << m.rows << "x" << m.cols;
            return os.str();
        }
    }
    std::vector<std::size_t> order(m.entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = m.entries[a];
        const auto& y = m.entries[b];
        return std::tie(x.row, x.col) < std::tie(y.row, y.col);
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
        const auto& x = m.entries[order[k - 1]];
        const auto& y = m.entries[order[k]];
        if (x.row == y.row && x.col == y.col) {
            std::ostringstream os;
            os << "duplicate coordinate (" << y.row << ", " << y.col << ")";
            return os.str();
        }
    }
    return std::nullopt;
}

std::optional<std::string> validate_csr(const CsrMatrix& m)
{
    std::ostringstream os;
    if (m.row_ptr.size() != static_cast<std::size_t>(m.rows) + 1) {
        os << "row_ptr has length " << m.row_ptr.size() << ", expected " << m.rows + 1;
        return os.str();
    }
    if (m.values.size() != m.col_index.size()) {
        os << "values has length " << m.values.size() << " but col_index has length "
           << m.col_index.size();
        return os.str();
    }
    if (m.row_ptr[0] != 0) {
        return std::string("row_ptr[0] is not 0");
    }
    for (Index i = 0; i < m.rows; ++i) {
        if (m.row_ptr[i + 1] < m.row_ptr[i]) {
            os << "row_ptr not non-decreasing at row " << i;
            return os.str();
        }
    }
    if (m.row_ptr[m.rows] != m.col_index.size()) {
        os << "row_ptr[rows] = " << m.row_ptr[m.rows] << " differs from nnz = "
           << m.col_index.size();
        return os.str();
    }
    for (Index i = 0; i < m.rows; ++i) {
        for (Offset k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            if (m.col_index[k] >= m.cols) {
                os << "column index " << m.col_index[k] << " out of range at row " << i;
                return os.str();
            }
            if (k > m.row_ptr[i] && m.col_index[k] <= m.col_index[k - 1]) {
                os << "duplicate/unsorted column index at row " << i;
                return os.str();
            }
        }
    }
    return std::nullopt;
}

void require_valid(const CsrMatrix& m)
{
    if (auto violation = validate_csr(m)) {
        throw InvalidMatrix("invalid CSR matrix: " + *violation);
    }
}

CsrMatrix coo_to_csr(const CooMatrix& m)
{
    if (auto violation = validate_coo(m)) {
        throw InvalidMatrix("invalid COO matrix: " + *violation);
    }
    CsrMatrix out;
    out.rows = m.rows;
    out.cols = m.cols;
    out.row_ptr.assign(static_cast<std::size_t>(m.rows) + 1, 0);
    for (const auto& e : m.entries) {
        ++out.row_ptr[e.row + 1];
    }
    std::partial_sum(out.row_ptr.begin(), out.row_ptr.end(), out.row_ptr.begin());

    out.col_index.resize(m.nnz());
    out.values.resize(m.nnz());
    std::vector<Offset> cursor(out.row_ptr.begin(), out.row_ptr.end() - 1);
    for (const auto& e : m.entries) {
        const Offset k = cursor[e.row]++;
        out.col_index[k] = e.col;
        out.values[k] = e.val;
    }

    // Bucketed by row; sort each row by column.
    std::vector<RowEntry> scratch;
    for (Index i = 0; i < out.rows; ++i) {
        const Offset b = out.row_ptr[i];
        const Offset e = out.row_ptr[i + 1];
        if (e - b < 2) {
            continue;
        }
        scratch.clear();
        for (Offset k = b; k < e; ++k) {
            scratch.push_back({out.col_index[k], out.values[k]});
        }
        std::sort(scratch.begin(), scratch.end(),
                  [](const RowEntry& x, const RowEntry& y) { return x.col < y.col; });
        for (Offset k = b; k < e; ++k) {
            out.col_index[k] = scratch[k - b].col;
            out.values[k] = scratch[k - b].val;
        }
    }
    return out;
}

CooMatrix csr_to_coo(const CsrMatrix& m)
{
    require_valid(m);
    CooMatrix out{m.rows, m.cols, {}};
    out.entries.reserve(m.nnz());
    for (Index i = 0; i < m.rows; ++i) {
        for (Offset k = m.row_begin(i); k < m.row_end(i); ++k) {
            out.entries.push_back({i, m.col_index[k], m.values[k]});
        }
    }
    return out;
}

SparseRow csr_row(const CsrMatrix& m, Index i)
{
    if (i >= m.rows) {
        throw InvalidArgument("row " + std::to_string(i) + " out of range for " +
                              std::to_string(m.rows) + " rows");
    }
    SparseRow row;
    row.reserve(m.row_length(i));
    for (Offset k = m.row_begin(i); k < m.row_end(i); ++k) {
        row.push_back({m.col_index[k], m.values[k]});
    }
    return row;
}

bool bitwise_equal(const CsrMatrix& a, const CsrMatrix& b)
{
    if (a.rows != b.rows || a.cols != b.cols || a.row_ptr != b.row_ptr || a.col_index != b.col_index ||
        a.values.size() != b.values.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        if (std::bit_cast<std::uint32_t>(a.values[k]) != std::bit_cast<std::uint32_t>(b.values[k])) {
            return false;
        }
    }
    return true;
}

CsrMatrix identity(Index n)
{
    return diagonal(std::vector<float>(n, 1.0f));
}

CsrMatrix diagonal(const std::vector<float>& diag)
{
    CsrMatrix m;
    m.rows = m.cols = static_cast<Index>(diag.size());
    m.row_ptr.resize(diag.size() + 1);
    for (Index i = 0; i < m.rows; ++i) {
        m.row_ptr[i + 1] = i + 1;
        m.col_index.push_back(i);
        m.values.push_back(diag[i]);
    }
    return m;
}

CsrMatrix from_dense(const std::vector<std::vector<float>>& dense)
{
    CsrMatrix m;
    m.rows = static_cast<Index>(dense.size());
    m.cols = dense.empty() ? 0 : static_cast<Index>(dense.front().size());
    m.row_ptr.assign(1, 0);
    for (const auto& row : dense) {
        if (row.size() != m.cols) {
            throw InvalidArgument("ragged dense matrix");
        }
        for (Index j = 0; j < m.cols; ++j) {
            if (row[j] != 0.0f) {
                m.col_index.push_back(j);
                m.values.push_back(row[j]);
            }
        }
        m.row_ptr.push_back(m.col_index.size());
    }
    return m;
}

}  // namespace fspgemm
