#include "fspgemm/gustavson.hpp"

#include <map>
#include <string>

#include "fspgemm/error.hpp"

namespace fspgemm {
namespace {

void check_conformable(const CsrMatrix& a, const CsrMatrix& b)
{
    if (a.cols != b.rows) {
        throw DimensionMismatch("cannot multiply " + std::to_string(a.rows) + "x" +
                                std::to_string(a.cols) + " by " + std::to_string(b.rows) + "x" +
                                std::to_string(b.cols));
    }
}

// merge_rows that writes into out and counts collisions.
void merge_into(const SparseRow& acc, const SparseRow& row, SparseRow& out,
                std::uint64_t& collisions)
{
    out.clear();
    out.reserve(acc.size() + row.size());
    std::size_t p = 0;
    std::size_t q = 0;
    while (p < acc.size() && q < row.size()) {
        if (acc[p].col < row[q].col) {
            out.push_back(acc[p++]);
        } else if (acc[p].col == row[q].col) {
            out.push_back({acc[p].col, acc[p].val + row[q].val});
            ++p;
            ++q;
            ++collisions;
        } else {
            out.push_back(row[q++]);
        }
    }
    out.insert(out.end(), acc.begin() + static_cast<std::ptrdiff_t>(p), acc.end());
    out.insert(out.end(), row.begin() + static_cast<std::ptrdiff_t>(q), row.end());
}

}  // namespace

SparseRow scale_row(float alpha, const SparseRow& row)
{
    SparseRow out;
    out.reserve(row.size());
    for (const auto& e : row) {
        out.push_back({e.col, alpha * e.val});
    }
    return out;
}

SparseRow merge_rows(const SparseRow& acc, const SparseRow& row)
{
    SparseRow out;
    std::uint64_t collisions = 0;
    merge_into(acc, row, out, collisions);
    return out;
}

CsrMatrix spgemm_rowwise(const CsrMatrix& a, const CsrMatrix& b, EngineCounters* counters)
{
    check_conformable(a, b);
    require_valid(a);
    require_valid(b);

    CsrMatrix c;
    c.rows = a.rows;
    c.cols = b.cols;
    c.row_ptr.assign(1, 0);
    c.row_ptr.reserve(static_cast<std::size_t>(a.rows) + 1);

    EngineCounters local;
    SparseRow acc;
    SparseRow scaled;
    SparseRow next;
    for (Index i = 0; i < a.rows; ++i) {
        acc.clear();
        for (Offset k = a.row_begin(i); k < a.row_end(i); ++k) {
            const Index j = a.col_index[k];
            const float alpha = a.values[k];
            scaled.clear();
            for (Offset t = b.row_begin(j); t < b.row_end(j); ++t) {
                scaled.push_back({b.col_index[t], alpha * b.values[t]});
            }
            local.multiplications += scaled.size();
            merge_into(acc, scaled, next, local.merge_additions);
            acc.swap(next);
        }
        for (const auto& e : acc) {
            c.col_index.push_back(e.col);
            c.values.push_back(e.val);
        }
        c.row_ptr.push_back(c.col_index.size());
    }
    if (counters != nullptr) {
        *counters = local;
    }
    return c;
}

CsrMatrix spgemm_oracle(const CsrMatrix& a, const CsrMatrix& b)
{
    check_conformable(a, b);
    require_valid(a);
    require_valid(b);

    CsrMatrix c;
    c.rows = a.rows;
    c.cols = b.cols;
    c.row_ptr.assign(1, 0);
    for (Index i = 0; i < a.rows; ++i) {
        std::map<Index, float> row;
        for (Offset k = a.row_begin(i); k < a.row_end(i); ++k) {
            const Index j = a.col_index[k];
            for (Offset t = b.row_begin(j); t < b.row_end(j); ++t) {
                const float product = a.values[k] * b.values[t];
                auto [it, inserted] = row.try_emplace(b.col_index[t], product);
                if (!inserted) {
                    it->second += product;
                }
            }
        }
        for (const auto& [col, val] : row) {
            c.col_index.push_back(col);
            c.values.push_back(val);
        }
        c.row_ptr.push_back(c.col_index.size());
    }
    return c;
}

std::uint64_t count_flops(const CsrMatrix& a, const CsrMatrix& b)
{
    check_conformable(a, b);
    require_valid(a);
    require_valid(b);
    std::uint64_t products = 0;
    for (const Index j : a.col_index) {
        products += b.row_length(j);
    }
    return 2 * products;
}

}  // namespace fspgemm
