#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "fspgemm/matrix.hpp"

namespace fspgemm::testing {

// Cell-by-cell Bernoulli generator, independent of random_sparse.
// Values come from a mix of small integers (exact products) and uniforms.
inline CsrMatrix gen_csr(std::mt19937_64& rng, Index rows, Index cols, double density)
{
    std::bernoulli_distribution hit(density);
    std::uniform_int_distribution<int> small(-4, 4);
    std::uniform_real_distribution<float> real(-2.0f, 2.0f);
    std::bernoulli_distribution use_int(0.3);
    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(1, 0);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            if (hit(rng)) {
                m.col_index.push_back(j);
                m.values.push_back(use_int(rng) ? static_cast<float>(small(rng)) : real(rng));
            }
        }
        m.row_ptr.push_back(m.col_index.size());
    }
    return m;
}

// Random shape with n <= max_n and density <= max_density.
inline CsrMatrix gen_small(std::mt19937_64& rng, Index max_n, double max_density)
{
    std::uniform_int_distribution<Index> dim(1, max_n);
    std::uniform_real_distribution<double> dens(0.0, max_density);
    const Index r = dim(rng);
    const Index c = dim(rng);
    return gen_csr(rng, r, c, dens(rng));
}

// Matrix whose nonzeros cluster in a few columns, so CSV vectors get shared.
inline CsrMatrix gen_clustered(std::mt19937_64& rng, Index rows, Index cols, Index hot_cols,
                               double density)
{
    std::uniform_int_distribution<Index> pick(0, cols - 1);
    std::vector<Index> hot;
    for (Index k = 0; k < hot_cols; ++k) {
        hot.push_back(pick(rng));
    }
    std::bernoulli_distribution hit(density);
    std::uniform_real_distribution<float> real(-1.0f, 1.0f);
    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(1, 0);
    for (Index i = 0; i < rows; ++i) {
        std::set<Index> row;
        for (const Index h : hot) {
            if (hit(rng)) {
                row.insert(h);
            }
        }
        for (const Index j : row) {
            m.col_index.push_back(j);
            m.values.push_back(real(rng));
        }
        m.row_ptr.push_back(m.col_index.size());
    }
    return m;
}

// Conformable pair A (n x k), B (k x m).
inline std::pair<CsrMatrix, CsrMatrix> gen_pair(std::mt19937_64& rng, Index max_n, double max_density)
{
    std::uniform_int_distribution<Index> dim(1, max_n);
    std::uniform_real_distribution<double> dens(0.0, max_density);
    const Index n = dim(rng);
    const Index k = dim(rng);
    const Index m = dim(rng);
    return {gen_csr(rng, n, k, dens(rng)), gen_csr(rng, k, m, dens(rng))};
}

// Brute-force count of distinct (row / w, col) pairs.
inline std::size_t brute_vector_count(const CsrMatrix& m, std::uint32_t w)
{
    std::set<std::pair<Index, Index>> seen;
    for (Index i = 0; i < m.rows; ++i) {
        for (Offset p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
            seen.insert({i / w, m.col_index[p]});
        }
    }
    return seen.size();
}

// Dense double-precision product: structure set and values.
struct DenseProduct {
    std::set<std::pair<Index, Index>> structure;
    std::map<std::pair<Index, Index>, double> value;
};

inline DenseProduct dense_product(const CsrMatrix& a, const CsrMatrix& b)
{
    DenseProduct out;
    for (Index i = 0; i < a.rows; ++i) {
        for (Offset p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
            const Index j = a.col_index[p];
            for (Offset q = b.row_ptr[j]; q < b.row_ptr[j + 1]; ++q) {
                const std::pair<Index, Index> key{i, b.col_index[q]};
                out.structure.insert(key);
                out.value[key] += static_cast<double>(a.values[p]) * b.values[q];
            }
        }
    }
    return out;
}

// Structure identical and values within rel (with an absolute floor).
inline bool close_to(const CsrMatrix& c, const CsrMatrix& oracle, double rel = 1e-5, double abs_floor = 1e-6)
{
    if (c.rows != oracle.rows || c.cols != oracle.cols || c.row_ptr != oracle.row_ptr ||
        c.col_index != oracle.col_index) {
        return false;
    }
    for (std::size_t k = 0; k < c.values.size(); ++k) {
        const double x = c.values[k];
        const double y = oracle.values[k];
        if (std::abs(x - y) > std::max(abs_floor, rel * std::max(std::abs(x), std::abs(y)))) {
            return false;
        }
    }
    return true;
}

}  // namespace fspgemm::testing
