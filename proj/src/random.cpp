#include "fspgemm/random.hpp"

#include <algorithm>
#include <unordered_set>

#include "fspgemm/error.hpp"

namespace fspgemm {

CsrMatrix random_sparse(Index rows, Index cols, double density, std::mt19937_64& rng, float lo,
                        float hi)
{
    if (!(density >= 0.0 && density <= 1.0)) {
        throw InvalidArgument("density must lie in [0, 1]");
    }
    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(1, 0);
    std::uniform_real_distribution<float> value(lo, hi);
    std::vector<Index> picked;
    std::unordered_set<Index> taken;
    for (Index i = 0; i < rows; ++i) {
        const auto count = cols == 0 ? 0u
                                     : static_cast<Index>(std::binomial_distribution<std::uint64_t>(
                                           cols, density)(rng));
        // Floyd's sampling of `count` distinct columns.
        picked.clear();
        taken.clear();
        for (std::uint64_t t = static_cast<std::uint64_t>(cols) - count; t < cols; ++t) {
            const auto r = static_cast<Index>(std::uniform_int_distribution<std::uint64_t>(0, t)(rng));
            const Index pick = taken.insert(r).second ? r : static_cast<Index>(t);
            if (pick != r) {
                taken.insert(pick);
            }
            picked.push_back(pick);
        }
        std::sort(picked.begin(), picked.end());
        for (const Index j : picked) {
            m.col_index.push_back(j);
            m.values.push_back(value(rng));
        }
        m.row_ptr.push_back(m.col_index.size());
    }
    return m;
}

}  // namespace fspgemm
