#include <doctest.h>

#include <algorithm>
#include <random>

#include "fspgemm/error.hpp"
#include "fspgemm/matrix.hpp"
#include "fspgemm/random.hpp"
#include "support.hpp"

using namespace fspgemm;

namespace {

CsrMatrix example_2x2()
{
    return coo_to_csr(CooMatrix{2, 2, {{0, 0, 3.0f}, {0, 1, 4.0f}, {1, 1, 5.0f}}});
}

}  // namespace

TEST_CASE("coo_to_csr on an empty matrix")
{
    const CsrMatrix m = coo_to_csr(CooMatrix{3, 3, {}});
    CHECK(m.row_ptr == std::vector<Offset>{0, 0, 0, 0});
    CHECK(m.nnz() == 0);
    CHECK_FALSE(validate_csr(m));
}

TEST_CASE("coo_to_csr sorts unordered entries")
{
    const CsrMatrix m = coo_to_csr(CooMatrix{2, 2, {{1, 1, 5.0f}, {0, 0, 3.0f}, {0, 1, 4.0f}}});
    CHECK(m.row_ptr == std::vector<Offset>{0, 2, 3});
    CHECK(m.col_index == std::vector<Index>{0, 1, 1});
    CHECK(m.values == std::vector<float>{3.0f, 4.0f, 5.0f});
}

TEST_CASE("coo_to_csr rejects invalid input")
{
    CHECK_THROWS_AS(coo_to_csr(CooMatrix{2, 2, {{2, 0, 1.0f}}}), InvalidMatrix);
    CHECK_THROWS_AS(coo_to_csr(CooMatrix{2, 2, {{0, 0, 1.0f}, {0, 0, 2.0f}}}), InvalidMatrix);
}

TEST_CASE("validate_csr reports the first violation")
{
    CHECK_FALSE(validate_csr(example_2x2()));

    CsrMatrix bad_ptr;
    bad_ptr.rows = 2;
    bad_ptr.cols = 2;
    bad_ptr.row_ptr = {0, 2, 1};
    bad_ptr.col_index = {0};
    bad_ptr.values = {1.0f};
    const auto v1 = validate_csr(bad_ptr);
    REQUIRE(v1);
    CHECK(v1->find("row_ptr not non-decreasing at row 1") != std::string::npos);

    CsrMatrix dup;
    dup.rows = 1;
    dup.cols = 2;
    dup.row_ptr = {0, 2};
    dup.col_index = {1, 1};
    dup.values = {1.0f, 2.0f};
    const auto v2 = validate_csr(dup);
    REQUIRE(v2);
    CHECK(v2->find("duplicate/unsorted column index") != std::string::npos);

    CsrMatrix range;
    range.rows = 1;
    range.cols = 2;
    range.row_ptr = {0, 1};
    range.col_index = {2};
    range.values = {1.0f};
    CHECK(validate_csr(range));

    CsrMatrix count;
    count.rows = 1;
    count.cols = 2;
    count.row_ptr = {0, 2};
    count.col_index = {0};
    count.values = {1.0f};
    CHECK(validate_csr(count));
}

TEST_CASE("csr_row")
{
    const CsrMatrix m = example_2x2();
    CHECK(csr_row(m, 0) == SparseRow{{0, 3.0f}, {1, 4.0f}});
    const CsrMatrix e = coo_to_csr(CooMatrix{2, 2, {{1, 1, 1.0f}}});
    CHECK(csr_row(e, 0).empty());
    CHECK_THROWS_AS(csr_row(m, 2), InvalidArgument);
}

TEST_CASE("builders")
{
    CHECK(identity(3).nnz() == 3);
    CHECK_FALSE(validate_csr(identity(0)));
    const CsrMatrix d = diagonal({1.0f, 2.0f});
    CHECK(d.col_index == std::vector<Index>{0, 1});
    const CsrMatrix f = from_dense({{3.0f, 4.0f}, {0.0f, 5.0f}});
    CHECK(bitwise_equal(f, example_2x2()));
}

TEST_CASE("bitwise_equal distinguishes signed zeros and NaN payloads")
{
    CsrMatrix a = diagonal({0.0f});
    CsrMatrix b = diagonal({-0.0f});
    CHECK_FALSE(bitwise_equal(a, b));
    CHECK(bitwise_equal(a, a));
}

TEST_CASE("property: csr -> coo -> csr is the identity on canonical form")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const CsrMatrix m = testing::gen_small(rng, 50, 0.1);
        REQUIRE_FALSE(validate_csr(m));
        CooMatrix coo = csr_to_coo(m);
        std::shuffle(coo.entries.begin(), coo.entries.end(), rng);
        const CsrMatrix back = coo_to_csr(coo);
        REQUIRE_FALSE(validate_csr(back));
        REQUIRE(bitwise_equal(back, m));
    }
}

TEST_CASE("property: coo_to_csr agrees with an independent sort")
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        CooMatrix coo = csr_to_coo(testing::gen_csr(rng, 50, 50, 0.05));
        std::shuffle(coo.entries.begin(), coo.entries.end(), rng);
        const CooMatrix round = csr_to_coo(coo_to_csr(coo));
        std::vector<CooEntry> sorted = coo.entries;
        std::sort(sorted.begin(), sorted.end(), [](const CooEntry& x, const CooEntry& y) {
            return std::pair(x.row, x.col) < std::pair(y.row, y.col);
        });
        REQUIRE(round.entries == sorted);
    }
}

TEST_CASE("random_sparse produces valid matrices near the requested density")
{
    std::mt19937_64 rng(5);
    const CsrMatrix m = random_sparse(200, 300, 0.05, rng);
    CHECK_FALSE(validate_csr(m));
    const double density = static_cast<double>(m.nnz()) / (200.0 * 300.0);
    CHECK(density == doctest::Approx(0.05).epsilon(0.1));
    CHECK(random_sparse(10, 10, 1.0, rng).nnz() == 100);
    CHECK(random_sparse(10, 10, 0.0, rng).nnz() == 0);
    CHECK_THROWS_AS(random_sparse(2, 2, 1.5, rng), InvalidArgument);
}
