#include <doctest.h>

#include <cmath>
#include <random>

#include "fspgemm/analysis.hpp"
#include "fspgemm/error.hpp"
#include "support.hpp"

using namespace fspgemm;

namespace {

CsrMatrix example_4x4()
{
    return coo_to_csr(
        CooMatrix{4, 4, {{0, 0, 1.0f}, {1, 0, 2.0f}, {2, 0, 3.0f}, {0, 2, 4.0f}, {3, 3, 5.0f}}});
}

}  // namespace

TEST_CASE("omar examples")
{
    CHECK(omar(example_4x4(), 1) == 0.0);
    CHECK(omar(example_4x4(), 2) == doctest::Approx(20.0));
    CHECK(omar(identity(16), 8) == 0.0);
    CHECK_THROWS_AS(omar(coo_to_csr(CooMatrix{2, 2, {}}), 2), InvalidArgument);
    CHECK_THROWS_AS(omar(identity(2), 0), InvalidArgument);
}

TEST_CASE("omar upper bound is attained by a single shared vector")
{
    const CsrMatrix m = from_dense({{1}, {1}, {1}, {1}});
    CHECK(omar(m, 4) == doctest::Approx(75.0));
}

TEST_CASE("property: omar identity, bounds and nested-width monotonicity")
{
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 500; ++trial) {
        const CsrMatrix m = trial % 2 == 0 ? testing::gen_clustered(rng, 80, 40, 8, 0.3)
                                           : testing::gen_csr(rng, 80, 80, 0.05);
        if (m.nnz() == 0) {
            continue;
        }
        const double nnz = static_cast<double>(m.nnz());
        double previous = -1.0;
        for (std::uint32_t w = 1; w <= 64; w *= 2) {
            const double v = omar(m, w);
            const double brute = 100.0 * (nnz - static_cast<double>(testing::brute_vector_count(m, w))) / nnz;
            REQUIRE(v == doctest::Approx(brute).epsilon(1e-12));
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 100.0 * (nnz - 1.0) / nnz + 1e-12);
            REQUIRE(v >= previous);
            previous = v;
        }
        for (std::uint32_t w = 1; w <= 10; ++w) {
            REQUIRE(omar(m, 3 * w) >= omar(m, w));
        }
    }
}

TEST_CASE("runtime model")
{
    const double f = 236e6;
    const RuntimeEstimate one = runtime_model(f * 16 * 32, f, 16, 32, 1.0);
    CHECK(one.seconds == doctest::Approx(1.0));
    const RuntimeEstimate r1 = runtime_model(1e9, f, 8, 32, 0.25);
    const RuntimeEstimate r2 = runtime_model(1e9, f, 16, 32, 0.25);
    CHECK(r1.seconds == 2.0 * r2.seconds);
    CHECK(r1.alpha == doctest::Approx(1e9 / (f * 0.25)));
    CHECK(r1.seconds == doctest::Approx(r1.alpha / (8 * 32)));
    CHECK_THROWS_AS(runtime_model(0.0, f, 1, 1, 1.0), InvalidArgument);
    CHECK_THROWS_AS(runtime_model(1.0, f, 1, 1, 1.5), InvalidArgument);
    CHECK_THROWS_AS(runtime_model(1.0, f, 0, 1, 1.0), InvalidArgument);
    CHECK_THROWS_AS(runtime_model(1.0, -f, 1, 1, 1.0), InvalidArgument);
}

TEST_CASE("stuf")
{
    const double u = stuf_from_runtime(1e6, 236e6, 3036, 5e-3);
    CHECK(stuf_from_runtime(1e6, 236e6, 3036, 10e-3) == doctest::Approx(u / 2));
    CHECK(stuf_from_runtime(2e6, 236e6, 3036, 5e-3) == doctest::Approx(2 * u));
    CHECK_THROWS_AS(stuf_from_runtime(1e6, 236e6, 3036, 0.0), InvalidArgument);
    CHECK_THROWS_AS(stuf_from_runtime(1e6, 236e6, -1, 1.0), InvalidArgument);
}

TEST_CASE("property: runtime_model and stuf_from_runtime are inverses")
{
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> ops(1e3, 1e12);
    std::uniform_real_distribution<double> freq(1e8, 1e9);
    std::uniform_real_distribution<double> util(1e-4, 1.0);
    std::uniform_int_distribution<std::uint32_t> lanes(1, 64);
    for (int trial = 0; trial < 1000; ++trial) {
        const double n = ops(rng);
        const double f = freq(rng);
        const double u = util(rng);
        const auto sw = lanes(rng);
        const auto pe = lanes(rng);
        const RuntimeEstimate r = runtime_model(n, f, sw, pe, u);
        REQUIRE(stuf_from_runtime(n, f, static_cast<double>(sw) * pe, r.seconds) == doctest::Approx(u).epsilon(1e-12));
    }
}

TEST_CASE("optimizer on the Arria 10 board")
{
    BoardSpec board{15 * bits_per_gigabyte, 51200, 236e6};
    const OptimizerResult r = optimize_params(board, linear_probe(100.0));
    CHECK(r.sw == 16);
    CHECK(r.num_pe == 32);
    CHECK(r.beta == doctest::Approx(100.0));
    CHECK(r.bandwidth.required == doctest::Approx(16.0 * 32 * 236e6));
    CHECK(r.bandwidth.budget == 120e9);
    CHECK_FALSE(r.bandwidth.satisfied());
    CHECK(r.bandwidth.slack() < 0);
    CHECK(r.logic.satisfied());
}

TEST_CASE("optimizer with the synthetic probe")
{
    const double f = 100e6;
    BoardSpec board{4.0 * 32 * f, 6400, f};
    const OptimizerResult r = optimize_params(board, [](std::uint32_t sw, std::uint32_t pe) {
        return 100.0 * sw * pe;
    });
    CHECK(r.sw == 4);
    CHECK(r.beta == 100.0);
    CHECK(r.num_pe == 16);
}

TEST_CASE("optimizer errors")
{
    BoardSpec board{120e9, 1000, 236e6};
    CHECK_THROWS_AS(optimize_params(board, linear_probe(0.0)), InvalidArgument);
    CHECK_THROWS_AS(optimize_params(board, LogicProbe{}), InvalidArgument);
    CHECK_THROWS_AS(optimize_params(board, [](std::uint32_t, std::uint32_t) -> double {
                        throw std::runtime_error("compiler crashed");
                    }),
                    Error);
    CHECK_THROWS_AS(optimize_params(BoardSpec{0, 1000, 236e6}, linear_probe(1.0)), InvalidArgument);
}

TEST_CASE("property: step 1 formula and monotonicity in the logic budget")
{
    std::mt19937_64 rng(63);
    std::uniform_real_distribution<double> bw(1e9, 1e12);
    std::uniform_real_distribution<double> freq(5e7, 5e8);
    std::uniform_real_distribution<double> logic(1e3, 1e7);
    std::uniform_real_distribution<double> beta(1.0, 500.0);
    for (int trial = 0; trial < 1000; ++trial) {
        BoardSpec board{bw(rng), logic(rng), freq(rng)};
        const double b = beta(rng);
        const OptimizerResult full = optimize_params(board, linear_probe(b));
        REQUIRE(full.sw == static_cast<std::uint32_t>(std::ceil(board.mem_bandwidth_bits / (32.0 * board.freq_hz))));
        REQUIRE(full.sw >= 1);
        REQUIRE(full.num_pe >= 1);
        board.logic_budget /= 2;
        const OptimizerResult half = optimize_params(board, linear_probe(b));
        REQUIRE(half.num_pe <= full.num_pe);
    }
}
