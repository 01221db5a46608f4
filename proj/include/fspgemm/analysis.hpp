#pragma once

#include <cstdint>
#include <functional>

#include "fspgemm/matrix.hpp"

namespace fspgemm {

// Off-chip memory access reduction, in percent: the share of B-row fetches
// saved when all nonzeros of a CSV vector (width num_pe) share one fetch.
// Equals 100 * (nnz(A) - |V|) / nnz(A).
double omar(const CsrMatrix& a, std::uint32_t num_pe);

struct RuntimeEstimate {
    double seconds = 0.0;
    double alpha = 0.0;  // n_ops / (freq * stuf), so seconds = alpha / (sw * num_pe)
};

// R = N_ops / (F * SW * NUM_PE * U).
RuntimeEstimate runtime_model(double n_ops, double freq_hz, std::uint32_t sw,
                              std::uint32_t num_pe, double stuf);

// U = N_ops / (F * P * R).
double stuf_from_runtime(double n_ops, double freq_hz, double parallelism, double runtime_s);

struct BoardSpec {
    double mem_bandwidth_bits = 0.0;  // C1, bits per second
    double logic_budget = 0.0;        // C2, logic units
    double freq_hz = 0.0;             // F
    std::uint32_t word_bits = 32;
};

inline constexpr double bits_per_gigabyte = 8e9;

// Logic usage reported by the compiler for (sw, num_pe).
using LogicProbe = std::function<double(std::uint32_t sw, std::uint32_t num_pe)>;

struct ConstraintReport {
    double required = 0.0;
    double budget = 0.0;
    double slack() const { return budget - required; }
    bool satisfied() const { return required <= budget; }
};

struct OptimizerResult {
    std::uint32_t sw = 0;
    std::uint32_t num_pe = 0;
    double beta = 0.0;
    ConstraintReport bandwidth;  // f1 = word_bits * sw * F against C1
    ConstraintReport logic;      // f2 = beta * sw * num_pe against C2
};

// 1. sw = ceil(C1 / (word_bits * F))
// 2. beta = f2(sw, 1) / sw, from the probe
// 3. num_pe = ceil(C2 / (beta * sw))
// Ceilings are applied as stated even when they overshoot a budget; the
// constraint reports expose the slack.
OptimizerResult optimize_params(const BoardSpec& board, const LogicProbe& probe);

// Probe for a design whose logic grows as beta per unit of parallelism.
LogicProbe linear_probe(double beta);

}  // namespace fspgemm
