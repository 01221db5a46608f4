#include "fspgemm/analysis.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fspgemm/csv_format.hpp"
#include "fspgemm/error.hpp"

namespace fspgemm {
namespace {

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidArgument(std::string(name) + " must be positive and finite");
    }
}

std::uint32_t ceil_to_count(double v, const char* name)
{
    const double c = std::ceil(v);
    if (!(c >= 1.0) || c > static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
        throw InvalidArgument(std::string(name) + " out of range: " + std::to_string(c));
    }
    return static_cast<std::uint32_t>(c);
}

}  // namespace

double omar(const CsrMatrix& a, std::uint32_t num_pe)
{
    if (num_pe == 0) {
        throw InvalidArgument("num_pe must be at least 1");
    }
    if (a.nnz() == 0) {
        throw InvalidArgument("OMAR is undefined for a matrix without nonzeros");
    }
    const CsvMatrix csv = csr_to_csv(a, num_pe);
    const auto vectors = static_cast<double>(count_vectors(csv));
    const auto nnz = static_cast<double>(a.nnz());
    return 100.0 * (nnz - vectors) / nnz;
}

RuntimeEstimate runtime_model(double n_ops, double freq_hz, std::uint32_t sw, std::uint32_t num_pe,
                              double stuf)
{
    require_positive(n_ops, "n_ops");
    require_positive(freq_hz, "frequency");
    require_positive(stuf, "stuf");
    if (stuf > 1.0) {
        throw InvalidArgument("stuf must lie in (0, 1]");
    }
    if (sw == 0 || num_pe == 0) {
        throw InvalidArgument("sw and num_pe must be at least 1");
    }
    RuntimeEstimate r;
    r.alpha = n_ops / (freq_hz * stuf);
    r.seconds = n_ops / (freq_hz * static_cast<double>(sw) * static_cast<double>(num_pe) * stuf);
    return r;
}

double stuf_from_runtime(double n_ops, double freq_hz, double parallelism, double runtime_s)
{
    require_positive(n_ops, "n_ops");
    require_positive(freq_hz, "frequency");
    require_positive(parallelism, "parallelism");
    require_positive(runtime_s, "runtime");
    return n_ops / (freq_hz * parallelism * runtime_s);
}

OptimizerResult optimize_params(const BoardSpec& board, const LogicProbe& probe)
{
    require_positive(board.mem_bandwidth_bits, "memory bandwidth");
    require_positive(board.logic_budget, "logic budget");
    require_positive(board.freq_hz, "frequency");
    if (board.word_bits == 0) {
        throw InvalidArgument("word_bits must be at least 1");
    }
    if (!probe) {
        throw InvalidArgument("no logic usage probe supplied");
    }

    OptimizerResult r;
    const double word_rate = static_cast<double>(board.word_bits) * board.freq_hz;
    r.sw = ceil_to_count(board.mem_bandwidth_bits / word_rate, "sw");

    double f2 = 0.0;
    try {
        f2 = probe(r.sw, 1);
    } catch (const std::exception& e) {
        throw Error(std::string("logic probe failed: ") + e.what());
    }
    r.beta = f2 / static_cast<double>(r.sw);
    if (!(r.beta > 0.0) || !std::isfinite(r.beta)) {
        throw InvalidArgument("derived beta must be positive, probe returned " + std::to_string(f2));
    }
    r.num_pe = ceil_to_count(board.logic_budget / (r.beta * r.sw), "num_pe");

    r.bandwidth = {word_rate * r.sw, board.mem_bandwidth_bits};
    r.logic = {r.beta * r.sw * r.num_pe, board.logic_budget};
    return r;
}

LogicProbe linear_probe(double beta)
{
    return [beta](std::uint32_t sw, std::uint32_t num_pe) {
        return beta * static_cast<double>(sw) * static_cast<double>(num_pe);
    };
}

}  // namespace fspgemm
