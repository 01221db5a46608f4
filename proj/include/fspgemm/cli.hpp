#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fspgemm/matrix.hpp"

namespace fspgemm::cli {

using Json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

struct CommonOptions {
    bool deterministic = false;
    std::uint64_t seed = 1;
};

struct ConvertOptions {
    std::string in;
    std::string out;
    std::uint32_t vec_width = 0;
};

struct MultiplyOptions {
    std::string a;
    std::string b;
    std::string engine = "reference";  // reference | oracle | simulate
    std::uint32_t sw = 16;
    std::uint32_t num_pe = 32;
    std::size_t fifo_depth = 64;
    std::size_t buffer_capacity = 65536;
    bool threaded = false;
    std::optional<std::string> out;
    std::optional<std::uint32_t> vec_width;  // for .fcsv output
};

struct OmarOptions {
    std::vector<std::string> matrices;
    std::vector<std::uint32_t> pes{2, 4, 8, 16, 32};
};

struct OptimizeOptions {
    double bandwidth_gbps = 0.0;
    double freq_mhz = 0.0;
    double logic_budget = 0.0;
    std::optional<double> beta;
    std::optional<std::string> probe_table;
};

struct StufOptions {
    std::optional<double> nops;
    std::optional<std::string> a;
    std::optional<std::string> b;
    double freq_mhz = 0.0;
    double parallelism = 0.0;
    double runtime_ms = 0.0;
};

struct GenerateOptions {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    double density = 0.0;
    std::string out;
};

// Each command returns the "results" object of its report and throws
// fspgemm::Error on failure. `inputs` receives the echoed parameters.
Json cmd_convert(const ConvertOptions& o, Json& inputs);
Json cmd_multiply(const MultiplyOptions& o, Json& inputs);
Json cmd_omar(const OmarOptions& o, Json& inputs);
Json cmd_optimize(const OptimizeOptions& o, Json& inputs);
Json cmd_stuf(const StufOptions& o, Json& inputs);
Json cmd_generate(const GenerateOptions& o, const CommonOptions& common, Json& inputs);

// CSV rendering of an omar report: one row per matrix, one column per PE
// count, values with one decimal.
std::string omar_csv(const Json& results);

// Matrix lookup: the path itself, then FSPGEMM_DATA_DIR/<path>,
// FSPGEMM_DATA_DIR/<path>.mtx and FSPGEMM_DATA_DIR/<name>/<name>.mtx.
std::filesystem::path resolve_matrix_path(const std::string& ref);

// Reads .fcsv as FCSV and anything else as Matrix Market.
CsrMatrix load_matrix(const std::filesystem::path& path);

// "3.4E-03" style: two significant digits.
std::string scientific_2sig(double v);

// Full command-line entry point. The report goes to `out` (or --report),
// diagnostics to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fspgemm::cli
