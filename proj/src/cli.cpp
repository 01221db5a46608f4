#include "fspgemm/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "fspgemm/analysis.hpp"
#include "fspgemm/csv_format.hpp"
#include "fspgemm/dataflow.hpp"
#include "fspgemm/error.hpp"
#include "fspgemm/gustavson.hpp"
#include "fspgemm/matrix_market.hpp"
#include "fspgemm/random.hpp"

namespace fs = std::filesystem;

namespace fspgemm::cli {
namespace {

Json meta_json(const CsrMatrix& m, const std::string& name)
{
    const MatrixMeta meta = describe(m, name);
    Json j;
    j["name"] = meta.name;
    j["rows"] = meta.rows;
    j["cols"] = meta.cols;
    j["nnz"] = meta.nnz;
    j["density"] = meta.density;
    return j;
}

Json stats_json(const SimStats& s)
{
    Json j;
    j["b_rows_loaded"] = s.b_rows_loaded;
    j["b_rows_naive"] = s.b_rows_naive;
    j["b_vectors_sent"] = s.b_vectors_sent;
    j["multiplications"] = s.multiplications;
    j["merge_additions"] = s.merge_additions;
    j["c_entries_emitted"] = s.c_entries_emitted;
    j["peak_buffer_occupancy"] = s.peak_buffer_occupancy;
    j["observed_reduction_percent"] = s.observed_reduction();
    return j;
}

Json constraint_json(const ConstraintReport& c)
{
    Json j;
    j["required"] = c.required;
    j["budget"] = c.budget;
    j["slack"] = c.slack();
    j["satisfied"] = c.satisfied();
    return j;
}

bool has_extension(const std::string& path, const char* ext)
{
    return fs::path(path).extension() == ext;
}

void write_matrix(const CsrMatrix& m, const std::string& path, std::uint32_t vec_width)
{
    if (has_extension(path, ".fcsv")) {
        write_csv_file(csr_to_csv(m, vec_width), fs::path(path));
    } else {
        write_matrix_market(m, fs::path(path));
    }
}

std::string timestamp(bool deterministic)
{
    if (deterministic) {
        return "1970-01-01T00:00:00Z";
    }
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

// Probe table: CSV lines "sw,num_pe,logic_units"; '#' starts a comment and a
// non-numeric first line is taken as a header.
LogicProbe table_probe(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open probe table '" + path.string() + "'");
    }
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::uint32_t sw = 0;
        std::uint32_t pe = 0;
        double units = 0.0;
        if (!(fields >> sw >> pe >> units)) {
            if (table.empty() && lineno == 1) {
                continue;
            }
            throw ParseError(lineno, "probe table rows must be 'sw,num_pe,logic_units'");
        }
        table[{sw, pe}] = units;
    }
    return [table, path](std::uint32_t sw, std::uint32_t pe) {
        auto it = table.find({sw, pe});
        if (it == table.end()) {
            throw Error("probe table '" + path.string() + "' has no entry for sw=" + std::to_string(sw) +
                        ", num_pe=" + std::to_string(pe));
        }
        return it->second;
    };
}

}  // namespace

std::string scientific_2sig(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1E", v);
    return buf;
}

fs::path resolve_matrix_path(const std::string& ref)
{
    const fs::path direct(ref);
    if (fs::exists(direct)) {
        return direct;
    }
    if (const char* dir = std::getenv("FSPGEMM_DATA_DIR"); dir != nullptr && *dir != '\0') {
        const fs::path root(dir);
        const std::string name = direct.stem().string();
        for (const fs::path& candidate :
             {root / direct, root / (ref + ".mtx"), root / name / (name + ".mtx")}) {
            if (fs::exists(candidate)) {
                return candidate;
            }
        }
        throw Error("cannot find matrix '" + ref + "' (also searched FSPGEMM_DATA_DIR=" + dir + ")");
    }
    throw Error("cannot find matrix '" + ref + "'");
}

CsrMatrix load_matrix(const fs::path& path)
{
    if (path.extension() == ".fcsv") {
        return csv_to_csr(read_csv_file(path));
    }
    try {
        return coo_to_csr(read_matrix_market(path));
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.what());
    }
}

Json cmd_convert(const ConvertOptions& o, Json& inputs)
{
    inputs["in"] = o.in;
    inputs["out"] = o.out;
    inputs["vec_width"] = o.vec_width;
    if (o.vec_width == 0) {
        throw InvalidArgument("--vec-width must be at least 1");
    }
    const fs::path src = resolve_matrix_path(o.in);
    const CsrMatrix m = load_matrix(src);
    const CsvMatrix csv = csr_to_csv(m, o.vec_width);
    write_csv_file(csv, fs::path(o.out));

    // Read back to confirm the file decodes to the same matrix.
    const CsvMatrix back = read_csv_file(fs::path(o.out));
    const bool verified = back.rows == csv.rows && back.cols == csv.cols &&
                          back.vec_width == csv.vec_width && back.entries.size() == csv.entries.size() &&
                          bitwise_equal(csv_to_csr(back), m);

    Json r;
    r["matrix"] = meta_json(m, src.stem().string());
    r["vec_width"] = o.vec_width;
    r["csv_vectors"] = count_vectors(csv);
    r["bytes_written"] = static_cast<std::uint64_t>(fs::file_size(o.out));
    r["verified"] = verified;
    if (!verified) {
        throw IntegrityError("FCSV read-back differs from the source matrix");
    }
    return r;
}

Json cmd_multiply(const MultiplyOptions& o, Json& inputs)
{
    inputs["a"] = o.a;
    inputs["b"] = o.b;
    inputs["engine"] = o.engine;
    if (o.engine == "simulate") {
        inputs["sw"] = o.sw;
        inputs["num_pe"] = o.num_pe;
        inputs["fifo_depth"] = o.fifo_depth;
        inputs["buffer_capacity"] = o.buffer_capacity;
        inputs["threaded"] = o.threaded;
    }
    if (o.out) {
        inputs["out"] = *o.out;
    }
    if (o.engine != "reference" && o.engine != "oracle" && o.engine != "simulate") {
        throw InvalidArgument("unknown engine '" + o.engine + "'");
    }

    const fs::path pa = resolve_matrix_path(o.a);
    const fs::path pb = resolve_matrix_path(o.b);
    const CsrMatrix a = load_matrix(pa);
    const CsrMatrix b = load_matrix(pb);

    Json r;
    r["a"] = meta_json(a, pa.stem().string());
    r["b"] = meta_json(b, pb.stem().string());
    r["flops"] = count_flops(a, b);

    CsrMatrix c;
    std::uint32_t out_width = o.vec_width.value_or(1);
    if (o.engine == "reference") {
        c = spgemm_rowwise(a, b);
    } else if (o.engine == "oracle") {
        c = spgemm_oracle(a, b);
    } else {
        PipelineConfig cfg{o.sw, o.num_pe, o.fifo_depth, o.buffer_capacity};
        SimOptions opts;
        opts.mode = o.threaded ? ExecutionMode::threaded : ExecutionMode::sequential;
        const SimResult sim = simulate(a, b, cfg, opts);
        c = csv_to_csr(sim.c);
        out_width = o.vec_width.value_or(o.num_pe);
        r["stats"] = stats_json(sim.stats);
        r["omar_percent"] = a.nnz() > 0 ? omar(a, o.num_pe) : 0.0;
        r["match"] = bitwise_equal(c, spgemm_rowwise(a, b));
    }
    r["c"] = meta_json(c, "C");
    if (o.out) {
        write_matrix(c, *o.out, out_width);
    }
    return r;
}

Json cmd_omar(const OmarOptions& o, Json& inputs)
{
    inputs["matrices"] = o.matrices;
    inputs["pes"] = o.pes;
    if (o.matrices.empty()) {
        throw InvalidArgument("no matrix given");
    }
    if (o.pes.empty()) {
        throw InvalidArgument("empty PE list");
    }
    for (const auto p : o.pes) {
        if (p == 0) {
            throw InvalidArgument("PE counts must be at least 1");
        }
    }
    Json rows = Json::array();
    for (const auto& ref : o.matrices) {
        const fs::path path = resolve_matrix_path(ref);
        const CsrMatrix m = load_matrix(path);
        Json entry;
        entry["matrix"] = meta_json(m, path.stem().string());
        Json values = Json::array();
        for (const auto p : o.pes) {
            Json v;
            v["num_pe"] = p;
            v["omar_percent"] = omar(m, p);
            values.push_back(v);
        }
        entry["omar"] = values;
        rows.push_back(entry);
    }
    Json r;
    r["pes"] = o.pes;
    r["matrices"] = rows;
    return r;
}

std::string omar_csv(const Json& results)
{
    std::ostringstream os;
    os << "matrix";
    for (const auto& p : results.at("pes")) {
        os << ',' << p.get<std::uint32_t>();
    }
    os << '\n';
    for (const auto& entry : results.at("matrices")) {
        os << entry.at("matrix").at("name").get<std::string>();
        for (const auto& v : entry.at("omar")) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.1f", v.at("omar_percent").get<double>());
            os << ',' << buf;
        }
        os << '\n';
    }
    return os.str();
}

Json cmd_optimize(const OptimizeOptions& o, Json& inputs)
{
    inputs["bandwidth_gbps"] = o.bandwidth_gbps;
    inputs["freq_mhz"] = o.freq_mhz;
    inputs["logic_budget"] = o.logic_budget;
    if (o.beta) {
        inputs["beta"] = *o.beta;
    }
    if (o.probe_table) {
        inputs["probe_table"] = *o.probe_table;
    }
    if (o.beta.has_value() == o.probe_table.has_value()) {
        throw InvalidArgument("give exactly one of --beta or --probe-table");
    }
    BoardSpec board;
    board.mem_bandwidth_bits = o.bandwidth_gbps * bits_per_gigabyte;
    board.logic_budget = o.logic_budget;
    board.freq_hz = o.freq_mhz * 1e6;
    const LogicProbe probe = o.beta ? linear_probe(*o.beta) : table_probe(*o.probe_table);
    const OptimizerResult res = optimize_params(board, probe);

    Json r;
    r["sw"] = res.sw;
    r["num_pe"] = res.num_pe;
    r["beta"] = res.beta;
    r["parallelism"] = static_cast<std::uint64_t>(res.sw) * res.num_pe;
    r["bandwidth_bits_per_s"] = constraint_json(res.bandwidth);
    r["logic_units"] = constraint_json(res.logic);
    return r;
}

Json cmd_stuf(const StufOptions& o, Json& inputs)
{
    if (o.nops) {
        inputs["nops"] = *o.nops;
    }
    if (o.a) {
        inputs["a"] = *o.a;
    }
    if (o.b) {
        inputs["b"] = *o.b;
    }
    inputs["freq_mhz"] = o.freq_mhz;
    inputs["parallelism"] = o.parallelism;
    inputs["runtime_ms"] = o.runtime_ms;
    if (o.nops.has_value() == o.a.has_value()) {
        throw InvalidArgument("give exactly one of --nops or --a");
    }
    if (o.b && !o.a) {
        throw InvalidArgument("--b requires --a");
    }

    Json r;
    double n_ops = 0.0;
    if (o.nops) {
        n_ops = *o.nops;
        r["nops_source"] = "given";
    } else {
        const fs::path pa = resolve_matrix_path(*o.a);
        const CsrMatrix a = load_matrix(pa);
        r["a"] = meta_json(a, pa.stem().string());
        std::uint64_t flops = 0;
        if (o.b) {
            const fs::path pb = resolve_matrix_path(*o.b);
            const CsrMatrix b = load_matrix(pb);
            r["b"] = meta_json(b, pb.stem().string());
            flops = count_flops(a, b);
        } else {
            flops = count_flops(a, a);
        }
        n_ops = static_cast<double>(flops);
        r["nops_source"] = "count_flops";
    }
    const double u = stuf_from_runtime(n_ops, o.freq_mhz * 1e6, o.parallelism, o.runtime_ms * 1e-3);
    r["nops"] = n_ops;
    r["stuf"] = u;
    r["stuf_display"] = scientific_2sig(u);
    return r;
}

Json cmd_generate(const GenerateOptions& o, const CommonOptions& common, Json& inputs)
{
    inputs["rows"] = o.rows;
    inputs["cols"] = o.cols;
    inputs["density"] = o.density;
    inputs["seed"] = common.seed;
    inputs["out"] = o.out;
    std::mt19937_64 rng(common.seed);
    const CsrMatrix m = random_sparse(o.rows, o.cols, o.density, rng);
    write_matrix(m, o.out, 1);
    Json r;
    r["matrix"] = meta_json(m, fs::path(o.out).stem().string());
    return r;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Sparse matrix-matrix multiplication toolkit: CSV format, Gustavson SpGEMM, "
                 "pipeline simulation and analytical models"};
    app.require_subcommand(1);

    CommonOptions common;
    std::string report_path;
    app.add_flag("--deterministic", common.deterministic, "Zero the report timestamp");
    app.add_option("--seed", common.seed, "Seed for generated samples");
    app.add_option("--report", report_path, "Write the JSON report to this file instead of stdout");

    ConvertOptions convert;
    auto* c_convert = app.add_subcommand("convert", "Convert a Matrix Market file to FCSV");
    c_convert->add_option("--in", convert.in, "Input matrix")->required();
    c_convert->add_option("--out", convert.out, "Output .fcsv path")->required();
    c_convert->add_option("--vec-width", convert.vec_width, "CSV vector width (number of PEs)")->required();

    MultiplyOptions multiply;
    std::uint32_t out_width = 0;
    auto* c_multiply = app.add_subcommand("multiply", "Compute C = A * B");
    c_multiply->add_option("--a", multiply.a, "Left matrix")->required();
    c_multiply->add_option("--b", multiply.b, "Right matrix")->required();
    c_multiply->add_option("--engine", multiply.engine, "reference | oracle | simulate")
        ->check(CLI::IsMember({"reference", "oracle", "simulate"}));
    c_multiply->add_option("--sw", multiply.sw, "SIMD width per PE");
    c_multiply->add_option("--num-pe", multiply.num_pe, "Number of PEs");
    c_multiply->add_option("--fifo-depth", multiply.fifo_depth, "Channel depth");
    c_multiply->add_option("--buffer-capacity", multiply.buffer_capacity, "Entries per PE buffer");
    c_multiply->add_flag("--threaded", multiply.threaded, "Run pipeline stages on threads");
    auto* out_opt = c_multiply->add_option("--out", "Write C (.mtx or .fcsv)");
    auto* width_opt = c_multiply->add_option("--vec-width", out_width, "Vector width for .fcsv output");

    OmarOptions omar_opts;
    std::string omar_format = "json";
    auto* c_omar = app.add_subcommand("omar", "Off-chip memory access reduction per PE count");
    c_omar->add_option("--matrix", omar_opts.matrices, "Matrix (repeatable)")->required();
    c_omar->add_option("--pes", omar_opts.pes, "PE counts, e.g. 2,4,8,16,32")->delimiter(',');
    c_omar->add_option("--format", omar_format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

    OptimizeOptions optimize;
    auto* c_optimize = app.add_subcommand("optimize", "Derive SW and NUM_PE for a board");
    c_optimize->add_option("--bandwidth-gbps", optimize.bandwidth_gbps, "Off-chip bandwidth, GB/s")->required();
    c_optimize->add_option("--freq-mhz", optimize.freq_mhz, "Kernel clock, MHz")->required();
    c_optimize->add_option("--logic-budget", optimize.logic_budget, "Available logic units")->required();
    auto* beta_opt = c_optimize->add_option("--beta", "Logic units per unit of parallelism");
    auto* probe_opt = c_optimize->add_option("--probe-table", "CSV of sw,num_pe,logic_units");

    StufOptions stuf;
    auto* c_stuf = app.add_subcommand("stuf", "Spatial-temporal utilisation from a runtime");
    auto* nops_opt = c_stuf->add_option("--nops", "Floating-point operation count");
    auto* stuf_a = c_stuf->add_option("--a", "Left matrix (N_ops from count_flops)");
    auto* stuf_b = c_stuf->add_option("--b", "Right matrix (defaults to A)");
    c_stuf->add_option("--freq-mhz", stuf.freq_mhz, "Clock, MHz")->required();
    c_stuf->add_option("--parallelism", stuf.parallelism, "Operations per cycle")->required();
    c_stuf->add_option("--runtime-ms", stuf.runtime_ms, "Measured runtime, ms")->required();

    GenerateOptions generate;
    auto* c_generate = app.add_subcommand("generate", "Write a random sparse matrix");
    c_generate->add_option("--rows", generate.rows, "Rows")->required();
    c_generate->add_option("--cols", generate.cols, "Columns")->required();
    c_generate->add_option("--density", generate.density, "Nonzero probability per cell")->required();
    c_generate->add_option("--out", generate.out, "Output .mtx or .fcsv")->required();

    Json report;
    report["schema_version"] = schema_version;
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        report["command"] = app.get_subcommands().empty() ? std::string("unknown")
                                                          : app.get_subcommands().front()->get_name();
        report["timestamp"] = timestamp(common.deterministic);
        report["inputs"] = Json::object();
        report["error"] = {{"type", "usage_error"}, {"message", e.what()}};
        out << report.dump(2) << '\n';
        return 2;
    }

    const CLI::App* sub = app.get_subcommands().front();
    report["command"] = sub->get_name();
    report["timestamp"] = timestamp(common.deterministic);
    Json inputs = Json::object();
    bool csv_output = false;
    int code = 0;
    try {
        Json results;
        if (sub == c_convert) {
            results = cmd_convert(convert, inputs);
        } else if (sub == c_multiply) {
            if (*out_opt) {
                multiply.out = out_opt->as<std::string>();
            }
            if (*width_opt) {
                multiply.vec_width = out_width;
            }
            results = cmd_multiply(multiply, inputs);
        } else if (sub == c_omar) {
            inputs["format"] = omar_format;
            results = cmd_omar(omar_opts, inputs);
            csv_output = omar_format == "csv";
        } else if (sub == c_optimize) {
            if (*beta_opt) {
                optimize.beta = beta_opt->as<double>();
            }
            if (*probe_opt) {
                optimize.probe_table = probe_opt->as<std::string>();
            }
            results = cmd_optimize(optimize, inputs);
        } else if (sub == c_stuf) {
            if (*nops_opt) {
                stuf.nops = nops_opt->as<double>();
            }
            if (*stuf_a) {
                stuf.a = stuf_a->as<std::string>();
            }
            if (*stuf_b) {
                stuf.b = stuf_b->as<std::string>();
            }
            results = cmd_stuf(stuf, inputs);
        } else {
            results = cmd_generate(generate, common, inputs);
        }
        report["inputs"] = inputs;
        report["results"] = results;
        if (csv_output) {
            out << omar_csv(results);
        }
    } catch (const Error& e) {
        report["inputs"] = inputs;
        report["error"] = {{"type", e.kind()}, {"message", e.what()}};
        err << "error: " << e.what() << '\n';
        code = 1;
    } catch (const std::exception& e) {
        report["inputs"] = inputs;
        report["error"] = {{"type", "internal_error"}, {"message", e.what()}};
        err << "error: " << e.what() << '\n';
        code = 1;
    }

    const std::string text = report.dump(2) + "\n";
    if (!report_path.empty()) {
        std::ofstream f(report_path);
        f << text;
        if (!f) {
            err << "error: cannot write report to '" << report_path << "'\n";
            return 1;
        }
    } else if (!csv_output || code != 0) {
        out << text;
    }
    return code;
}

}  // namespace fspgemm::cli
