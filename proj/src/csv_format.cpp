#include "fspgemm/csv_format.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>

#include "fspgemm/error.hpp"

namespace fspgemm {

bool vector_major_less(const CsvEntry& a, const CsvEntry& b, std::uint32_t vec_width)
{
    const Index band_a = a.row / vec_width;
    const Index band_b = b.row / vec_width;
    return std::tie(band_a, a.col, a.row) < std::tie(band_b, b.col, b.row);
}

std::optional<std::string> validate_csv(const CsvMatrix& m)
{
    std::ostringstream os;
    if (m.vec_width == 0) {
        return std::string("vec_width must be at least 1");
    }
    for (std::size_t k = 0; k < m.entries.size(); ++k) {
        const auto& e = m.entries[k];
        if (e.row >= m.rows || e.col >= m.cols) {
            os << "entry " << k << " at (" << e.row << ", " << e.col << ") outside " << m.rows << "x"
               << m.cols;
            return os.str();
        }
        if (k > 0 && !vector_major_less(m.entries[k - 1], e, m.vec_width)) {
            os << "entry " << k << " breaks vector-major order";
            return os.str();
        }
    }
    return std::nullopt;
}

CsvMatrix csr_to_csv(const CsrMatrix& m, std::uint32_t vec_width)
{
    if (vec_width == 0) {
        throw InvalidArgument("vec_width must be at least 1");
    }
    require_valid(m);
    CsvMatrix out{m.rows, m.cols, vec_width, {}};
    out.entries.reserve(m.nnz());

    std::vector<CsvEntry> band;
    for (std::uint64_t first = 0; first < m.rows; first += vec_width) {
        const auto last = static_cast<Index>(std::min<std::uint64_t>(first + vec_width, m.rows));
        band.clear();
        for (auto i = static_cast<Index>(first); i < last; ++i) {
            for (Offset k = m.row_begin(i); k < m.row_end(i); ++k) {
                band.push_back({i, m.col_index[k], m.values[k]});
            }
        }
        // Gathered in ascending row order, so a stable sort on column yields (col, row).
        std::stable_sort(band.begin(), band.end(),
                         [](const CsvEntry& a, const CsvEntry& b) { return a.col < b.col; });
        out.entries.insert(out.entries.end(), band.begin(), band.end());
    }
    return out;
}

CsrMatrix csv_to_csr(const CsvMatrix& m)
{
    if (auto violation = validate_csv(m)) {
        throw InvalidMatrix("invalid CSV matrix: " + *violation);
    }
    CsrMatrix out;
    out.rows = m.rows;
    out.cols = m.cols;
    out.row_ptr.assign(static_cast<std::size_t>(m.rows) + 1, 0);
    for (const auto& e : m.entries) {
        ++out.row_ptr[e.row + 1];
    }
    for (std::size_t i = 0; i < m.rows; ++i) {
        out.row_ptr[i + 1] += out.row_ptr[i];
    }
    out.col_index.resize(m.nnz());
    out.values.resize(m.nnz());
    // Within a row, entries appear in ascending column order in CSV storage.
    std::vector<Offset> cursor(out.row_ptr.begin(), out.row_ptr.end() - 1);
    for (const auto& e : m.entries) {
        const Offset k = cursor[e.row]++;
        out.col_index[k] = e.col;
        out.values[k] = e.val;
    }
    return out;
}

std::vector<CsvVector> enumerate_vectors(const CsvMatrix& m)
{
    if (auto violation = validate_csv(m)) {
        throw InvalidMatrix("invalid CSV matrix: " + *violation);
    }
    std::vector<CsvVector> out;
    for (const auto& e : m.entries) {
        const Index band = m.band_of(e.row);
        if (out.empty() || out.back().band != band || out.back().col != e.col) {
            out.push_back({band, e.col, {}});
        }
        out.back().members.push_back({e.row, e.val});
    }
    return out;
}

std::size_t count_vectors(const CsvMatrix& m)
{
    std::size_t n = 0;
    for (std::size_t k = 0; k < m.entries.size(); ++k) {
        if (k == 0 || m.entries[k].col != m.entries[k - 1].col ||
            m.band_of(m.entries[k].row) != m.band_of(m.entries[k - 1].row)) {
            ++n;
        }
    }
    return n;
}

namespace {

constexpr std::array<char, 4> magic{'F', 'C', 'S', 'V'};

template <typename T>
void put_le(std::ostream& out, T value)
{
    std::array<char, sizeof(T)> bytes{};
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
    }
    out.write(bytes.data(), bytes.size());
}

template <typename T>
T take_le(const unsigned char* p)
{
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value |= static_cast<T>(p[i]) << (8 * i);
    }
    return value;
}

void read_exact(std::istream& in, unsigned char* dst, std::size_t n, const char* what)
{
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw FormatError(std::string("truncated FCSV stream while reading ") + what);
    }
}

}  // namespace

void write_csv_file(const CsvMatrix& m, std::ostream& out)
{
    if (auto violation = validate_csv(m)) {
        throw InvalidMatrix("invalid CSV matrix: " + *violation);
    }
    out.write(magic.data(), magic.size());
    put_le<std::uint32_t>(out, fcsv_version);
    put_le<std::uint64_t>(out, m.rows);
    put_le<std::uint64_t>(out, m.cols);
    put_le<std::uint64_t>(out, m.entries.size());
    put_le<std::uint32_t>(out, m.vec_width);
    put_le<std::uint64_t>(out, 0);
    for (const auto& e : m.entries) {
        put_le<std::uint32_t>(out, e.row);
        put_le<std::uint32_t>(out, e.col);
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(e.val));
    }
    if (!out) {
        throw FormatError("failed writing FCSV stream");
    }
}

CsvMatrix read_csv_file(std::istream& in)
{
    std::array<unsigned char, fcsv_header_bytes> header{};
    read_exact(in, header.data(), header.size(), "header");
    if (std::memcmp(header.data(), magic.data(), magic.size()) != 0) {
        throw FormatError("bad magic, not an FCSV stream");
    }
    const auto version = take_le<std::uint32_t>(header.data() + 4);
    if (version != fcsv_version) {
        throw FormatError("unsupported FCSV version " + std::to_string(version));
    }
    const auto rows = take_le<std::uint64_t>(header.data() + 8);
    const auto cols = take_le<std::uint64_t>(header.data() + 16);
    const auto nnz = take_le<std::uint64_t>(header.data() + 24);
    const auto vec_width = take_le<std::uint32_t>(header.data() + 32);
    const auto reserved = take_le<std::uint64_t>(header.data() + 36);
    constexpr std::uint64_t max_dim = std::numeric_limits<Index>::max();
    if (rows > max_dim || cols > max_dim) {
        throw FormatError("FCSV dimensions exceed 32-bit index range");
    }
    if (vec_width == 0) {
        throw FormatError("FCSV vec_width is 0");
    }
    if (reserved != 0) {
        throw FormatError("FCSV reserved header bytes are not zero");
    }

    CsvMatrix m{static_cast<Index>(rows), static_cast<Index>(cols), vec_width, {}};
    m.entries.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(nnz, 1u << 24)));
    std::array<unsigned char, fcsv_record_bytes> rec{};
    for (std::uint64_t k = 0; k < nnz; ++k) {
        read_exact(in, rec.data(), rec.size(), "records");
        CsvEntry e;
        e.row = take_le<std::uint32_t>(rec.data());
        e.col = take_le<std::uint32_t>(rec.data() + 4);
        e.val = std::bit_cast<float>(take_le<std::uint32_t>(rec.data() + 8));
        if (e.row >= m.rows || e.col >= m.cols) {
            throw FormatError("record " + std::to_string(k) + " outside matrix bounds");
        }
        if (!m.entries.empty() && !vector_major_less(m.entries.back(), e, vec_width)) {
            throw FormatError("record " + std::to_string(k) + " violates vector-major order");
        }
        m.entries.push_back(e);
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError("trailing bytes after " + std::to_string(nnz) + " FCSV records");
    }
    return m;
}

void write_csv_file(const CsvMatrix& m, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    write_csv_file(m, out);
}

CsvMatrix read_csv_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "'");
    }
    return read_csv_file(in);
}

}  // namespace fspgemm
