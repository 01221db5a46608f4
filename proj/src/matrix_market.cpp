#include "fspgemm/matrix_market.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>

#include "fspgemm/error.hpp"

namespace fspgemm {
namespace {

enum class Field { real, integer, pattern };
enum class Symmetry { general, symmetric };

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_blank(std::string_view line)
{
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

// Splits on whitespace without allocating.
class Tokens {
public:
    explicit Tokens(std::string_view line) : rest_(line) {}

    bool next(std::string_view& tok)
    {
        std::size_t b = 0;
        while (b < rest_.size() && std::isspace(static_cast<unsigned char>(rest_[b]))) {
            ++b;
        }
        if (b == rest_.size()) {
            return false;
        }
        std::size_t e = b;
        while (e < rest_.size() && !std::isspace(static_cast<unsigned char>(rest_[e]))) {
            ++e;
        }
        tok = rest_.substr(b, e - b);
        rest_ = rest_.substr(e);
        return true;
    }

private:
    std::string_view rest_;
};

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const char* what)
{
    T value{};
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError(line, std::string("cannot parse ") + what + " '" + std::string(tok) + "'");
    }
    return value;
}

struct Header {
    Field field = Field::real;
    Symmetry symmetry = Symmetry::general;
};

Header parse_header(const std::string& line)
{
    Tokens tokens(line);
    std::array<std::string, 5> parts;
    std::string_view tok;
    std::size_t n = 0;
    while (n < parts.size() && tokens.next(tok)) {
        parts[n++] = lower(tok);
    }
    if (n != 5 || tokens.next(tok) || parts[0] != "%%matrixmarket") {
        throw ParseError(1, "malformed header, expected '%%MatrixMarket matrix coordinate <field> <symmetry>'");
    }
    if (parts[1] != "matrix") {
        throw ParseError(1, "unsupported object '" + parts[1] + "'");
    }
    if (parts[2] != "coordinate") {
        throw ParseError(1, "unsupported format '" + parts[2] + "', only coordinate is supported");
    }
    Header h;
    if (parts[3] == "real") {
        h.field = Field::real;
    } else if (parts[3] == "integer") {
        h.field = Field::integer;
    } else if (parts[3] == "pattern") {
        h.field = Field::pattern;
    } else {
        throw ParseError(1, "unsupported field '" + parts[3] + "'");
    }
    if (parts[4] == "general") {
        h.symmetry = Symmetry::general;
    } else if (parts[4] == "symmetric") {
        h.symmetry = Symmetry::symmetric;
    } else {
        throw ParseError(1, "unsupported symmetry '" + parts[4] + "'");
    }
    return h;
}

}  // namespace

CooMatrix parse_matrix_market(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) {
        throw ParseError(1, "empty input");
    }
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const Header header = parse_header(line);

    // Size line, after comments.
    bool have_size = false;
    std::uint64_t rows = 0;
    std::uint64_t cols = 0;
    std::uint64_t declared = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%' || is_blank(line)) {
            continue;
        }
        Tokens tokens(line);
        std::string_view a, b, c, extra;
        if (!tokens.next(a) || !tokens.next(b) || !tokens.next(c) || tokens.next(extra)) {
            throw ParseError(lineno, "size line must hold 'rows cols nnz'");
        }
        rows = parse_number<std::uint64_t>(a, lineno, "row count");
        cols = parse_number<std::uint64_t>(b, lineno, "column count");
        declared = parse_number<std::uint64_t>(c, lineno, "entry count");
        have_size = true;
        break;
    }
    if (!have_size) {
        throw ParseError(lineno, "missing size line");
    }
    constexpr std::uint64_t max_dim = std::numeric_limits<Index>::max();
    if (rows > max_dim || cols > max_dim) {
        throw ParseError(lineno, "dimensions exceed 32-bit index range");
    }
    if (header.symmetry == Symmetry::symmetric && rows != cols) {
        throw ParseError(lineno, "symmetric matrix must be square");
    }

    CooMatrix m{static_cast<Index>(rows), static_cast<Index>(cols), {}};
    std::vector<std::size_t> origin;  // source line of each entry
    const std::size_t reserve = static_cast<std::size_t>(
        std::min<std::uint64_t>(declared, 1u << 26) * (header.symmetry == Symmetry::symmetric ? 2 : 1));
    m.entries.reserve(reserve);
    origin.reserve(reserve);

    std::uint64_t seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%' || is_blank(line)) {
            continue;
        }
        if (seen == declared) {
            throw ParseError(lineno, "more entries than the " + std::to_string(declared) + " declared");
        }
        Tokens tokens(line);
        std::string_view ti, tj, tv, extra;
        if (!tokens.next(ti) || !tokens.next(tj)) {
            throw ParseError(lineno, "entry needs row and column indices");
        }
        const auto i = parse_number<std::uint64_t>(ti, lineno, "row index");
        const auto j = parse_number<std::uint64_t>(tj, lineno, "column index");
        float v = 1.0f;
        if (header.field != Field::pattern) {
            if (!tokens.next(tv)) {
                throw ParseError(lineno, "entry is missing its value");
            }
            if (header.field == Field::integer) {
                v = static_cast<float>(parse_number<long long>(tv, lineno, "integer value"));
            } else {
                v = parse_number<float>(tv, lineno, "real value");
            }
        }
        if (tokens.next(extra)) {
            throw ParseError(lineno, "trailing data '" + std::string(extra) + "'");
        }
        if (i < 1 || i > rows || j < 1 || j > cols) {
            throw ParseError(lineno, "index (" + std::to_string(i) + ", " + std::to_string(j) +
                                         ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
        }
        const auto r = static_cast<Index>(i - 1);
        const auto c = static_cast<Index>(j - 1);
        m.entries.push_back({r, c, v});
        origin.push_back(lineno);
        if (header.symmetry == Symmetry::symmetric && r != c) {
            m.entries.push_back({c, r, v});
            origin.push_back(lineno);
        }
        ++seen;
    }
    if (seen != declared) {
        throw ParseError(lineno, "expected " + std::to_string(declared) + " entries, found " +
                                     std::to_string(seen));
    }

    std::vector<std::size_t> order(m.entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = m.entries[a];
        const auto& y = m.entries[b];
        return std::tie(x.row, x.col, origin[a]) < std::tie(y.row, y.col, origin[b]);
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
        const auto& x = m.entries[order[k - 1]];
        const auto& y = m.entries[order[k]];
        if (x.row == y.row && x.col == y.col) {
            throw ParseError(origin[order[k]], "duplicate coordinate (" + std::to_string(y.row + 1) +
                                                   ", " + std::to_string(y.col + 1) + ")");
        }
    }
    return m;
}

CooMatrix read_matrix_market(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open '" + path.string() + "'");
    }
    return parse_matrix_market(in);
}

void write_matrix_market(const CsrMatrix& m, std::ostream& out)
{
    require_valid(m);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows << ' ' << m.cols << ' ' << m.nnz() << '\n';
    std::array<char, 64> buf{};
    for (Index i = 0; i < m.rows; ++i) {
        for (Offset k = m.row_begin(i); k < m.row_end(i); ++k) {
            // Shortest representation that parses back to the same float.
            auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), m.values[k]);
            out << i + 1 << ' ' << m.col_index[k] + 1 << ' ' << std::string_view(buf.data(), ptr - buf.data())
                << '\n';
        }
    }
}

void write_matrix_market(const CsrMatrix& m, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    write_matrix_market(m, out);
    if (!out) {
        throw Error("failed writing '" + path.string() + "'");
    }
}

}  // namespace fspgemm
