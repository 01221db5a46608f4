#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "fspgemm/matrix.hpp"

namespace fspgemm {

struct CsvEntry {
    Index row = 0;
    Index col = 0;
    float val = 0.0f;

    friend bool operator==(const CsvEntry&, const CsvEntry&) = default;
};

// Compressed Sparse Vector matrix.
//
// Rows are partitioned into bands of vec_width consecutive rows. Every entry
// carries its own row and column index, and entries are stored in
// vector-major order: ascending by (band, col, row) with band = row / vec_width.
// The nonzeros sharing one (band, col) pair form a CSV vector.
struct CsvMatrix {
    Index rows = 0;
    Index cols = 0;
    std::uint32_t vec_width = 1;
    std::vector<CsvEntry> entries;

    std::size_t nnz() const { return entries.size(); }
    Index band_of(Index row) const { return row / vec_width; }

    friend bool operator==(const CsvMatrix&, const CsvMatrix&) = default;
};

struct VectorMember {
    Index row = 0;
    float val = 0.0f;

    friend bool operator==(const VectorMember&, const VectorMember&) = default;
};

struct CsvVector {
    Index band = 0;
    Index col = 0;
    std::vector<VectorMember> members;  // ascending row
};

// True when a sorts strictly before b in vector-major order.
bool vector_major_less(const CsvEntry& a, const CsvEntry& b, std::uint32_t vec_width);

std::optional<std::string> validate_csv(const CsvMatrix& m);

CsvMatrix csr_to_csv(const CsrMatrix& m, std::uint32_t vec_width);
CsrMatrix csv_to_csr(const CsvMatrix& m);

std::vector<CsvVector> enumerate_vectors(const CsvMatrix& m);

// Number of CSV vectors without materialising them.
std::size_t count_vectors(const CsvMatrix& m);

// FCSV binary layout, little-endian:
//   "FCSV" | u32 version=1 | u64 rows | u64 cols | u64 nnz | u32 vec_width
//   | u64 reserved=0
//   then nnz records of { u32 row, u32 col, f32 val } in storage order.
inline constexpr std::uint32_t fcsv_version = 1;
inline constexpr std::size_t fcsv_header_bytes = 44;
inline constexpr std::size_t fcsv_record_bytes = 12;

void write_csv_file(const CsvMatrix& m, std::ostream& out);
CsvMatrix read_csv_file(std::istream& in);

void write_csv_file(const CsvMatrix& m, const std::filesystem::path& path);
CsvMatrix read_csv_file(const std::filesystem::path& path);

}  // namespace fspgemm
