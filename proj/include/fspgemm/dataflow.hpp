#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <span>
#include <variant>
#include <vector>

#include "fspgemm/csv_format.hpp"
#include "fspgemm/matrix.hpp"

namespace fspgemm {

struct PipelineConfig {
    std::uint32_t sw = 16;      // SIMD lanes per PE
    std::uint32_t num_pe = 32;  // processing elements, also the CSV vector width
    std::size_t fifo_depth = 64;
    std::size_t buffer_capacity = 65536;  // entries per accumulator buffer
};

void validate(const PipelineConfig& cfg);

// QA payload.
struct AElement {
    float val = 0.0f;
    std::uint32_t b_num_vec = 0;  // ceil(nnz(B(j,:)) / sw)
    Index a_row_ind = 0;
    bool reset = false;  // last nonzero of its row

    friend bool operator==(const AElement&, const AElement&) = default;
};

// QB payload: one SW-wide slice of a B row. Lanes past valid_count are padding.
struct BVector {
    std::vector<float> val;
    std::vector<Index> b_col_ind;
    std::uint32_t valid_count = 0;

    friend bool operator==(const BVector&, const BVector&) = default;
};

// QC payload.
struct COutput {
    float val = 0.0f;
    Index c_row_ind = 0;
    Index c_col_ind = 0;

    friend bool operator==(const COutput&, const COutput&) = default;
};

using LoadMessage = std::variant<AElement, BVector>;

struct SimStats {
    std::uint64_t b_rows_loaded = 0;
    std::uint64_t b_rows_naive = 0;  // nnz(A)
    std::uint64_t b_vectors_sent = 0;
    std::uint64_t multiplications = 0;
    std::uint64_t merge_additions = 0;
    std::uint64_t c_entries_emitted = 0;
    std::uint64_t peak_buffer_occupancy = 0;

    // 100 * (naive - loaded) / naive, the off-chip access reduction observed.
    double observed_reduction() const;

    friend bool operator==(const SimStats&, const SimStats&) = default;
};

// ---------------------------------------------------------------------------
// Load kernel

// Walks A in CSV storage order. Each CSV vector triggers one fetch of
// B(col,:), which is then sent as BVectors to the PE of every member row,
// each preceded by that member's AElement.
class LoadKernel {
public:
    LoadKernel(const CsvMatrix& a, const CsrMatrix& b, const PipelineConfig& cfg);

    // Next message and the PE it is addressed to; false once A is exhausted.
    bool next(std::uint32_t& pe, LoadMessage& msg);

    std::uint64_t b_rows_loaded() const { return b_rows_loaded_; }
    std::uint64_t b_vectors_sent() const { return b_vectors_sent_; }

private:
    void fetch_b_row(Index j);

    const CsvMatrix& a_;
    const CsrMatrix& b_;
    PipelineConfig cfg_;
    std::vector<std::uint32_t> remaining_in_row_;

    std::size_t entry_ = 0;  // next A entry to announce
    std::vector<BVector> staged_;  // on-chip copy of the current B row
    std::size_t staged_next_ = 0;  // next BVector to send for the current member
    bool sending_b_ = false;
    std::uint32_t current_pe_ = 0;

    std::uint64_t b_rows_loaded_ = 0;
    std::uint64_t b_vectors_sent_ = 0;
};

struct LoadSchedule {
    std::vector<std::vector<LoadMessage>> per_pe;
    std::uint64_t b_rows_loaded = 0;
    std::uint64_t b_vectors_sent = 0;
};

LoadSchedule load_schedule(const CsvMatrix& a, const CsrMatrix& b, const PipelineConfig& cfg);

// ---------------------------------------------------------------------------
// Processing element

struct VecMultResult {
    std::vector<float> c_temp_vec;
    std::vector<Index> b_vec_ind;
    std::uint32_t valid_count = 0;
};

VecMultResult pe_vecmult(const AElement& a, const BVector& bv);

// Double-buffered accumulator. Buffer `selector()` is the read side holding the
// partial row in [head, tail); the merge writes into the other buffer.
class PeMemoryUnit {
public:
    explicit PeMemoryUnit(std::size_t capacity);

    std::size_t capacity() const { return capacity_; }
    unsigned selector() const { return selector_; }
    std::size_t head(unsigned s) const { return head_[s]; }
    std::size_t tail(unsigned s) const { return tail_[s]; }
    std::span<const RowEntry> live() const;

    // Replaces the read side with `row`; used to seed tests.
    void load(const SparseRow& row);
    void reset();

private:
    friend class SortMergeUnit;

    std::size_t capacity_;
    std::array<std::vector<RowEntry>, 2> buffers_;
    std::array<std::size_t, 2> head_{0, 0};
    std::array<std::size_t, 2> tail_{0, 0};
    unsigned selector_ = 0;
};

struct PeCounters {
    std::uint64_t multiplications = 0;
    std::uint64_t merge_additions = 0;
    std::uint64_t peak_buffer_occupancy = 0;
};

// Streaming sort-merge of one scaled B row against the buffered partial row.
//
// begin() for an AElement, feed() once per VecMult output, finish() after the
// last one. Buffer entries with smaller column go first, equal columns are
// added, larger ones let the stream element through. Leftover buffer entries
// are copied without comparison. On reset the result goes to `emitted`
// instead of the write buffer and both buffers are cleared; otherwise the
// selector flips.
class SortMergeUnit {
public:
    SortMergeUnit(PeMemoryUnit& mem, PeCounters& counters) : mem_(mem), counters_(counters) {}

    void begin(const AElement& a);
    void feed(const VecMultResult& v, std::deque<COutput>& emitted);
    void finish(std::deque<COutput>& emitted);

private:
    void put(Index col, float val, std::deque<COutput>& emitted);

    PeMemoryUnit& mem_;
    PeCounters& counters_;
    AElement current_{};
};

std::vector<COutput> pe_sort_merge(std::span<const VecMultResult> stream, PeMemoryUnit& mem,
                                   const AElement& a, PeCounters* counters = nullptr);

class ProcessingElement {
public:
    ProcessingElement(std::uint32_t id, const PipelineConfig& cfg);

    std::uint32_t id() const { return id_; }
    bool wants_a() const { return vectors_left_ == 0 && !active_; }
    bool wants_b() const { return active_ && vectors_left_ > 0; }

    void accept(const AElement& a);
    void accept(const BVector& bv);

    // Records ready for QC, in emission order.
    std::deque<COutput>& output() { return output_; }
    const PeCounters& counters() const { return counters_; }
    const PeMemoryUnit& memory() const { return mem_; }

private:
    void complete();

    std::uint32_t id_;
    PeMemoryUnit mem_;
    PeCounters counters_;
    SortMergeUnit sm_;
    AElement current_{};
    std::uint32_t vectors_left_ = 0;
    bool active_ = false;
    std::deque<COutput> output_;
};

// ---------------------------------------------------------------------------
// Store kernel

// Collects QC records from all PEs and assembles a CSV matrix with
// vec_width = num_pe. The result does not depend on arrival interleaving.
class StoreKernel {
public:
    StoreKernel(Index rows, Index cols, std::uint32_t num_pe);

    void accept(std::uint32_t pe, const COutput& c);
    std::uint64_t received() const { return received_; }
    CsvMatrix finish();

private:
    Index rows_;
    Index cols_;
    std::uint32_t num_pe_;
    std::vector<CsvEntry> entries_;
    std::vector<std::pair<Index, Index>> last_;  // last (row, col) per PE
    std::vector<bool> seen_;
    std::uint64_t received_ = 0;
};

CsvMatrix store_collect(const std::vector<std::vector<COutput>>& qc_streams, Index rows, Index cols,
                        std::uint32_t vec_width);

// ---------------------------------------------------------------------------
// Whole pipeline

enum class ExecutionMode {
    sequential,  // single-threaded event loop over bounded FIFOs
    threaded,    // one thread per kernel, blocking bounded channels
};

struct SimOptions {
    ExecutionMode mode = ExecutionMode::sequential;
    // Sequential mode only: 0 runs stages in a fixed sweep order, any other
    // value picks a pseudo-random runnable stage at every step.
    std::uint64_t schedule_seed = 0;
};

struct SimResult {
    CsvMatrix c;
    SimStats stats;
};

SimResult simulate(const CsrMatrix& a, const CsrMatrix& b, const PipelineConfig& cfg,
                   const SimOptions& options = {});

}  // namespace fspgemm
