#include "fspgemm/dataflow.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>

#include "fspgemm/channel.hpp"
#include "fspgemm/error.hpp"

namespace fspgemm {

void validate(const PipelineConfig& cfg)
{
    if (cfg.sw == 0 || cfg.num_pe == 0 || cfg.fifo_depth == 0 || cfg.buffer_capacity == 0) {
        throw InvalidArgument("pipeline parameters sw, num_pe, fifo_depth and buffer_capacity must be >= 1");
    }
}

double SimStats::observed_reduction() const
{
    if (b_rows_naive == 0) {
        return 0.0;
    }
    return 100.0 * static_cast<double>(b_rows_naive - b_rows_loaded) /
           static_cast<double>(b_rows_naive);
}

// ---------------------------------------------------------------------------
// LoadKernel

LoadKernel::LoadKernel(const CsvMatrix& a, const CsrMatrix& b, const PipelineConfig& cfg)
    : a_(a), b_(b), cfg_(cfg)
{
    validate(cfg);
    if (a.vec_width != cfg.num_pe) {
        throw InvalidArgument("CSV vec_width " + std::to_string(a.vec_width) +
                              " does not match num_pe " + std::to_string(cfg.num_pe));
    }
    if (a.cols != b.rows) {
        throw DimensionMismatch("cannot multiply " + std::to_string(a.rows) + "x" +
                                std::to_string(a.cols) + " by " + std::to_string(b.rows) + "x" +
                                std::to_string(b.cols));
    }
    if (auto violation = validate_csv(a)) {
        throw InvalidMatrix("invalid CSV matrix: " + *violation);
    }
    require_valid(b);
    remaining_in_row_.assign(a.rows, 0);
    for (const auto& e : a.entries) {
        ++remaining_in_row_[e.row];
    }
}

void LoadKernel::fetch_b_row(Index j)
{
    ++b_rows_loaded_;
    staged_.clear();
    const Offset begin = b_.row_begin(j);
    const Offset end = b_.row_end(j);
    for (Offset k = begin; k < end; k += cfg_.sw) {
        BVector v;
        v.val.assign(cfg_.sw, 0.0f);
        v.b_col_ind.assign(cfg_.sw, 0);
        v.valid_count = static_cast<std::uint32_t>(std::min<Offset>(cfg_.sw, end - k));
        for (std::uint32_t lane = 0; lane < v.valid_count; ++lane) {
            v.val[lane] = b_.values[k + lane];
            v.b_col_ind[lane] = b_.col_index[k + lane];
        }
        staged_.push_back(std::move(v));
    }
}

bool LoadKernel::next(std::uint32_t& pe, LoadMessage& msg)
{
    if (sending_b_) {
        pe = current_pe_;
        msg = staged_[staged_next_++];
        ++b_vectors_sent_;
        sending_b_ = staged_next_ < staged_.size();
        return true;
    }
    if (entry_ >= a_.entries.size()) {
        return false;
    }
    const CsvEntry& e = a_.entries[entry_];
    // A new CSV vector starts whenever the column or band changes.
    if (entry_ == 0 || e.col != a_.entries[entry_ - 1].col ||
        a_.band_of(e.row) != a_.band_of(a_.entries[entry_ - 1].row)) {
        fetch_b_row(e.col);
    }
    ++entry_;

    AElement element;
    element.val = e.val;
    element.b_num_vec = static_cast<std::uint32_t>(staged_.size());
    element.a_row_ind = e.row;
    element.reset = --remaining_in_row_[e.row] == 0;

    current_pe_ = e.row % cfg_.num_pe;
    staged_next_ = 0;
    sending_b_ = !staged_.empty();
    pe = current_pe_;
    msg = element;
    return true;
}

LoadSchedule load_schedule(const CsvMatrix& a, const CsrMatrix& b, const PipelineConfig& cfg)
{
    LoadKernel load(a, b, cfg);
    LoadSchedule out;
    out.per_pe.resize(cfg.num_pe);
    std::uint32_t pe = 0;
    LoadMessage msg;
    while (load.next(pe, msg)) {
        out.per_pe[pe].push_back(msg);
    }
    out.b_rows_loaded = load.b_rows_loaded();
    out.b_vectors_sent = load.b_vectors_sent();
    return out;
}

// ---------------------------------------------------------------------------
// VecMult, memory unit, SM unit

VecMultResult pe_vecmult(const AElement& a, const BVector& bv)
{
    VecMultResult out;
    out.valid_count = bv.valid_count;
    out.b_vec_ind = bv.b_col_ind;
    out.c_temp_vec.assign(bv.val.size(), 0.0f);
    for (std::uint32_t k = 0; k < bv.valid_count; ++k) {
        out.c_temp_vec[k] = a.val * bv.val[k];
    }
    return out;
}

PeMemoryUnit::PeMemoryUnit(std::size_t capacity) : capacity_(capacity) {}

std::span<const RowEntry> PeMemoryUnit::live() const
{
    const auto& buf = buffers_[selector_];
    return std::span<const RowEntry>(buf.data() + head_[selector_], tail_[selector_] - head_[selector_]);
}

void PeMemoryUnit::load(const SparseRow& row)
{
    if (row.size() > capacity_) {
        throw SimulationError("row of " + std::to_string(row.size()) +
                              " entries exceeds buffer capacity " + std::to_string(capacity_));
    }
    reset();
    buffers_[0] = row;
    tail_[0] = row.size();
}

void PeMemoryUnit::reset()
{
    for (unsigned s = 0; s < 2; ++s) {
        buffers_[s].clear();
        head_[s] = 0;
        tail_[s] = 0;
    }
    selector_ = 0;
}

void SortMergeUnit::begin(const AElement& a)
{
    current_ = a;
    const unsigned w = 1 - mem_.selector_;
    mem_.buffers_[w].clear();
    mem_.head_[w] = 0;
    mem_.tail_[w] = 0;
}

void SortMergeUnit::put(Index col, float val, std::deque<COutput>& emitted)
{
    if (current_.reset) {
        emitted.push_back({val, current_.a_row_ind, col});
        return;
    }
    const unsigned s = mem_.selector_;
    const unsigned w = 1 - s;
    if (mem_.tail_[w] >= mem_.capacity_) {
        const std::size_t needed = mem_.tail_[w] + 1 + (mem_.tail_[s] - mem_.head_[s]);
        throw SimulationError("PE buffer overflow at row " + std::to_string(current_.a_row_ind) +
                              ": needs at least " + std::to_string(needed) +
                              " entries, capacity is " + std::to_string(mem_.capacity_));
    }
    mem_.buffers_[w].push_back({col, val});
    ++mem_.tail_[w];
    counters_.peak_buffer_occupancy =
        std::max<std::uint64_t>(counters_.peak_buffer_occupancy, mem_.tail_[w]);
}

void SortMergeUnit::feed(const VecMultResult& v, std::deque<COutput>& emitted)
{
    const unsigned s = mem_.selector_;
    const auto& buf = mem_.buffers_[s];
    auto& head = mem_.head_[s];
    const auto tail = mem_.tail_[s];
    for (std::uint32_t k = 0; k < v.valid_count; ++k) {
        const Index col = v.b_vec_ind[k];
        const float val = v.c_temp_vec[k];
        while (head < tail && buf[head].col < col) {
            const RowEntry e = buf[head++];
            put(e.col, e.val, emitted);
        }
        if (head < tail && buf[head].col == col) {
            const RowEntry e = buf[head++];
            ++counters_.merge_additions;
            put(col, e.val + val, emitted);
        } else {
            put(col, val, emitted);
        }
    }
}

void SortMergeUnit::finish(std::deque<COutput>& emitted)
{
    const unsigned s = mem_.selector_;
    const auto& buf = mem_.buffers_[s];
    auto& head = mem_.head_[s];
    while (head < mem_.tail_[s]) {
        const RowEntry e = buf[head++];
        put(e.col, e.val, emitted);
    }
    if (current_.reset) {
        mem_.reset();
        return;
    }
    mem_.buffers_[s].clear();
    mem_.head_[s] = 0;
    mem_.tail_[s] = 0;
    mem_.selector_ = 1 - s;
}

std::vector<COutput> pe_sort_merge(std::span<const VecMultResult> stream, PeMemoryUnit& mem,
                                   const AElement& a, PeCounters* counters)
{
    PeCounters local;
    SortMergeUnit sm(mem, counters != nullptr ? *counters : local);
    std::deque<COutput> emitted;
    sm.begin(a);
    for (const auto& v : stream) {
        sm.feed(v, emitted);
    }
    sm.finish(emitted);
    return {emitted.begin(), emitted.end()};
}

// ---------------------------------------------------------------------------
// ProcessingElement

ProcessingElement::ProcessingElement(std::uint32_t id, const PipelineConfig& cfg)
    : id_(id), mem_(cfg.buffer_capacity), sm_(mem_, counters_)
{
}

void ProcessingElement::accept(const AElement& a)
{
    if (!wants_a()) {
        throw SimulationError("PE " + std::to_string(id_) + " received an AElement mid-row");
    }
    current_ = a;
    active_ = true;
    vectors_left_ = a.b_num_vec;
    sm_.begin(a);
    if (vectors_left_ == 0) {
        complete();
    }
}

void ProcessingElement::accept(const BVector& bv)
{
    if (!wants_b()) {
        throw SimulationError("PE " + std::to_string(id_) + " received an unexpected BVector");
    }
    const VecMultResult product = pe_vecmult(current_, bv);
    counters_.multiplications += product.valid_count;
    sm_.feed(product, output_);
    if (--vectors_left_ == 0) {
        complete();
    }
}

void ProcessingElement::complete()
{
    sm_.finish(output_);
    active_ = false;
}

// ---------------------------------------------------------------------------
// StoreKernel

StoreKernel::StoreKernel(Index rows, Index cols, std::uint32_t num_pe)
    : rows_(rows), cols_(cols), num_pe_(num_pe), last_(num_pe), seen_(num_pe, false)
{
    if (num_pe == 0) {
        throw InvalidArgument("store kernel needs at least one PE");
    }
}

void StoreKernel::accept(std::uint32_t pe, const COutput& c)
{
    if (pe >= num_pe_) {
        throw IntegrityError("output from unknown PE " + std::to_string(pe));
    }
    if (c.c_row_ind >= rows_ || c.c_col_ind >= cols_) {
        throw IntegrityError("output (" + std::to_string(c.c_row_ind) + ", " +
                             std::to_string(c.c_col_ind) + ") outside the result matrix");
    }
    if (c.c_row_ind % num_pe_ != pe) {
        throw IntegrityError("row " + std::to_string(c.c_row_ind) + " emitted by PE " +
                             std::to_string(pe));
    }
    if (seen_[pe] && last_[pe].first == c.c_row_ind && c.c_col_ind <= last_[pe].second) {
        throw IntegrityError("column order violated in row " + std::to_string(c.c_row_ind));
    }
    seen_[pe] = true;
    last_[pe] = {c.c_row_ind, c.c_col_ind};
    entries_.push_back({c.c_row_ind, c.c_col_ind, c.val});
    ++received_;
}

CsvMatrix StoreKernel::finish()
{
    const std::uint32_t w = num_pe_;
    std::sort(entries_.begin(), entries_.end(),
              [w](const CsvEntry& a, const CsvEntry& b) { return vector_major_less(a, b, w); });
    for (std::size_t k = 1; k < entries_.size(); ++k) {
        if (entries_[k].row == entries_[k - 1].row && entries_[k].col == entries_[k - 1].col) {
            throw IntegrityError("duplicate output (" + std::to_string(entries_[k].row) + ", " +
                                 std::to_string(entries_[k].col) + ")");
        }
    }
    CsvMatrix out{rows_, cols_, w, std::move(entries_)};
    entries_.clear();
    return out;
}

CsvMatrix store_collect(const std::vector<std::vector<COutput>>& qc_streams, Index rows, Index cols,
                        std::uint32_t vec_width)
{
    StoreKernel store(rows, cols, vec_width);
    for (std::size_t pe = 0; pe < qc_streams.size(); ++pe) {
        for (const auto& c : qc_streams[pe]) {
            store.accept(static_cast<std::uint32_t>(pe), c);
        }
    }
    return store.finish();
}

// ---------------------------------------------------------------------------
// Executors

namespace {

SimStats collect_stats(const LoadKernel& load, const std::deque<ProcessingElement>& pes,
                       const StoreKernel& store, std::uint64_t nnz_a)
{
    SimStats stats;
    stats.b_rows_loaded = load.b_rows_loaded();
    stats.b_rows_naive = nnz_a;
    stats.b_vectors_sent = load.b_vectors_sent();
    for (const auto& pe : pes) {
        stats.multiplications += pe.counters().multiplications;
        stats.merge_additions += pe.counters().merge_additions;
        stats.peak_buffer_occupancy =
            std::max(stats.peak_buffer_occupancy, pe.counters().peak_buffer_occupancy);
    }
    stats.c_entries_emitted = store.received();
    return stats;
}

SimResult run_sequential(const CsvMatrix& a_csv, const CsrMatrix& b, const PipelineConfig& cfg,
                         std::uint64_t seed)
{
    const std::uint32_t n = cfg.num_pe;
    LoadKernel load(a_csv, b, cfg);
    std::deque<ProcessingElement> pes;
    for (std::uint32_t p = 0; p < n; ++p) {
        pes.emplace_back(p, cfg);
    }
    StoreKernel store(a_csv.rows, b.cols, n);
    std::vector<std::deque<AElement>> qa(n);
    std::vector<std::deque<BVector>> qb(n);
    std::vector<std::deque<COutput>> qc(n);
    const std::size_t depth = cfg.fifo_depth;

    std::optional<std::pair<std::uint32_t, LoadMessage>> pending;
    bool load_done = false;
    auto peek = [&] {
        if (!pending && !load_done) {
            std::uint32_t pe = 0;
            LoadMessage msg;
            if (load.next(pe, msg)) {
                pending.emplace(pe, std::move(msg));
            } else {
                load_done = true;
            }
        }
    };

    // Stage ids: 0 = load, 1..n = PEs, n+1..2n = QC readers of the store kernel.
    const std::size_t stages = 1 + 2 * static_cast<std::size_t>(n);
    auto runnable = [&](std::size_t id) -> bool {
        if (id == 0) {
            peek();
            if (!pending) {
                return false;
            }
            const auto pe = pending->first;
            return std::holds_alternative<AElement>(pending->second) ? qa[pe].size() < depth
                                                                     : qb[pe].size() < depth;
        }
        if (id <= n) {
            const auto p = static_cast<std::uint32_t>(id - 1);
            auto& pe = pes[p];
            if (!pe.output().empty()) {
                return qc[p].size() < depth;
            }
            return (pe.wants_a() && !qa[p].empty()) || (pe.wants_b() && !qb[p].empty());
        }
        return !qc[id - n - 1].empty();
    };
    auto step = [&](std::size_t id) {
        if (id == 0) {
            const auto pe = pending->first;
            if (auto* a = std::get_if<AElement>(&pending->second)) {
                qa[pe].push_back(*a);
            } else {
                qb[pe].push_back(std::move(std::get<BVector>(pending->second)));
            }
            pending.reset();
            return;
        }
        if (id <= n) {
            const auto p = static_cast<std::uint32_t>(id - 1);
            auto& pe = pes[p];
            if (!pe.output().empty()) {
                qc[p].push_back(pe.output().front());
                pe.output().pop_front();
            } else if (pe.wants_a()) {
                pe.accept(qa[p].front());
                qa[p].pop_front();
            } else {
                pe.accept(qb[p].front());
                qb[p].pop_front();
            }
            return;
        }
        const auto p = static_cast<std::uint32_t>(id - n - 1);
        store.accept(p, qc[p].front());
        qc[p].pop_front();
    };

    if (seed == 0) {
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t id = 0; id < stages; ++id) {
                while (runnable(id)) {
                    step(id);
                    progress = true;
                }
            }
        }
    } else {
        std::mt19937_64 rng(seed);
        std::vector<std::size_t> ready;
        for (;;) {
            ready.clear();
            for (std::size_t id = 0; id < stages; ++id) {
                if (runnable(id)) {
                    ready.push_back(id);
                }
            }
            if (ready.empty()) {
                break;
            }
            step(ready[std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(rng)]);
        }
    }

    peek();
    bool drained = load_done && !pending;
    for (std::uint32_t p = 0; p < n && drained; ++p) {
        drained = qa[p].empty() && qb[p].empty() && qc[p].empty() && pes[p].wants_a() &&
                  pes[p].output().empty();
    }
    if (!drained) {
        throw SimulationError("pipeline stalled before draining");
    }
    SimStats stats = collect_stats(load, pes, store, a_csv.nnz());
    return {store.finish(), stats};
}

SimResult run_threaded(const CsvMatrix& a_csv, const CsrMatrix& b, const PipelineConfig& cfg)
{
    const std::uint32_t n = cfg.num_pe;
    LoadKernel load(a_csv, b, cfg);
    std::deque<ProcessingElement> pes;
    std::vector<std::unique_ptr<Channel<AElement>>> qa;
    std::vector<std::unique_ptr<Channel<BVector>>> qb;
    std::vector<std::unique_ptr<Channel<COutput>>> qc;
    for (std::uint32_t p = 0; p < n; ++p) {
        pes.emplace_back(p, cfg);
        qa.push_back(std::make_unique<Channel<AElement>>(cfg.fifo_depth));
        qb.push_back(std::make_unique<Channel<BVector>>(cfg.fifo_depth));
        qc.push_back(std::make_unique<Channel<COutput>>(cfg.fifo_depth));
    }
    std::vector<std::vector<COutput>> received(n);

    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::atomic<bool> aborted{false};
    auto fail = [&](std::exception_ptr e) {
        {
            std::lock_guard lock(error_mutex);
            if (!first_error) {
                first_error = e;
            }
        }
        aborted = true;
        for (std::uint32_t p = 0; p < n; ++p) {
            qa[p]->abort();
            qb[p]->abort();
            qc[p]->abort();
        }
    };

    std::vector<std::thread> threads;
    threads.emplace_back([&] {
        try {
            std::uint32_t pe = 0;
            LoadMessage msg;
            while (load.next(pe, msg)) {
                const bool ok = std::holds_alternative<AElement>(msg)
                                    ? qa[pe]->push(std::get<AElement>(msg))
                                    : qb[pe]->push(std::move(std::get<BVector>(msg)));
                if (!ok) {
                    return;
                }
            }
            for (std::uint32_t p = 0; p < n; ++p) {
                qa[p]->close();
                qb[p]->close();
            }
        } catch (...) {
            fail(std::current_exception());
        }
    });
    for (std::uint32_t p = 0; p < n; ++p) {
        threads.emplace_back([&, p] {
            try {
                auto& pe = pes[p];
                auto drain = [&] {
                    while (!pe.output().empty()) {
                        if (!qc[p]->push(pe.output().front())) {
                            return false;
                        }
                        pe.output().pop_front();
                    }
                    return true;
                };
                while (auto a = qa[p]->pop()) {
                    pe.accept(*a);
                    if (!drain()) {
                        return;
                    }
                    while (pe.wants_b()) {
                        auto bv = qb[p]->pop();
                        if (!bv) {
                            if (!aborted) {
                                throw SimulationError("QB closed while PE " + std::to_string(p) +
                                                      " still expected data");
                            }
                            return;
                        }
                        pe.accept(*bv);
                        if (!drain()) {
                            return;
                        }
                    }
                }
                qc[p]->close();
            } catch (...) {
                fail(std::current_exception());
            }
        });
        threads.emplace_back([&, p] {
            while (auto c = qc[p]->pop()) {
                received[p].push_back(*c);
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    StoreKernel store(a_csv.rows, b.cols, n);
    for (std::uint32_t p = 0; p < n; ++p) {
        for (const auto& c : received[p]) {
            store.accept(p, c);
        }
    }
    SimStats stats = collect_stats(load, pes, store, a_csv.nnz());
    return {store.finish(), stats};
}

}  // namespace

SimResult simulate(const CsrMatrix& a, const CsrMatrix& b, const PipelineConfig& cfg,
                   const SimOptions& options)
{
    validate(cfg);
    if (a.cols != b.rows) {
        throw DimensionMismatch("cannot multiply " + std::to_string(a.rows) + "x" +
                                std::to_string(a.cols) + " by " + std::to_string(b.rows) + "x" +
                                std::to_string(b.cols));
    }
    const CsvMatrix a_csv = csr_to_csv(a, cfg.num_pe);
    if (options.mode == ExecutionMode::threaded) {
        return run_threaded(a_csv, b, cfg);
    }
    return run_sequential(a_csv, b, cfg, options.schedule_seed);
}

}  // namespace fspgemm
