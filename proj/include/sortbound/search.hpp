#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <queue>
#include <shared_mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <unistd.h>

#include "sortbound/canonical.hpp"
#include "sortbound/checkpoint.hpp"
#include "sortbound/error.hpp"
#include "sortbound/linext.hpp"
#include "sortbound/poset.hpp"

namespace sortbound {

inline constexpr std::size_t kMaxBudget = 63;

/// Restricts the posets kept at step `step` to those with touched_count in [lo, hi].
struct TouchBound {
    std::size_t step = 0;
    std::size_t lo = 0;
    std::size_t hi = kMaxElements;

    bool admits(const Poset& p) const {
        const std::size_t t = p.touched_count();
        return lo <= t && t <= hi;
    }
};

struct SearchOptions {
    std::size_t workers = 1;
    std::size_t mem_budget = std::size_t{2} << 30;  // bytes of keys held per step before spilling runs
    std::optional<std::filesystem::path> checkpoint_dir;
    bool resume = false;
    bool use_cache = true;
    std::optional<TouchBound> touch;
    /// Progress messages; may be empty.
    std::function<void(const std::string&)> log;
};

struct SetStats {
    std::size_t count = 0;
    Count min_e = 0;
    Count max_e = 0;
};

/// Deduplicated posets at one step, held as sorted dedup keys.
class CandidateSet {
public:
    CandidateSet() = default;
    CandidateSet(std::size_t n, std::size_t budget, std::size_t step, Phase phase)
        : n_(n), budget_(budget), step_(step), phase_(phase) {}

    std::size_t n() const { return n_; }
    std::size_t budget() const { return budget_; }
    std::size_t step() const { return step_; }
    Phase phase() const { return phase_; }
    std::size_t size() const { return keys_.size(); }
    bool empty() const { return keys_.empty(); }
    const std::vector<CanonicalCode>& keys() const { return keys_; }

    bool contains(const CanonicalCode& key) const { return std::binary_search(keys_.begin(), keys_.end(), key); }

    /// Pair (j, k) whose comparison witnessed sortability of keys()[i], in the
    /// labeling of keys()[i].decode(). Backward sets only.
    std::optional<std::pair<std::uint8_t, std::uint8_t>> witness(std::size_t i) const {
        if (i >= witnesses_.size()) {
            return std::nullopt;
        }
        return witnesses_[i];
    }

    SetStats stats() const {
        SetStats s;
        s.count = keys_.size();
        if (keys_.empty()) {
            return s;
        }
        DownsetTable scratch(n_);
        s.min_e = std::numeric_limits<Count>::max();
        for (const auto& k : keys_) {
            const Count e = count_linext(k.decode(), scratch);
            s.min_e = std::min(s.min_e, e);
            s.max_e = std::max(s.max_e, e);
        }
        return s;
    }

    /// Takes ownership of keys; sorts and removes duplicates.
    void assign(std::vector<CanonicalCode> keys) {
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        keys_ = std::move(keys);
        witnesses_.clear();
    }

    void assign_sorted(std::vector<CanonicalCode> keys, std::vector<std::pair<std::uint8_t, std::uint8_t>> witnesses = {}) {
        keys_ = std::move(keys);
        witnesses_ = std::move(witnesses);
    }

private:
    std::size_t n_ = 0;
    std::size_t budget_ = 0;
    std::size_t step_ = 0;
    Phase phase_ = Phase::Forward;
    std::vector<CanonicalCode> keys_;
    std::vector<std::pair<std::uint8_t, std::uint8_t>> witnesses_;
};

/// Writes `set` to `path` in the checkpoint format.
inline void checkpoint(const CandidateSet& set, const std::filesystem::path& path) {
    CheckpointWriter w(path, {static_cast<std::uint8_t>(set.n()), static_cast<std::uint8_t>(set.budget()),
                              static_cast<std::uint8_t>(set.step()), set.phase(), 0});
    for (const auto& k : set.keys()) {
        w.add(k);
    }
    w.finish();
}

/// Reads a checkpoint written by `checkpoint`.
inline CandidateSet resume(const std::filesystem::path& path) {
    CheckpointReader r(path);
    const auto& h = r.header();
    CandidateSet set(h.n, h.budget, h.step, h.phase);
    std::vector<CanonicalCode> keys;
    keys.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(h.count, 1u << 20)));
    CanonicalCode code;
    while (r.next(code)) {
        keys.push_back(code);
    }
    set.assign_sorted(std::move(keys));
    return set;
}

/// As `resume`, rejecting a file whose header does not match the expected search.
inline CandidateSet resume(const std::filesystem::path& path, std::size_t n, std::size_t budget, std::size_t step,
                           Phase phase) {
    {
        CheckpointReader r(path);
        const auto& h = r.header();
        if (h.n != n) {
            throw CheckpointError(6, "element count " + std::to_string(h.n) + " != expected " + std::to_string(n));
        }
        if (h.budget != budget) {
            throw CheckpointError(7, "budget mismatch");
        }
        if (h.step != step) {
            throw CheckpointError(8, "step mismatch");
        }
        if (h.phase != phase) {
            throw CheckpointError(9, "phase mismatch");
        }
    }
    return resume(path);
}

/// Memoized "sortable in r comparisons" answers keyed by dedup key.
///
/// Stores, per key, the smallest r known sortable and the largest r known
/// not sortable, so a `true` at r answers every r' >= r and a `false` at r
/// answers every r' <= r. Safe for concurrent use.
class SortabilityCache {
public:
    std::optional<bool> lookup(const CanonicalCode& key, std::size_t r) const {
        std::shared_lock lock(mutex_);
        const auto it = map_.find(key);
        if (it == map_.end()) {
            return std::nullopt;
        }
        if (static_cast<int>(r) >= it->second.min_true) {
            return true;
        }
        if (static_cast<int>(r) <= it->second.max_false) {
            return false;
        }
        return std::nullopt;
    }

    void insert(const CanonicalCode& key, std::size_t r, bool sortable) {
        std::unique_lock lock(mutex_);
        auto& b = map_[key];
        if (sortable) {
            b.min_true = std::min(b.min_true, static_cast<int>(r));
        } else {
            b.max_false = std::max(b.max_false, static_cast<int>(r));
        }
        if (b.max_false >= b.min_true) {
            throw std::logic_error("sortability cache: contradictory entries");
        }
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return map_.size();
    }

    void clear() {
        std::unique_lock lock(mutex_);
        map_.clear();
    }

private:
    struct Bounds {
        int min_true = std::numeric_limits<int>::max();
        int max_false = -1;
    };
    mutable std::shared_mutex mutex_;
    std::unordered_map<CanonicalCode, Bounds, CanonicalCodeHash> map_;
};

namespace detail {

inline Count pow2(std::size_t r) { return r >= 64 ? std::numeric_limits<Count>::max() : Count{1} << r; }

// Results for positions at or before the touch-bounded step depend on the
// search depth, so they live apart from the depth-free cache.
class DepthCache {
public:
    std::optional<bool> lookup(const CanonicalCode& key, std::size_t r) const {
        std::lock_guard lock(mutex_);
        const auto it = map_.find({key, r});
        if (it == map_.end()) {
            return std::nullopt;
        }
        return it->second;
    }
    void insert(const CanonicalCode& key, std::size_t r, bool v) {
        std::lock_guard lock(mutex_);
        map_[{key, r}] = v;
    }

private:
    struct Hash {
        std::size_t operator()(const std::pair<CanonicalCode, std::size_t>& k) const noexcept {
            return CanonicalCodeHash{}(k.first) * 31 + k.second;
        }
    };
    mutable std::mutex mutex_;
    std::unordered_map<std::pair<CanonicalCode, std::size_t>, bool, Hash> map_;
};

}  // namespace detail

/// Exact recursive decision of "p can be sorted in r more comparisons".
///
/// One instance per worker: owns its DownsetTable; the cache may be shared.
/// With a touch bound, positions at depth budget - r <= bound.step must also
/// respect the bound.
class SortabilityChecker {
public:
    SortabilityChecker(std::size_t n, SortabilityCache* cache, std::optional<TouchBound> touch = std::nullopt,
                       std::size_t budget = 0, detail::DepthCache* depth_cache = nullptr)
        : scratch_(n), cache_(cache), touch_(touch), budget_(budget), depth_cache_(depth_cache) {}

    bool is_sortable(const Poset& p, std::size_t r) {
        const bool bounded = touch_ && r <= budget_ && budget_ - r <= touch_->step;
        if (bounded) {
            return bounded_sortable(p, r);
        }
        return sortable(p, r);
    }

    std::size_t calls() const { return calls_; }

private:
    struct Branch {
        CanonicalCode lo_key, hi_key;  // normalized pair of child keys
        Poset larger, smaller;
        Count max_e;
    };

    // Candidate comparisons whose outcomes both fit in r - 1, deduplicated by
    // the keys of their outcomes, most lopsided first.
    std::vector<Branch> branches(const Poset& p, const PairTable& t, std::size_t r) {
        const Count half = detail::pow2(r - 1);
        std::vector<Branch> out;
        const std::size_t n = p.size();
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                if (p.comparable(j, k)) {
                    continue;
                }
                const Count e1 = t.t[j][k], e2 = t.t[k][j];
                if (e1 > half || e2 > half) {
                    continue;
                }
                Poset a = p.with_relation(j, k), b = p.with_relation(k, j);
                if (e1 < e2) {
                    std::swap(a, b);
                }
                CanonicalCode ka = dedup_key(a), kb = dedup_key(b);
                out.push_back({std::min(ka, kb), std::max(ka, kb), a, b, std::max(e1, e2)});
            }
        }
        std::sort(out.begin(), out.end(), [](const Branch& x, const Branch& y) {
            if (x.max_e != y.max_e) {
                return x.max_e > y.max_e;
            }
            return std::tie(x.lo_key, x.hi_key) < std::tie(y.lo_key, y.hi_key);
        });
        out.erase(std::unique(out.begin(), out.end(),
                              [](const Branch& x, const Branch& y) {
                                  return x.lo_key == y.lo_key && x.hi_key == y.hi_key;
                              }),
                  out.end());
        return out;
    }

    bool sortable(const Poset& p, std::size_t r) {
        ++calls_;
        if (p.is_linear()) {
            return true;
        }
        if (r == 0) {
            return false;
        }
        const CanonicalCode key = dedup_key(p);
        if (cache_) {
            if (auto hit = cache_->lookup(key, r)) {
                return *hit;
            }
        }
        const PairTable t = count_all_pairs(p, scratch_);
        bool result = false;
        if (t.e > detail::pow2(r)) {
            result = false;
        } else if (t.e <= r + 1) {
            // any distinguishing comparison splits e into two smaller parts
            result = true;
        } else {
            for (const Branch& b : branches(p, t, r)) {
                if (sortable(b.larger, r - 1) && sortable(b.smaller, r - 1)) {
                    result = true;
                    break;
                }
            }
        }
        if (cache_) {
            cache_->insert(key, r, result);
        }
        return result;
    }

    bool bounded_sortable(const Poset& p, std::size_t r) {
        ++calls_;
        const std::size_t depth = budget_ - r;
        const std::size_t touched = p.touched_count();
        if (touched > touch_->hi) {
            return false;  // touched count never decreases
        }
        if (depth == touch_->step) {
            return touched >= touch_->lo && sortable(p, r);
        }
        if (p.is_linear()) {
            // further comparisons are impossible, so step `touch_->step` is never reached
            return touched >= touch_->lo;
        }
        if (r == 0) {
            return false;
        }
        const CanonicalCode key = dedup_key(p);
        if (depth_cache_) {
            if (auto hit = depth_cache_->lookup(key, r)) {
                return *hit;
            }
        }
        const PairTable t = count_all_pairs(p, scratch_);
        bool result = false;
        if (t.e <= detail::pow2(r)) {
            for (const Branch& b : branches(p, t, r)) {
                if (is_sortable(b.larger, r - 1) && is_sortable(b.smaller, r - 1)) {
                    result = true;
                    break;
                }
            }
        }
        if (depth_cache_) {
            depth_cache_->insert(key, r, result);
        }
        return result;
    }

    DownsetTable scratch_;
    SortabilityCache* cache_;
    std::optional<TouchBound> touch_;
    std::size_t budget_;
    detail::DepthCache* depth_cache_;
    std::size_t calls_ = 0;
};

/// is_sortable with a private checker; `cache` may be null.
inline bool is_sortable(const Poset& p, std::size_t r, SortabilityCache* cache = nullptr) {
    SortabilityChecker checker(p.size(), cache);
    return checker.is_sortable(p, r);
}

struct SearchVerdict {
    enum class Outcome { Sortable, NotSortable };
    Outcome outcome = Outcome::NotSortable;
    std::optional<std::size_t> first_empty;
    Phase phase = Phase::Forward;
    std::vector<std::size_t> per_level;       // |S_c| for c = 0, 1, ... up to the last forward step run
    std::vector<std::size_t> backward_sizes;  // |S*_c| for c = C, C-1, ... down to the last backward step run
    std::size_t n = 0;
    std::size_t budget = 0;

    bool sortable() const { return outcome == Outcome::Sortable; }
};

inline const char* to_string(SearchVerdict::Outcome o) {
    return o == SearchVerdict::Outcome::Sortable ? "Sortable" : "NotSortable";
}

namespace detail {

template <typename Body>
void run_workers(std::size_t workers, std::size_t items, Body&& body) {
    workers = std::max<std::size_t>(1, std::min(workers, std::max<std::size_t>(items, 1)));
    if (workers == 1) {
        body(0, std::size_t{1});
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                body(w, workers);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

// Accumulates keys for one worker; sorted runs go to disk when the in-memory
// share of the budget is exceeded.
class RunBuffer {
public:
    RunBuffer(std::size_t limit_keys, std::filesystem::path spill_dir, std::string prefix, std::uint8_t n)
        : limit_(std::max<std::size_t>(limit_keys, 1024)), dir_(std::move(spill_dir)), prefix_(std::move(prefix)),
          n_(n) {}

    void push(const CanonicalCode& key) {
        keys_.push_back(key);
        if (keys_.size() >= limit_) {
            compact();
            if (keys_.size() >= limit_ / 2) {
                spill();
            }
        }
    }

    void compact() {
        std::sort(keys_.begin(), keys_.end());
        keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
    }

    std::vector<CanonicalCode>& keys() { return keys_; }
    const std::vector<std::filesystem::path>& runs() const { return runs_; }

private:
    void spill() {
        std::filesystem::create_directories(dir_);
        auto path = dir_ / (prefix_ + "_run" + std::to_string(runs_.size()) + ".sbnd");
        CheckpointWriter w(path, {n_, 0, 0, Phase::Forward, 0});
        for (const auto& k : keys_) {
            w.add(k);
        }
        w.finish();
        runs_.push_back(path);
        keys_.clear();
    }

    std::size_t limit_;
    std::filesystem::path dir_;
    std::string prefix_;
    std::uint8_t n_;
    std::vector<CanonicalCode> keys_;
    std::vector<std::filesystem::path> runs_;
};

// k-way merge of sorted unique in-memory runs and on-disk runs into one sorted unique vector.
inline std::vector<CanonicalCode> merge_runs(std::vector<RunBuffer>& buffers) {
    struct Source {
        std::vector<CanonicalCode>* mem = nullptr;
        std::size_t pos = 0;
        std::unique_ptr<CheckpointReader> file;
        CanonicalCode head{};
        bool advance() {
            if (mem) {
                if (pos == mem->size()) {
                    return false;
                }
                head = (*mem)[pos++];
                return true;
            }
            return file->next(head);
        }
    };
    std::vector<Source> sources;
    std::size_t total = 0;
    bool any_files = false;
    for (auto& b : buffers) {
        b.compact();
        total += b.keys().size();
        sources.push_back({&b.keys(), 0, nullptr, {}});
        for (const auto& path : b.runs()) {
            Source s;
            s.file = std::make_unique<CheckpointReader>(path);
            total += static_cast<std::size_t>(s.file->header().count);
            sources.push_back(std::move(s));
            any_files = true;
        }
    }
    if (!any_files && sources.size() == 1) {
        return std::move(*sources[0].mem);
    }
    using Item = std::pair<CanonicalCode, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (sources[i].advance()) {
            heap.emplace(sources[i].head, i);
        }
    }
    std::vector<CanonicalCode> out;
    out.reserve(total);
    while (!heap.empty()) {
        auto [key, i] = heap.top();
        heap.pop();
        if (out.empty() || out.back() != key) {
            out.push_back(key);
        }
        if (sources[i].advance()) {
            heap.emplace(sources[i].head, i);
        }
    }
    for (auto& b : buffers) {
        for (const auto& path : b.runs()) {
            std::filesystem::remove(path);
        }
    }
    return out;
}

inline std::filesystem::path spill_dir(const SearchOptions& opts) {
    if (opts.checkpoint_dir) {
        return *opts.checkpoint_dir / "runs";
    }
    return std::filesystem::temp_directory_path() / ("sortbound_runs_" + std::to_string(::getpid()));
}

}  // namespace detail

/// Builds S_c from S_{c-1}: for each poset and each incomparable pair whose
/// two outcomes both have at most 2^(budget - c) extensions, keeps the
/// outcome with more extensions (ties: smaller dedup key). Linear orders are
/// carried over unchanged.
inline CandidateSet forward_step(const CandidateSet& prev, std::size_t c, std::size_t budget,
                                 const SearchOptions& opts = {}) {
    if (c == 0 || c > budget) {
        throw DomainError("forward step index must be in 1..budget");
    }
    const Count bound = detail::pow2(budget - c);
    const std::size_t n = prev.n();
    const auto& parents = prev.keys();
    const std::size_t workers = std::max<std::size_t>(1, opts.workers);
    const std::size_t per_worker = opts.mem_budget / sizeof(CanonicalCode) / workers;
    std::vector<detail::RunBuffer> buffers;
    for (std::size_t w = 0; w < workers; ++w) {
        buffers.emplace_back(per_worker, detail::spill_dir(opts), "fwd" + std::to_string(c) + "_w" + std::to_string(w),
                             static_cast<std::uint8_t>(n));
    }
    const bool filter = opts.touch && opts.touch->step == c;
    detail::run_workers(workers, parents.size(), [&](std::size_t w, std::size_t stride) {
        DownsetTable scratch(n);
        auto& out = buffers[w];
        for (std::size_t i = w; i < parents.size(); i += stride) {
            const Poset p = parents[i].decode();
            if (p.is_linear()) {
                // already sorted; the remaining comparisons are simply not used
                if (!filter || opts.touch->admits(p)) {
                    out.push(parents[i]);
                }
                continue;
            }
            const PairTable t = count_all_pairs(p, scratch);
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t k = j + 1; k < n; ++k) {
                    if (p.comparable(j, k)) {
                        continue;
                    }
                    const Count e1 = t.t[j][k], e2 = t.t[k][j];
                    if (e1 > bound || e2 > bound) {
                        continue;
                    }
                    CanonicalCode key;
                    if (e1 > e2) {
                        key = dedup_key(p.with_relation(j, k));
                    } else if (e2 > e1) {
                        key = dedup_key(p.with_relation(k, j));
                    } else {
                        key = std::min(dedup_key(p.with_relation(j, k)), dedup_key(p.with_relation(k, j)));
                    }
                    if (filter && !opts.touch->admits(key.decode())) {
                        continue;
                    }
                    out.push(key);
                }
            }
        }
    });
    CandidateSet next(n, budget, c, Phase::Forward);
    next.assign_sorted(detail::merge_runs(buffers));
    return next;
}

/// Builds S*_c from S*_{c+1} and S_c: keeps P when some incomparable pair has
/// one outcome in S*_{c+1} and the other also in it or sortable in the
/// remaining budget - c - 1 comparisons.
inline CandidateSet backward_step(const CandidateSet& next_star, const CandidateSet& current, std::size_t c,
                                  std::size_t budget, SortabilityCache* cache, const SearchOptions& opts = {},
                                  detail::DepthCache* depth_cache = nullptr) {
    if (c >= budget) {
        throw DomainError("backward step index must be below the budget");
    }
    const std::size_t n = current.n();
    const std::size_t rest = budget - c - 1;
    const Count bound = detail::pow2(rest);
    const auto& posets = current.keys();
    std::vector<std::uint8_t> keep(posets.size(), 0);
    std::vector<std::pair<std::uint8_t, std::uint8_t>> witness(posets.size());
    const std::size_t workers = std::max<std::size_t>(1, opts.workers);
    detail::run_workers(workers, posets.size(), [&](std::size_t w, std::size_t stride) {
        DownsetTable scratch(n);
        SortabilityChecker checker(n, cache, opts.touch, budget, depth_cache);
        for (std::size_t i = w; i < posets.size(); i += stride) {
            const Poset p = posets[i].decode();
            if (p.is_linear()) {
                keep[i] = 1;
                continue;
            }
            const PairTable t = count_all_pairs(p, scratch);
            bool found = false;
            for (std::size_t j = 0; j < n && !found; ++j) {
                for (std::size_t k = j + 1; k < n && !found; ++k) {
                    if (p.comparable(j, k) || t.t[j][k] > bound || t.t[k][j] > bound) {
                        continue;
                    }
                    const Poset p1 = p.with_relation(j, k), p2 = p.with_relation(k, j);
                    const bool in1 = next_star.contains(dedup_key(p1));
                    const bool in2 = next_star.contains(dedup_key(p2));
                    if ((in1 && in2) || (in1 && checker.is_sortable(p2, rest)) ||
                        (in2 && checker.is_sortable(p1, rest))) {
                        found = true;
                        witness[i] = {static_cast<std::uint8_t>(j), static_cast<std::uint8_t>(k)};
                    }
                }
            }
            keep[i] = found;
        }
    });
    std::vector<CanonicalCode> kept;
    std::vector<std::pair<std::uint8_t, std::uint8_t>> kept_witness;
    for (std::size_t i = 0; i < posets.size(); ++i) {
        if (keep[i]) {
            kept.push_back(posets[i]);
            kept_witness.push_back(witness[i]);
        }
    }
    CandidateSet out(n, budget, c, Phase::Backward);
    out.assign_sorted(std::move(kept), std::move(kept_witness));
    return out;
}

namespace detail {

inline std::filesystem::path level_path(const std::filesystem::path& dir, Phase phase, std::size_t c) {
    return dir / (std::string(phase == Phase::Forward ? "forward_" : "backward_") + std::to_string(c) + ".sbnd");
}

inline void log(const SearchOptions& opts, const std::string& msg) {
    if (opts.log) {
        opts.log(msg);
    }
}

}  // namespace detail

/// Decides whether n elements can be sorted in `budget` comparisons.
inline SearchVerdict decide(std::size_t n, std::size_t budget, const SearchOptions& opts = {},
                            SortabilityCache* shared_cache = nullptr) {
    if (n < 1 || n > kMaxElements) {
        throw DomainError("n must be in 1..16");
    }
    if (budget > kMaxBudget) {
        throw DomainError("budget must be at most 63");
    }
    if (opts.touch && (opts.touch->lo > opts.touch->hi || opts.touch->hi > n)) {
        throw DomainError("touch bound must satisfy 0 <= lo <= hi <= n");
    }
    SortabilityCache local_cache;
    SortabilityCache* cache = opts.use_cache ? (shared_cache ? shared_cache : &local_cache) : nullptr;
    detail::DepthCache depth_cache;
    detail::DepthCache* depth = opts.use_cache ? &depth_cache : nullptr;

    SearchVerdict verdict;
    verdict.n = n;
    verdict.budget = budget;

    const auto dir = opts.checkpoint_dir;
    if (dir) {
        std::filesystem::create_directories(*dir);
    }
    auto saved = [&](Phase ph, std::size_t c) {
        return dir && opts.resume && std::filesystem::exists(detail::level_path(*dir, ph, c));
    };
    auto save = [&](const CandidateSet& s) {
        if (dir) {
            checkpoint(s, detail::level_path(*dir, s.phase(), s.step()));
        }
    };

    std::vector<CandidateSet> forward;
    if (saved(Phase::Forward, 0)) {
        forward.push_back(resume(detail::level_path(*dir, Phase::Forward, 0), n, budget, 0, Phase::Forward));
    } else {
        CandidateSet s0(n, budget, 0, Phase::Forward);
        s0.assign({dedup_key(Poset::antichain(n))});
        save(s0);
        forward.push_back(std::move(s0));
    }
    verdict.per_level.push_back(forward[0].size());

    for (std::size_t c = 1; c <= budget; ++c) {
        CandidateSet next;
        if (saved(Phase::Forward, c)) {
            next = resume(detail::level_path(*dir, Phase::Forward, c), n, budget, c, Phase::Forward);
            detail::log(opts, "forward " + std::to_string(c) + ": resumed " + std::to_string(next.size()));
        } else {
            const auto t0 = std::chrono::steady_clock::now();
            next = forward_step(forward.back(), c, budget, opts);
            save(next);
            const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
            detail::log(opts, "forward " + std::to_string(c) + ": " + std::to_string(next.size()) + " posets, " +
                                  std::to_string(ms.count()) + " ms");
        }
        verdict.per_level.push_back(next.size());
        if (next.empty()) {
            verdict.outcome = SearchVerdict::Outcome::NotSortable;
            verdict.first_empty = c;
            verdict.phase = Phase::Forward;
            return verdict;
        }
        forward.push_back(std::move(next));
    }

    // S*_C: the linear orders in S_C (for budget >= 1 the forward bound already forces this).
    CandidateSet star;
    if (saved(Phase::Backward, budget)) {
        star = resume(detail::level_path(*dir, Phase::Backward, budget), n, budget, budget, Phase::Backward);
    } else {
        std::vector<CanonicalCode> linear;
        for (const auto& k : forward[budget].keys()) {
            if (k.decode().is_linear()) {
                linear.push_back(k);
            }
        }
        star = CandidateSet(n, budget, budget, Phase::Backward);
        star.assign_sorted(std::move(linear));
        save(star);
    }
    verdict.backward_sizes.push_back(star.size());
    if (star.empty()) {
        verdict.outcome = SearchVerdict::Outcome::NotSortable;
        verdict.first_empty = budget;
        verdict.phase = Phase::Backward;
        return verdict;
    }

    for (std::size_t c = budget; c-- > 0;) {
        CandidateSet next_star;
        if (saved(Phase::Backward, c)) {
            next_star = resume(detail::level_path(*dir, Phase::Backward, c), n, budget, c, Phase::Backward);
        } else {
            const auto t0 = std::chrono::steady_clock::now();
            next_star = backward_step(star, forward[c], c, budget, cache, opts, depth);
            save(next_star);
            const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
            detail::log(opts, "backward " + std::to_string(c) + ": " + std::to_string(next_star.size()) + " of " +
                                  std::to_string(forward[c].size()) + " sortable, " + std::to_string(ms.count()) + " ms");
        }
        // S_{c+1} members that are not in S*_{c+1} are known unsortable.
        if (cache && !opts.touch) {
            for (const auto& k : forward[c + 1].keys()) {
                if (!star.contains(k)) {
                    cache->insert(k, budget - c - 1, false);
                }
            }
        }
        verdict.backward_sizes.push_back(next_star.size());
        if (next_star.empty()) {
            verdict.outcome = SearchVerdict::Outcome::NotSortable;
            verdict.first_empty = c;
            verdict.phase = Phase::Backward;
            return verdict;
        }
        star = std::move(next_star);
    }
    verdict.outcome = SearchVerdict::Outcome::Sortable;
    verdict.phase = Phase::Backward;
    return verdict;
}

/// decide() restricted to algorithms whose first `step` comparisons touch
/// between lo and hi elements.
inline SearchVerdict decide_touch_bounded(std::size_t n, std::size_t budget, std::size_t step, std::size_t lo,
                                          std::size_t hi, SearchOptions opts = {}) {
    opts.touch = TouchBound{step, lo, hi};
    return decide(n, budget, opts);
}

}  // namespace sortbound
