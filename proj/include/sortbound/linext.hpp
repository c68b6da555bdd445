#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "sortbound/poset.hpp"

namespace sortbound {

using Count = std::uint64_t;

/// t[j][k] = number of linear extensions with u_j before u_k; diagonal is 0.
struct PairTable {
    std::size_t n = 0;
    Count e = 0;
    std::array<std::array<Count, kMaxElements>, kMaxElements> t{};

    Count before(std::size_t j, std::size_t k) const { return t[j][k]; }
};

/// Scratch for the downset-lattice counting passes.
///
/// One record per subset of {u_0..u_{n-1}}, indexed by characteristic
/// bitmask. A record belongs to the current pass only if its stamp equals the
/// pass stamp, so the table is zeroed once and reused across posets.
class DownsetTable {
public:
    struct Record {
        Count d = 0;  // extensions of the downset itself
        Count u = 0;  // extensions of its complement
        std::uint64_t v = 0;
    };
    static_assert(sizeof(Record) <= 24);

    explicit DownsetTable(std::size_t n) : n_(n), records_(std::size_t{1} << n) {
        if (n < 1 || n > kMaxElements) {
            throw DomainError("downset table size must be in 1..16");
        }
    }

    std::size_t capacity() const { return n_; }
    std::uint64_t stamp() const { return stamp_; }

    /// d(D) from the most recent downward pass, if D was reached by it.
    std::optional<Count> d_value(Mask downset) const {
        const Record& r = records_[downset];
        if (d_stamp_ == 0 || r.v < d_stamp_) {
            return std::nullopt;
        }
        return r.d;
    }

    /// u(D) from the most recent upward pass, if it is still current.
    std::optional<Count> u_value(Mask downset) const {
        const Record& r = records_[downset];
        if (u_stamp_ == 0 || u_stamp_ < d_stamp_ || r.v != u_stamp_) {
            return std::nullopt;
        }
        return r.u;
    }

private:
    friend Count count_linext(const Poset&, DownsetTable&);
    friend PairTable count_all_pairs(const Poset&, DownsetTable&);

    void require(const Poset& p) const {
        if (p.size() > n_) {
            throw DomainError("downset table too small for poset");
        }
    }

    std::size_t n_;
    std::vector<Record> records_;
    std::vector<std::pair<Mask, bool>> stack_;
    std::uint64_t stamp_ = 0;
    std::uint64_t d_stamp_ = 0;
    std::uint64_t u_stamp_ = 0;
};

namespace detail {

// Fills d(D) for every downset, walking down from the full set. Returns d(U).
inline Count downward_pass(const Poset& p, std::vector<DownsetTable::Record>& rec,
                           std::vector<std::pair<Mask, bool>>& stack, std::uint64_t stamp) {
    const Mask full = p.all();
    stack.clear();
    stack.emplace_back(full, false);
    while (!stack.empty()) {
        const auto [set, expanded] = stack.back();
        stack.pop_back();
        auto& r = rec[set];
        if (expanded) {
            if (set == 0) {
                r.d = 1;
                continue;
            }
            Count sum = 0;
            for (Mask m = set; m; m &= m - 1) {
                const int x = std::countr_zero(m);
                if ((p.strict_up(x) & set) == 0) {
                    sum += rec[set ^ bit(x)].d;
                }
            }
            r.d = sum;
            continue;
        }
        if (r.v == stamp) {
            continue;
        }
        r.v = stamp;
        stack.emplace_back(set, true);
        for (Mask m = set; m; m &= m - 1) {
            const int x = std::countr_zero(m);
            if ((p.strict_up(x) & set) == 0) {
                const Mask below = set ^ bit(x);
                if (rec[below].v != stamp) {
                    stack.emplace_back(below, false);
                }
            }
        }
    }
    return rec[full].d;
}

}  // namespace detail

/// e(p): the number of linear extensions.
inline Count count_linext(const Poset& p, DownsetTable& scratch) {
    scratch.require(p);
    const std::uint64_t stamp = ++scratch.stamp_;
    scratch.d_stamp_ = stamp;
    return detail::downward_pass(p, scratch.records_, scratch.stack_, stamp);
}

/// e(p) together with t[j][k] = e(p + u_j u_k) for all j != k.
///
/// A downward pass fills d; an upward pass from the empty downset fills u and,
/// for every edge V -> W = V + u_j, adds d(V) u(W) to t[j][k] for each u_k
/// outside W.
inline PairTable count_all_pairs(const Poset& p, DownsetTable& scratch) {
    scratch.require(p);
    auto& rec = scratch.records_;
    auto& stack = scratch.stack_;
    const std::uint64_t down_stamp = ++scratch.stamp_;
    scratch.d_stamp_ = down_stamp;
    PairTable out;
    out.n = p.size();
    out.e = detail::downward_pass(p, rec, stack, down_stamp);

    const std::uint64_t up_stamp = ++scratch.stamp_;
    scratch.u_stamp_ = up_stamp;
    const Mask full = p.all();
    stack.clear();
    stack.emplace_back(Mask{0}, false);
    while (!stack.empty()) {
        const auto [set, expanded] = stack.back();
        stack.pop_back();
        auto& r = rec[set];
        const Mask outside = static_cast<Mask>(full & ~set);
        if (expanded) {
            if (set == full) {
                r.u = 1;
                continue;
            }
            Count sum = 0;
            for (Mask m = outside; m; m &= m - 1) {
                const int x = std::countr_zero(m);
                if ((p.strict_down(x) & ~set) == 0) {
                    const Mask above = set | bit(x);
                    const Count uw = rec[above].u;
                    sum += uw;
                    const Count flow = r.d * uw;
                    auto& row = out.t[static_cast<std::size_t>(x)];
                    for (Mask k = static_cast<Mask>(full & ~above); k; k &= k - 1) {
                        row[std::countr_zero(k)] += flow;
                    }
                }
            }
            r.u = sum;
            continue;
        }
        if (r.v == up_stamp) {
            continue;
        }
        r.v = up_stamp;
        stack.emplace_back(set, true);
        for (Mask m = outside; m; m &= m - 1) {
            const int x = std::countr_zero(m);
            if ((p.strict_down(x) & ~set) == 0) {
                const Mask above = set | bit(x);
                if (rec[above].v != up_stamp) {
                    stack.emplace_back(above, false);
                }
            }
        }
    }
    return out;
}

/// Convenience overloads that allocate a table sized to p.
inline Count count_linext(const Poset& p) {
    DownsetTable scratch(p.size());
    return count_linext(p, scratch);
}

inline PairTable count_all_pairs(const Poset& p) {
    DownsetTable scratch(p.size());
    return count_all_pairs(p, scratch);
}

/// Elements x outside the downset D whose strict predecessors all lie in D.
inline std::vector<std::size_t> downset_neighbors(const Poset& p, Mask downset) {
    if ((downset & ~p.all()) != 0) {
        throw DomainError("downset mask has bits beyond n");
    }
    for (Mask m = downset; m; m &= m - 1) {
        if ((p.strict_down(std::countr_zero(m)) & ~downset) != 0) {
            throw DomainError("mask is not a downset");
        }
    }
    std::vector<std::size_t> out;
    for (Mask m = static_cast<Mask>(p.all() & ~downset); m; m &= m - 1) {
        const int x = std::countr_zero(m);
        if ((p.strict_down(x) & ~downset) == 0) {
            out.push_back(static_cast<std::size_t>(x));
        }
    }
    return out;
}

inline constexpr std::size_t kBruteForceLimit = 10;

/// Counts linear extensions by enumerating all n! orderings. Oracle only.
inline Count count_linext_bruteforce(const Poset& p) {
    const std::size_t n = p.size();
    if (n > kBruteForceLimit) {
        throw DomainError("brute-force counting is limited to n <= 10");
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Count total = 0;
    do {
        Mask placed = 0;
        bool ok = true;
        for (int x : order) {
            if ((p.strict_down(x) & ~placed) != 0) {
                ok = false;
                break;
            }
            placed |= bit(static_cast<std::size_t>(x));
        }
        total += ok;
    } while (std::next_permutation(order.begin(), order.end()));
    return total;
}

}  // namespace sortbound
