#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sortbound/error.hpp"
#include "sortbound/linext.hpp"
#include "sortbound/poset.hpp"

namespace sortbound {

inline constexpr std::size_t kMaxBoundsN = 22;
inline constexpr std::size_t kMaxSortLength = 10000;

/// ceil(log2 n!), the information-theoretic lower bound, in exact integer arithmetic.
inline std::size_t itlb(std::size_t n) {
    if (n < 1 || n > kMaxBoundsN) {
        throw DomainError("itlb defined for 1 <= n <= 22, got " + std::to_string(n));
    }
    unsigned __int128 f = 1;
    for (std::size_t i = 2; i <= n; ++i) {
        f *= i;
    }
    std::size_t t = 0;
    while ((static_cast<unsigned __int128>(1) << t) < f) {
        ++t;
    }
    return t;
}

/// Worst-case comparisons of merge insertion: sum over k=1..n of ceil(log2(3k/4)).
inline std::size_t fja_worst_case(std::size_t n) {
    if (n < 1 || n > kMaxSortLength) {
        throw DomainError("fja_worst_case defined for 1 <= n <= 10000");
    }
    std::size_t total = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        // smallest t >= 0 with 2^t >= 3k/4, i.e. 2^(t+2) >= 3k
        std::size_t t = 0;
        while ((std::size_t{4} << t) < 3 * k) {
            ++t;
        }
        total += t;
    }
    return total;
}

namespace detail {

// Jacobsthal-order merge insertion over opaque handles. `less(a, b)` is
// called exactly once per comparison.
template <typename Less>
std::vector<std::size_t> merge_insertion(const std::vector<std::size_t>& items, Less& less) {
    const std::size_t m = items.size();
    if (m <= 1) {
        return items;
    }
    const std::size_t pairs = m / 2;
    std::vector<std::size_t> larger;
    larger.reserve(pairs);
    std::unordered_map<std::size_t, std::size_t> partner;
    partner.reserve(pairs);
    for (std::size_t i = 0; i < pairs; ++i) {
        const std::size_t a = items[2 * i];
        const std::size_t b = items[2 * i + 1];
        if (less(a, b)) {
            larger.push_back(b);
            partner.emplace(b, a);
        } else {
            larger.push_back(a);
            partner.emplace(a, b);
        }
    }
    const std::vector<std::size_t> sorted_larger = merge_insertion(larger, less);

    std::vector<std::size_t> chain;
    chain.reserve(m);
    chain.push_back(partner.at(sorted_larger[0]));
    chain.insert(chain.end(), sorted_larger.begin(), sorted_larger.end());

    // pending[i] = (element, bound): element b_{i+2} must land below bound a_{i+2}
    struct Pending {
        std::size_t element;
        std::optional<std::size_t> bound;
    };
    std::vector<Pending> pending;
    for (std::size_t i = 1; i < pairs; ++i) {
        pending.push_back({partner.at(sorted_larger[i]), sorted_larger[i]});
    }
    if (m % 2 == 1) {
        pending.push_back({items.back(), std::nullopt});
    }

    auto insert = [&](const Pending& p) {
        std::size_t hi = chain.size();
        if (p.bound) {
            hi = 0;
            while (chain[hi] != *p.bound) {
                ++hi;
            }
        }
        std::size_t lo = 0;
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (less(p.element, chain[mid])) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        chain.insert(chain.begin() + static_cast<std::ptrdiff_t>(lo), p.element);
    };

    // Groups end at Jacobsthal numbers 3, 5, 11, 21, ... (1-based b indices);
    // each group is inserted from its highest index down.
    std::size_t done = 1;  // b_1 already placed
    std::size_t prev = 1, curr = 1;
    const std::size_t total_b = pending.size() + 1;
    while (done < total_b) {
        const std::size_t next = curr + 2 * prev;
        prev = curr;
        curr = next;
        const std::size_t top = std::min(curr, total_b);
        for (std::size_t b = top; b > done; --b) {
            insert(pending[b - 2]);
        }
        done = top;
    }
    return chain;
}

}  // namespace detail

template <typename T>
struct FjaResult {
    std::vector<T> sorted;
    std::size_t comparisons = 0;
};

/// Sorts by merge insertion (Ford-Johnson), counting calls to `less`.
template <typename T, typename Less = std::less<>>
FjaResult<T> fja_sort(const std::vector<T>& items, Less less = {}) {
    if (items.size() > kMaxSortLength) {
        throw DomainError("fja_sort supports at most 10000 items");
    }
    FjaResult<T> out;
    auto counting = [&](std::size_t a, std::size_t b) {
        ++out.comparisons;
        return less(items[a], items[b]);
    };
    std::vector<std::size_t> handles(items.size());
    for (std::size_t i = 0; i < handles.size(); ++i) {
        handles[i] = i;
    }
    const auto order = detail::merge_insertion(handles, counting);
    out.sorted.reserve(items.size());
    for (std::size_t h : order) {
        out.sorted.push_back(items[h]);
    }
    return out;
}

/// A merge-insertion run against an adversary that answers every comparison
/// so as to keep the larger number of consistent orderings.
struct AdversaryRun {
    std::vector<std::pair<std::size_t, std::size_t>> compared;
    std::vector<std::size_t> input;  // a permutation realizing the same answers
    Poset final_order;
};

inline AdversaryRun fja_adversary_run(std::size_t n) {
    if (n < 1 || n > kMaxElements) {
        throw DomainError("adversary run supports 1 <= n <= 16");
    }
    AdversaryRun run;
    Poset state = Poset::antichain(n);
    DownsetTable scratch(n);
    auto answer = [&](std::size_t a, std::size_t b) {
        run.compared.emplace_back(a, b);
        if (!state.comparable(a, b)) {
            const PairTable t = count_all_pairs(state, scratch);
            state = t.t[a][b] >= t.t[b][a] ? state.with_relation(a, b) : state.with_relation(b, a);
        }
        return state.less_equal(a, b);
    };
    std::vector<std::size_t> handles(n);
    for (std::size_t i = 0; i < n; ++i) {
        handles[i] = i;
    }
    const auto order = detail::merge_insertion(handles, answer);
    run.input.assign(n, 0);
    for (std::size_t rank = 0; rank < n; ++rank) {
        run.input[order[rank]] = rank;
    }
    run.final_order = state;
    return run;
}

/// T(k) for k = 1..(comparisons made): elements touched by the first k
/// comparisons of a worst-case merge-insertion run on n elements.
inline std::vector<std::size_t> fja_touch_profile(std::size_t n) {
    const AdversaryRun run = fja_adversary_run(n);
    std::vector<std::size_t> profile;
    Mask touched = 0;
    for (const auto& [a, b] : run.compared) {
        touched |= bit(a) | bit(b);
        profile.push_back(static_cast<std::size_t>(popcount(touched)));
    }
    return profile;
}

struct BoundsRow {
    std::size_t n = 0;
    std::size_t lower = 0;  // ceil(log2 n!)
    std::size_t fja = 0;    // merge-insertion worst case
    std::optional<std::size_t> known;
    std::string note;
};

/// Lower bound, merge-insertion cost and the established optimum where known.
inline BoundsRow bounds_row(std::size_t n) {
    BoundsRow row{n, itlb(n), fja_worst_case(n), std::nullopt, {}};
    if (n <= 11 || n == 20 || n == 21) {
        row.known = row.fja;
        row.note = "merge insertion meets the lower bound";
    } else if (n == 12) {
        row.known = 30;
        row.note = "exhaustive search (Wells, 1965)";
    } else if (n == 13) {
        row.known = 34;
        row.note = "exhaustive search (Kasai et al., 1994)";
    } else if (n == 14 || n == 15 || n == 22) {
        row.known = row.fja;
        row.note = "exhaustive search (2004)";
    } else {
        row.note = "open";
    }
    return row;
}

}  // namespace sortbound
