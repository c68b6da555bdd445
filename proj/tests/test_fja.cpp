#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sortbound/fja.hpp"
#include "sortbound/linext.hpp"

using namespace sortbound;

namespace {

// ceil(log2(n!)) by exact integer doubling, independent of the library.
std::size_t lower_bound_oracle(std::size_t n) {
    unsigned __int128 f = 1;
    for (std::size_t i = 2; i <= n; ++i) {
        f *= i;
    }
    std::size_t t = 0;
    unsigned __int128 p = 1;
    while (p < f) {
        p <<= 1;
        ++t;
    }
    return t;
}

std::size_t fja_formula(std::size_t n) {
    std::size_t total = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        total += static_cast<std::size_t>(std::ceil(std::log2(0.75 * static_cast<double>(k))));
    }
    return total;
}

}  // namespace

TEST(Fja, LowerBoundValues) {
    for (std::size_t n = 1; n <= kMaxBoundsN; ++n) {
        EXPECT_EQ(itlb(n), lower_bound_oracle(n)) << n;
    }
    EXPECT_EQ(itlb(12), 29u);
    EXPECT_EQ(itlb(13), 33u);
    EXPECT_EQ(itlb(16), 45u);
    EXPECT_EQ(itlb(22), 70u);
    EXPECT_THROW(itlb(0), DomainError);
    EXPECT_THROW(itlb(23), DomainError);
}

TEST(Fja, WorstCaseValues) {
    for (std::size_t n = 1; n <= 200; ++n) {
        EXPECT_EQ(fja_worst_case(n), fja_formula(n)) << n;
    }
    for (std::size_t n = 1; n <= 11; ++n) {
        EXPECT_EQ(fja_worst_case(n), itlb(n));
    }
    EXPECT_EQ(fja_worst_case(12), 30u);
    EXPECT_EQ(fja_worst_case(13), 34u);
    EXPECT_EQ(fja_worst_case(16), 46u);
    EXPECT_EQ(fja_worst_case(20), itlb(20));
    EXPECT_EQ(fja_worst_case(21), itlb(21));
    EXPECT_EQ(fja_worst_case(22), 71u);
}

TEST(Fja, ExhaustiveWorstCaseUpToEight) {
    for (std::size_t n = 1; n <= 8; ++n) {
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::size_t worst = 0;
        do {
            const auto r = fja_sort(perm);
            ASSERT_TRUE(std::is_sorted(r.sorted.begin(), r.sorted.end()));
            worst = std::max(worst, r.comparisons);
        } while (std::next_permutation(perm.begin(), perm.end()));
        EXPECT_EQ(worst, fja_worst_case(n)) << n;
    }
}

TEST(Fja, RandomInputsSortWithinWorstCase) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = rng() % 60;
        std::vector<int> v(n);
        for (auto& x : v) {
            x = static_cast<int>(rng() % 20);  // duplicates on purpose
        }
        const auto r = fja_sort(v);
        auto expected = v;
        std::sort(expected.begin(), expected.end());
        ASSERT_EQ(r.sorted, expected);
        ASSERT_LE(r.comparisons, n == 0 ? 0 : fja_worst_case(n));
    }
}

TEST(Fja, CustomComparator) {
    const auto r = fja_sort(std::vector<int>{3, 1, 2, 5, 4}, std::greater<>{});
    EXPECT_EQ(r.sorted, (std::vector<int>{5, 4, 3, 2, 1}));
    EXPECT_THROW(fja_sort(std::vector<int>(kMaxSortLength + 1)), DomainError);
}

TEST(Fja, AdversaryForcesWorstCase) {
    for (std::size_t n = 1; n <= 16; ++n) {
        const AdversaryRun run = fja_adversary_run(n);
        EXPECT_EQ(run.compared.size(), fja_worst_case(n)) << n;
        EXPECT_TRUE(run.final_order.is_linear());
        std::vector<std::size_t> input = run.input;
        EXPECT_EQ(fja_sort(input).comparisons, fja_worst_case(n)) << n;
    }
}

TEST(Fja, TouchProfileForSixteen) {
    const auto profile = fja_touch_profile(16);
    ASSERT_EQ(profile.size(), 46u);
    EXPECT_EQ(profile[0], 2u);
    EXPECT_EQ(profile[3], 8u);
    EXPECT_EQ(profile[7], 16u);
    EXPECT_TRUE(std::is_sorted(profile.begin(), profile.end()));
    EXPECT_EQ(profile.back(), 16u);
}

TEST(Fja, BoundsRows) {
    EXPECT_EQ(bounds_row(12).known, 30u);
    EXPECT_EQ(bounds_row(13).known, 34u);
    EXPECT_FALSE(bounds_row(16).known.has_value());
    EXPECT_EQ(bounds_row(14).known, bounds_row(14).fja);
    for (std::size_t n = 1; n <= kMaxBoundsN; ++n) {
        const BoundsRow r = bounds_row(n);
        EXPECT_LE(r.lower, r.fja);
        if (r.known) {
            EXPECT_LE(r.lower, *r.known);
            EXPECT_LE(*r.known, r.fja);
        }
    }
}
