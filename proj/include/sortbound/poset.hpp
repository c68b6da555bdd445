#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>

#include "sortbound/error.hpp"

namespace sortbound {

inline constexpr std::size_t kMaxElements = 16;

using Mask = std::uint16_t;

constexpr Mask bit(std::size_t i) { return static_cast<Mask>(1u << i); }
constexpr Mask low_bits(std::size_t n) { return n >= 16 ? Mask{0xFFFF} : static_cast<Mask>((1u << n) - 1u); }
constexpr int popcount(Mask m) { return std::popcount(m); }

/// Partial order over u_0..u_{n-1}, n <= 16.
///
/// Row j of `up` has bit k set iff u_j <= u_k; `down` holds the transposed
/// matrix. Both always satisfy reflexivity, antisymmetry and transitivity.
/// Bits at positions >= n are zero.
class Poset {
public:
    Poset() = default;

    /// The total disorder on n elements: only the reflexive pairs.
    static Poset antichain(std::size_t n) {
        if (n < 1 || n > kMaxElements) {
            throw DomainError("element count must be in 1..16, got " + std::to_string(n));
        }
        Poset p;
        p.n_ = static_cast<std::uint8_t>(n);
        for (std::size_t i = 0; i < n; ++i) {
            p.up_[i] = bit(i);
            p.down_[i] = bit(i);
        }
        return p;
    }

    /// A chain u_0 < u_1 < ... < u_{n-1}.
    static Poset chain(std::size_t n) {
        Poset p = antichain(n);
        for (std::size_t i = 0; i < n; ++i) {
            p.up_[i] = static_cast<Mask>(low_bits(n) & ~low_bits(i));
            p.down_[i] = low_bits(i + 1);
        }
        return p;
    }

    /// Builds a poset directly from its `up` rows. The rows must already be a
    /// partial order; use `is_valid_order` to check untrusted input.
    static Poset from_rows(std::size_t n, const std::array<Mask, kMaxElements>& rows) {
        Poset p = antichain(n);
        for (std::size_t i = 0; i < n; ++i) {
            p.up_[i] = rows[i];
        }
        p.rebuild_down();
        return p;
    }

    std::size_t size() const { return n_; }
    Mask all() const { return low_bits(n_); }

    /// Elements u_k with u_j <= u_k (including j).
    Mask up(std::size_t j) const { return up_[j]; }
    /// Elements u_k with u_k <= u_j (including j).
    Mask down(std::size_t j) const { return down_[j]; }
    Mask strict_up(std::size_t j) const { return static_cast<Mask>(up_[j] & ~bit(j)); }
    Mask strict_down(std::size_t j) const { return static_cast<Mask>(down_[j] & ~bit(j)); }

    const std::array<Mask, kMaxElements>& rows() const { return up_; }

    bool less_equal(std::size_t j, std::size_t k) const { return (up_[j] >> k) & 1u; }
    bool comparable(std::size_t j, std::size_t k) const { return less_equal(j, k) || less_equal(k, j); }

    /// The result of learning u_j < u_k: transitive closure of R + (u_j, u_k).
    /// Returns the poset unchanged when the pair is already related that way.
    Poset with_relation(std::size_t j, std::size_t k) const {
        check_index(j);
        check_index(k);
        if (j == k) {
            throw DomainError("cannot compare an element with itself");
        }
        if (less_equal(k, j)) {
            throw ContradictionError(j, k);
        }
        Poset p = *this;
        if (less_equal(j, k)) {
            return p;
        }
        const Mask above = up_[k];
        const Mask below = down_[j];
        for (Mask m = below; m; m &= m - 1) {
            p.up_[std::countr_zero(m)] |= above;
        }
        for (Mask m = above; m; m &= m - 1) {
            p.down_[std::countr_zero(m)] |= below;
        }
        return p;
    }

    /// Reverses every relation.
    Poset dual() const {
        Poset p = *this;
        p.up_.swap(p.down_);
        return p;
    }

    /// Appends m elements unrelated to everything.
    Poset with_isolated(std::size_t m) const {
        if (n_ + m > kMaxElements) {
            throw DomainError("adding " + std::to_string(m) + " isolated elements exceeds 16");
        }
        Poset p = *this;
        for (std::size_t i = n_; i < n_ + m; ++i) {
            p.up_[i] = bit(i);
            p.down_[i] = bit(i);
        }
        p.n_ = static_cast<std::uint8_t>(n_ + m);
        return p;
    }

    /// Number of elements related to at least one other element.
    std::size_t touched_count() const {
        std::size_t t = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            t += (up_[i] | down_[i]) != bit(i);
        }
        return t;
    }

    bool is_linear() const {
        for (std::size_t i = 0; i < n_; ++i) {
            if ((up_[i] | down_[i]) != all()) {
                return false;
            }
        }
        return true;
    }

    /// Number of unordered incomparable pairs.
    std::size_t unrelated_pairs() const {
        std::size_t t = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            t += static_cast<std::size_t>(popcount(static_cast<Mask>(all() & ~(up_[i] | down_[i]))));
        }
        return t / 2;
    }

    /// Elements with no strict predecessor inside `within`.
    Mask minimal_in(Mask within) const {
        Mask r = 0;
        for (Mask m = within; m; m &= m - 1) {
            const auto i = static_cast<std::size_t>(std::countr_zero(m));
            if ((strict_down(i) & within) == 0) {
                r |= bit(i);
            }
        }
        return r;
    }

    /// Cover pairs (j, k): u_j < u_k with nothing strictly between. Calls f(j, k).
    template <typename F>
    void for_each_cover(F&& f) const {
        for (std::size_t j = 0; j < n_; ++j) {
            const Mask above = strict_up(j);
            for (Mask m = above; m; m &= m - 1) {
                const auto k = static_cast<std::size_t>(std::countr_zero(m));
                if ((above & strict_down(k)) == 0) {
                    f(j, k);
                }
            }
        }
    }

    /// Checks reflexivity, antisymmetry, transitivity and that `down` mirrors `up`.
    bool is_valid_order() const {
        if (n_ < 1 || n_ > kMaxElements) {
            return false;
        }
        for (std::size_t i = 0; i < kMaxElements; ++i) {
            if (i >= n_) {
                if (up_[i] != 0 || down_[i] != 0) {
                    return false;
                }
                continue;
            }
            if ((up_[i] & ~all()) != 0 || !less_equal(i, i)) {
                return false;
            }
            for (std::size_t k = 0; k < n_; ++k) {
                if (less_equal(i, k) != static_cast<bool>((down_[k] >> i) & 1u)) {
                    return false;
                }
                if (i != k && less_equal(i, k) && less_equal(k, i)) {
                    return false;
                }
                if (less_equal(i, k) && (up_[k] & ~up_[i]) != 0) {
                    return false;
                }
            }
        }
        return true;
    }

    friend bool operator==(const Poset& a, const Poset& b) { return a.n_ == b.n_ && a.up_ == b.up_; }

private:
    void check_index(std::size_t i) const {
        if (i >= n_) {
            throw DomainError("element index " + std::to_string(i) + " out of range for n=" + std::to_string(n_));
        }
    }

    void rebuild_down() {
        down_.fill(0);
        for (std::size_t j = 0; j < n_; ++j) {
            for (Mask m = up_[j]; m; m &= m - 1) {
                down_[std::countr_zero(m)] |= bit(j);
            }
        }
    }

    std::uint8_t n_ = 0;
    std::array<Mask, kMaxElements> up_{};
    std::array<Mask, kMaxElements> down_{};
};

// Free-function spellings of the poset algebra.

inline Poset new_antichain(std::size_t n) { return Poset::antichain(n); }
inline Poset add_relation(const Poset& p, std::size_t j, std::size_t k) { return p.with_relation(j, k); }
inline Poset dual(const Poset& p) { return p.dual(); }
inline Poset add_isolated(const Poset& p, std::size_t m) { return p.with_isolated(m); }
inline std::size_t touched_count(const Poset& p) { return p.touched_count(); }
inline bool is_linear(const Poset& p) { return p.is_linear(); }

}  // namespace sortbound
