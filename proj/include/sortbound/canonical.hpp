#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <vector>

#include "sortbound/poset.hpp"

namespace sortbound {

/// Labeling-invariant encoding of a poset: the relation matrix of the poset
/// under its canonical labeling. Ordering is byte order of the serialized
/// form (n, then the 16 rows big-endian).
struct CanonicalCode {
    std::uint8_t n = 0;
    std::array<Mask, kMaxElements> rows{};

    static constexpr std::size_t kBytes = 1 + 2 * kMaxElements;

    /// The poset this code describes, labeled canonically.
    Poset decode() const { return Poset::from_rows(n, rows); }

    void to_bytes(std::uint8_t* out) const {
        out[0] = n;
        for (std::size_t i = 0; i < kMaxElements; ++i) {
            out[1 + 2 * i] = static_cast<std::uint8_t>(rows[i] >> 8);
            out[2 + 2 * i] = static_cast<std::uint8_t>(rows[i] & 0xFF);
        }
    }

    static CanonicalCode from_bytes(const std::uint8_t* in) {
        CanonicalCode c;
        c.n = in[0];
        for (std::size_t i = 0; i < kMaxElements; ++i) {
            c.rows[i] = static_cast<Mask>((in[1 + 2 * i] << 8) | in[2 + 2 * i]);
        }
        return c;
    }

    friend auto operator<=>(const CanonicalCode&, const CanonicalCode&) = default;
    friend bool operator==(const CanonicalCode&, const CanonicalCode&) = default;
};

struct CanonicalCodeHash {
    std::size_t operator()(const CanonicalCode& c) const noexcept {
        std::array<std::uint64_t, 4> w{};
        std::memcpy(w.data(), c.rows.data(), sizeof(w));
        std::uint64_t h = 0x9E3779B97F4A7C15ull ^ c.n;
        for (std::uint64_t x : w) {
            h ^= x + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
            h *= 0xBF58476D1CE4E5B9ull;
            h ^= h >> 31;
        }
        return static_cast<std::size_t>(h);
    }
};

namespace detail {

// Ordered partition of a vertex subset; cells are bitmasks in order.
struct Partition {
    std::array<Mask, kMaxElements> cell{};
    std::size_t count = 0;

    bool discrete() const {
        for (std::size_t i = 0; i < count; ++i) {
            if (std::popcount(cell[i]) > 1) {
                return false;
            }
        }
        return true;
    }
};

// Splits cells by the number of strict predecessors and successors each
// member has inside a splitter cell, until the partition is equitable.
// Subcells are ordered by that count, so the result depends only on structure.
// Only cells flagged in `dirty` (indexed like `part.cell`) are used as splitters
// initially; the rest of the partition must already be equitable against them.
inline void refine(const Poset& p, Partition& part, std::array<bool, kMaxElements> dirty) {
    for (;;) {
        std::size_t w = 0;
        while (w < part.count && !dirty[w]) {
            ++w;
        }
        if (w == part.count) {
            return;
        }
        dirty[w] = false;
        const Mask splitter = part.cell[w];
        Partition next;
        std::array<bool, kMaxElements> next_dirty{};
        for (std::size_t c = 0; c < part.count; ++c) {
            const Mask cell = part.cell[c];
            if ((cell & (cell - 1)) == 0) {
                next_dirty[next.count] = dirty[c];
                next.cell[next.count++] = cell;
                continue;
            }
            std::array<std::pair<int, int>, kMaxElements> keyed{};
            std::size_t members = 0;
            bool uniform = true;
            for (Mask m = cell; m; m &= m - 1) {
                const int v = std::countr_zero(m);
                const int key = popcount(static_cast<Mask>(p.strict_down(v) & splitter)) * 17 +
                                popcount(static_cast<Mask>(p.strict_up(v) & splitter));
                uniform = uniform && (members == 0 || key == keyed[0].first);
                // insertion sort; cells are tiny
                std::size_t at = members++;
                while (at > 0 && keyed[at - 1].first > key) {
                    keyed[at] = keyed[at - 1];
                    --at;
                }
                keyed[at] = {key, v};
            }
            if (uniform) {
                next_dirty[next.count] = dirty[c];
                next.cell[next.count++] = cell;
                continue;
            }
            Mask current = 0;
            int current_key = keyed[0].first;
            for (std::size_t i = 0; i < members; ++i) {
                if (keyed[i].first != current_key) {
                    next_dirty[next.count] = true;
                    next.cell[next.count++] = current;
                    current = 0;
                    current_key = keyed[i].first;
                }
                current |= bit(static_cast<std::size_t>(keyed[i].second));
            }
            next_dirty[next.count] = true;
            next.cell[next.count++] = current;
        }
        part = next;
        dirty = next_dirty;
    }
}

struct Labeling {
    std::array<std::uint8_t, kMaxElements> order{};  // position -> vertex
    std::array<Mask, kMaxElements> matrix{};         // relation matrix under `order`
    std::size_t size = 0;
};

inline void relabeled_matrix(const Poset& p, const Partition& part, Labeling& out) {
    std::array<std::uint8_t, kMaxElements> pos{};
    out.size = part.count;
    for (std::size_t i = 0; i < part.count; ++i) {
        const auto v = static_cast<std::uint8_t>(std::countr_zero(part.cell[i]));
        out.order[i] = v;
        pos[v] = static_cast<std::uint8_t>(i);
    }
    for (std::size_t i = 0; i < part.count; ++i) {
        Mask row = 0;
        for (Mask m = p.up(out.order[i]); m; m &= m - 1) {
            row |= bit(pos[std::countr_zero(m)]);
        }
        out.matrix[i] = row;
    }
}

class ComponentCanonizer {
public:
    explicit ComponentCanonizer(const Poset& p) : p_(p) {}

    Labeling run(Mask component) {
        found_ = false;
        Partition part;
        part.cell[0] = component;
        part.count = 1;
        std::array<bool, kMaxElements> dirty{};
        dirty[0] = true;
        search(part, dirty);
        return best_;
    }

private:
    bool twins(int a, int b) const {
        return p_.strict_down(a) == p_.strict_down(b) && p_.strict_up(a) == p_.strict_up(b);
    }

    void search(Partition part, const std::array<bool, kMaxElements>& dirty) {
        refine(p_, part, dirty);
        if (part.discrete()) {
            Labeling leaf;
            relabeled_matrix(p_, part, leaf);
            if (!found_ || std::lexicographical_compare(leaf.matrix.begin(), leaf.matrix.begin() + leaf.size,
                                                        best_.matrix.begin(), best_.matrix.begin() + best_.size)) {
                best_ = leaf;
                found_ = true;
            }
            return;
        }
        std::size_t target = 0;
        while (std::popcount(part.cell[target]) == 1) {
            ++target;
        }
        const Mask cell = part.cell[target];
        Mask tried = 0;
        for (Mask m = cell; m; m &= m - 1) {
            const int v = std::countr_zero(m);
            bool skip = false;
            // twins are exchanged by an automorphism fixing everything else
            for (Mask t = tried; t; t &= t - 1) {
                if (twins(v, std::countr_zero(t))) {
                    skip = true;
                    break;
                }
            }
            if (skip) {
                continue;
            }
            tried |= bit(static_cast<std::size_t>(v));
            Partition child;
            std::array<bool, kMaxElements> child_dirty{};
            for (std::size_t i = 0; i < part.count; ++i) {
                if (i == target) {
                    child_dirty[child.count] = true;
                    child.cell[child.count++] = bit(static_cast<std::size_t>(v));
                    child.cell[child.count++] = static_cast<Mask>(cell & ~bit(static_cast<std::size_t>(v)));
                } else {
                    child.cell[child.count++] = part.cell[i];
                }
            }
            search(child, child_dirty);
        }
    }

    const Poset& p_;
    Labeling best_{};
    bool found_ = false;
};

// Connected components of the comparability graph, in ascending order of lowest element.
inline std::vector<Mask> comparability_components(const Poset& p) {
    std::vector<Mask> out;
    Mask remaining = p.all();
    while (remaining) {
        Mask comp = bit(static_cast<std::size_t>(std::countr_zero(remaining)));
        Mask frontier = comp;
        while (frontier) {
            Mask grown = 0;
            for (Mask m = frontier; m; m &= m - 1) {
                const int v = std::countr_zero(m);
                grown |= p.up(v) | p.down(v);
            }
            frontier = static_cast<Mask>(grown & ~comp);
            comp |= grown;
        }
        out.push_back(comp);
        remaining &= static_cast<Mask>(~comp);
    }
    return out;
}

}  // namespace detail

/// Canonical labeling of `p`: position -> original element index.
///
/// Components of the comparability graph are canonized independently by
/// partition refinement and individualization, keeping the lexicographically
/// smallest relation matrix; they are then concatenated largest first, ties
/// broken by component matrix.
inline std::array<std::uint8_t, kMaxElements> canonical_labeling(const Poset& p) {
    struct Piece {
        detail::Labeling lab;
        bool operator<(const Piece& o) const {
            if (lab.size != o.lab.size) {
                return lab.size > o.lab.size;
            }
            return std::lexicographical_compare(lab.matrix.begin(), lab.matrix.begin() + lab.size, o.lab.matrix.begin(),
                                                o.lab.matrix.begin() + o.lab.size);
        }
    };
    std::vector<Piece> pieces;
    for (Mask comp : detail::comparability_components(p)) {
        if (std::popcount(comp) == 1) {
            Piece piece;
            piece.lab.size = 1;
            piece.lab.order[0] = static_cast<std::uint8_t>(std::countr_zero(comp));
            piece.lab.matrix[0] = 1;
            pieces.push_back(piece);
            continue;
        }
        detail::ComponentCanonizer canon(p);
        pieces.push_back({canon.run(comp)});
    }
    std::stable_sort(pieces.begin(), pieces.end());
    std::array<std::uint8_t, kMaxElements> order{};
    std::size_t at = 0;
    for (const Piece& piece : pieces) {
        for (std::size_t i = 0; i < piece.lab.size; ++i) {
            order[at++] = piece.lab.order[i];
        }
    }
    return order;
}

/// Relabels `p` so that position i holds original element order[i].
inline Poset relabel(const Poset& p, const std::array<std::uint8_t, kMaxElements>& order) {
    const std::size_t n = p.size();
    std::array<std::uint8_t, kMaxElements> pos{};
    for (std::size_t i = 0; i < n; ++i) {
        pos[order[i]] = static_cast<std::uint8_t>(i);
    }
    std::array<Mask, kMaxElements> rows{};
    for (std::size_t i = 0; i < n; ++i) {
        Mask row = 0;
        for (Mask m = p.up(order[i]); m; m &= m - 1) {
            row |= bit(pos[std::countr_zero(m)]);
        }
        rows[i] = row;
    }
    return Poset::from_rows(n, rows);
}

/// Equal for two posets iff they are isomorphic.
inline CanonicalCode canonical_code(const Poset& p) {
    const Poset c = relabel(p, canonical_labeling(p));
    CanonicalCode code;
    code.n = static_cast<std::uint8_t>(p.size());
    code.rows = c.rows();
    return code;
}

/// Identifies a poset with every poset isomorphic to it or to its dual.
inline CanonicalCode dedup_key(const Poset& p) { return std::min(canonical_code(p), canonical_code(p.dual())); }

}  // namespace sortbound

template <>
struct std::hash<sortbound::CanonicalCode> : sortbound::CanonicalCodeHash {};
