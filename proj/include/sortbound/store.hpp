#pragma once

#include <cstdlib>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sortbound/canonical.hpp"
#include "sortbound/error.hpp"
#include "sortbound/linext.hpp"
#include "sortbound/poset.hpp"

#ifndef SORTBOUND_DATA_DIR
#define SORTBOUND_DATA_DIR "data"
#endif

namespace sortbound {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline bool parse_index(std::string_view s, std::size_t& out) {
    s = trim(s);
    if (s.empty() || s.size() > 3) {
        return false;
    }
    std::size_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') {
            return false;
        }
        v = v * 10 + static_cast<std::size_t>(c - '0');
    }
    out = v;
    return true;
}

}  // namespace detail

/// Reads the poset text format:
///
///     # comment
///     n=4
///     0 < 2
///     1 < 2
///
/// Pairs may be covers or implied relations; the transitive closure is taken.
inline Poset parse_poset(std::string_view text) {
    std::optional<Poset> p;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        if (!p) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos || detail::trim(line.substr(0, eq)) != "n") {
                throw ParseError(line_no, "expected header 'n=<count>'");
            }
            std::size_t n = 0;
            if (!detail::parse_index(line.substr(eq + 1), n)) {
                throw ParseError(line_no, "bad element count");
            }
            if (n < 1 || n > kMaxElements) {
                throw ParseError(line_no, "element count " + std::to_string(n) + " out of range 1..16");
            }
            p = Poset::antichain(n);
            continue;
        }
        const auto lt = line.find('<');
        std::size_t j = 0, k = 0;
        if (lt == std::string_view::npos || !detail::parse_index(line.substr(0, lt), j) ||
            !detail::parse_index(line.substr(lt + 1), k)) {
            throw ParseError(line_no, "expected 'j < k', got '" + std::string(line) + "'");
        }
        if (j >= p->size() || k >= p->size()) {
            throw ParseError(line_no, "element index out of range");
        }
        if (j == k) {
            throw ParseError(line_no, "element related to itself");
        }
        if (p->less_equal(k, j)) {
            throw ParseError(line_no, "contradiction: " + std::to_string(j) + " < " + std::to_string(k) +
                                          " conflicts with " + std::to_string(k) + " <= " + std::to_string(j));
        }
        *p = p->with_relation(j, k);
        if (end == text.size()) {
            break;
        }
    }
    if (!p) {
        throw ParseError(line_no, "missing header 'n=<count>'");
    }
    return *p;
}

/// Header line plus one line per cover relation.
inline std::string render_poset(const Poset& p) {
    std::ostringstream out;
    out << "n=" << p.size() << '\n';
    p.for_each_cover([&](std::size_t j, std::size_t k) { out << j << " < " << k << '\n'; });
    return out.str();
}

/// Hasse diagram in Graphviz DOT; edges point from lower to higher element.
inline std::string render_dot(const Poset& p, std::string_view name = "poset") {
    std::ostringstream out;
    out << "digraph " << name << " {\n  rankdir=BT;\n  node [shape=circle];\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
        out << "  u" << i << ";\n";
    }
    p.for_each_cover([&](std::size_t j, std::size_t k) { out << "  u" << j << " -> u" << k << ";\n"; });
    out << "}\n";
    return out.str();
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Poset load_poset_file(const std::filesystem::path& path) { return parse_poset(read_file(path)); }

// ---------------------------------------------------------------------------
// Named fixtures

struct NamedFixture {
    std::string name;
    Poset poset;
    Count expected_e = 0;
    std::string source;
};

inline const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names{"P16", "P15a", "Q16a", "P15b", "Q16b"};
    return names;
}

/// $SORTBOUND_DATA_DIR, else the directory baked in at build time.
inline std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("SORTBOUND_DATA_DIR"); env && *env) {
        return env;
    }
    return SORTBOUND_DATA_DIR;
}

/// Loads `<dir>/fixtures/<name>.poset`. Metadata comes from `# expected_e: N`
/// and `# source: ...` comment lines.
inline NamedFixture load_fixture(const std::string& name, const std::filesystem::path& data_dir = default_data_dir()) {
    bool known = false;
    for (const auto& n : fixture_names()) {
        known = known || n == name;
    }
    if (!known) {
        throw DomainError("unknown fixture '" + name + "'");
    }
    const std::string text = read_file(data_dir / "fixtures" / (name + ".poset"));
    NamedFixture f;
    f.name = name;
    f.poset = parse_poset(text);
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const auto body = detail::trim(line);
        if (body.rfind("# expected_e:", 0) == 0) {
            f.expected_e = std::stoull(std::string(body.substr(13)));
        } else if (body.rfind("# source:", 0) == 0) {
            f.source = std::string(detail::trim(body.substr(9)));
        }
    }
    return f;
}

struct IdentityCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Checks each fixture's stated count and the arithmetic and isomorphism
/// relations tying the five fixtures together.
inline std::vector<IdentityCheck> relations_between_fixtures(const std::filesystem::path& data_dir = default_data_dir()) {
    std::vector<IdentityCheck> out;
    std::map<std::string, NamedFixture> fx;
    std::map<std::string, Count> e;
    for (const auto& name : fixture_names()) {
        fx[name] = load_fixture(name, data_dir);
        e[name] = count_linext(fx[name].poset);
        out.push_back({"e(" + name + ") = " + std::to_string(fx[name].expected_e), e[name] == fx[name].expected_e,
                       "counted " + std::to_string(e[name])});
    }
    auto sum_check = [&](const std::string& whole, const std::string& a, const std::string& b) {
        out.push_back({"e(" + whole + ") = e(" + a + ") + e(" + b + ")", e[whole] == e[a] + e[b],
                       std::to_string(e[whole]) + " vs " + std::to_string(e[a]) + " + " + std::to_string(e[b])});
    };
    sum_check("P15a", "P16", "Q16a");
    sum_check("P15b", "P16", "Q16b");
    auto iso_check = [&](const std::string& from, std::size_t j, std::size_t k, const std::string& to) {
        const std::string label = from + " + u" + std::to_string(j) + "<u" + std::to_string(k) + " ~ " + to;
        try {
            const Poset q = fx[from].poset.with_relation(j, k);
            const bool ok = canonical_code(q) == canonical_code(fx[to].poset);
            out.push_back({label, ok, ok ? "isomorphic" : "not isomorphic"});
        } catch (const std::exception& ex) {
            out.push_back({label, false, ex.what()});
        }
    };
    iso_check("P15a", 10, 0, "P16");
    iso_check("P15a", 0, 10, "Q16a");
    iso_check("P15b", 0, 6, "P16");
    iso_check("P15b", 6, 0, "Q16b");
    return out;
}

}  // namespace sortbound
