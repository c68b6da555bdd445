// sortbound: command-line front end for the sorting-bound search library.
//
// Exit codes: 0 success, 1 unmet --expect or failed verification, 2 usage or I/O error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "sortbound/sortbound.hpp"

namespace {

using nlohmann::json;
using namespace sortbound;

constexpr int kExitOk = 0;
constexpr int kExitUnmet = 1;
constexpr int kExitUsage = 2;

// Searches at or above this size run for minutes to days.
constexpr std::size_t kLongRunningN = 11;

int cmd_count(const std::string& file, bool pairs, bool as_json) {
    const Poset p = load_poset_file(file);
    const PairTable t = count_all_pairs(p);
    if (as_json) {
        json out{{"n", p.size()}, {"e", t.e}};
        if (pairs) {
            json rows = json::array();
            for (std::size_t j = 0; j < p.size(); ++j) {
                json row = json::array();
                for (std::size_t k = 0; k < p.size(); ++k) {
                    row.push_back(j == k ? json(nullptr) : json(t.t[j][k]));
                }
                rows.push_back(row);
            }
            out["t"] = rows;
        }
        std::cout << out.dump(2) << '\n';
        return kExitOk;
    }
    std::cout << "e = " << t.e << '\n';
    if (pairs) {
        std::cout << "t[j,k] = extensions with u_j before u_k (row j, column k)\n";
        for (std::size_t j = 0; j < p.size(); ++j) {
            for (std::size_t k = 0; k < p.size(); ++k) {
                std::cout << (k ? " " : "") << std::setw(8);
                if (j == k) {
                    std::cout << "-";
                } else {
                    std::cout << t.t[j][k];
                }
            }
            std::cout << '\n';
        }
    }
    return kExitOk;
}

struct DecideArgs {
    std::size_t n = 0;
    std::size_t budget = 0;
    std::vector<std::size_t> touch;
    std::size_t workers = 1;
    std::size_t mem_budget = std::size_t{2} << 30;
    std::string checkpoint_dir;
    bool resume = false;
    bool yes_long = false;
    bool no_cache = false;
    bool verbose = false;
    std::string expect;
};

int cmd_decide(const DecideArgs& a, bool as_json) {
    if (a.n >= kLongRunningN && !a.yes_long) {
        std::cerr << "decide " << a.n << " " << a.budget << " is a long-running search; pass --yes-long to start it\n";
        return kExitUsage;
    }
    SearchOptions opts;
    opts.workers = a.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : a.workers;
    opts.mem_budget = a.mem_budget;
    opts.use_cache = !a.no_cache;
    opts.resume = a.resume;
    if (!a.checkpoint_dir.empty()) {
        opts.checkpoint_dir = a.checkpoint_dir;
    } else if (a.resume) {
        std::cerr << "--resume needs --checkpoint-dir (or SORTBOUND_CHECKPOINT_DIR)\n";
        return kExitUsage;
    }
    if (!a.touch.empty()) {
        opts.touch = TouchBound{a.touch[0], a.touch[1], a.touch[2]};
    }
    if (a.verbose) {
        opts.log = [](const std::string& msg) { std::cerr << msg << '\n'; };
    }
    const SearchVerdict v = decide(a.n, a.budget, opts);

    if (as_json) {
        json out{{"n", v.n},
                 {"budget", v.budget},
                 {"verdict", to_string(v.outcome)},
                 {"phase", to_string(v.phase)},
                 {"first_empty", v.first_empty ? json(*v.first_empty) : json(nullptr)},
                 {"forward_sizes", v.per_level},
                 {"backward_sizes", v.backward_sizes}};
        if (opts.touch) {
            out["touch"] = {{"step", opts.touch->step}, {"lo", opts.touch->lo}, {"hi", opts.touch->hi}};
        }
        std::cout << out.dump(2) << '\n';
    } else {
        std::cout << "n = " << v.n << ", C = " << v.budget << '\n';
        std::cout << "verdict: " << to_string(v.outcome) << '\n';
        std::cout << "phase: " << to_string(v.phase) << '\n';
        std::cout << "first_empty: " << (v.first_empty ? std::to_string(*v.first_empty) : "none") << '\n';
        std::cout << "forward_sizes:";
        for (auto s : v.per_level) {
            std::cout << ' ' << s;
        }
        std::cout << "\nbackward_sizes:";
        for (auto s : v.backward_sizes) {
            std::cout << ' ' << s;
        }
        std::cout << '\n';
    }
    if (a.expect.empty()) {
        return kExitOk;
    }
    const bool want = a.expect == "sortable";
    return v.sortable() == want ? kExitOk : kExitUnmet;
}

int cmd_bounds(std::size_t max_n, bool as_json) {
    json rows = json::array();
    if (!as_json) {
        std::cout << std::left << std::setw(4) << "n" << std::setw(6) << "C(n)" << std::setw(6) << "F(n)" << std::setw(6)
                  << "S(n)" << "note\n";
    }
    for (std::size_t n = 1; n <= max_n; ++n) {
        const BoundsRow r = bounds_row(n);
        if (as_json) {
            rows.push_back(json{{"n", r.n},
                            {"C", r.lower},
                            {"F", r.fja},
                            {"S", r.known ? json(*r.known) : json(nullptr)},
                            {"note", r.note}});
        } else {
            std::cout << std::left << std::setw(4) << r.n << std::setw(6) << r.lower << std::setw(6) << r.fja << std::setw(6)
                      << (r.known ? std::to_string(*r.known) : "?") << r.note << '\n';
        }
    }
    if (as_json) {
        std::cout << json{{"rows", rows}}.dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_verify(const std::string& data_dir, bool as_json) {
    const auto checks = relations_between_fixtures(data_dir.empty() ? default_data_dir() : std::filesystem::path(data_dir));
    bool all = true;
    json list = json::array();
    for (const auto& c : checks) {
        all = all && c.passed;
        if (as_json) {
            list.push_back(json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        } else {
            std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
        }
    }
    if (as_json) {
        std::cout << json{{"passed", all}, {"checks", list}}.dump(2) << '\n';
    } else {
        std::cout << (all ? "all identities hold\n" : "fixture defect detected\n");
    }
    return all ? kExitOk : kExitUnmet;
}

int cmd_export_dot(const std::string& what, const std::string& data_dir, bool as_json) {
    const auto& names = fixture_names();
    std::string name = "poset";
    Poset p = Poset::antichain(1);
    if (std::find(names.begin(), names.end(), what) != names.end()) {
        const NamedFixture f = load_fixture(what, data_dir.empty() ? default_data_dir() : std::filesystem::path(data_dir));
        name = f.name;
        p = f.poset;
    } else {
        p = load_poset_file(what);
    }
    if (as_json) {
        json covers = json::array();
        p.for_each_cover([&](std::size_t j, std::size_t k) { covers.push_back({j, k}); });
        std::cout << json{{"name", name}, {"n", p.size()}, {"covers", covers}, {"dot", render_dot(p, name)}}.dump(2)
                  << '\n';
    } else {
        std::cout << render_dot(p, name);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decide comparison-sorting bounds by exhaustive poset search"};
    app.require_subcommand(1);
    app.footer(
        "Environment:\n"
        "  SORTBOUND_CHECKPOINT_DIR  default for decide --checkpoint-dir\n"
        "  SORTBOUND_WORKERS         default for decide --workers\n"
        "  SORTBOUND_DATA_DIR        directory holding fixtures/\n");

    bool as_json = false;

    auto* count = app.add_subcommand("count", "Count linear extensions of a poset file");
    std::string count_file;
    bool pairs = false;
    count->add_option("poset-file", count_file, "Poset text file")->required()->check(CLI::ExistingFile);
    count->add_flag("--pairs", pairs, "Also print t[j,k] for every pair");
    count->add_flag("--json", as_json, "Machine-readable output");

    auto* dec = app.add_subcommand("decide", "Decide whether n elements sort in C comparisons");
    DecideArgs da;
    dec->add_option("n", da.n, "Number of elements")->required()->check(CLI::Range(1, 16));
    dec->add_option("C", da.budget, "Comparison budget")->required()->check(CLI::Range(0, 63));
    dec->add_option("--touch", da.touch, "Keep only posets touching lo..hi elements after step k")
        ->expected(3)
        ->type_name("K LO HI");
    dec->add_option("--workers", da.workers, "Worker threads (0 = all cores)")->envname("SORTBOUND_WORKERS");
    dec->add_option("--mem-budget", da.mem_budget, "Bytes of keys held in memory per step before spilling");
    dec->add_option("--checkpoint-dir", da.checkpoint_dir, "Write every level here")->envname("SORTBOUND_CHECKPOINT_DIR");
    dec->add_flag("--resume", da.resume, "Reuse levels already present in the checkpoint directory");
    dec->add_flag("--yes-long", da.yes_long, "Allow searches expected to run for a long time");
    dec->add_flag("--no-cache", da.no_cache, "Disable the sortability cache");
    dec->add_flag("-v,--verbose", da.verbose, "Log per-level progress to stderr");
    dec->add_option("--expect", da.expect, "Exit 1 unless the verdict matches")
        ->check(CLI::IsMember({"sortable", "not-sortable"}));
    dec->add_flag("--json", as_json, "Machine-readable output");

    auto* bounds = app.add_subcommand("bounds", "Print C(n), F(n) and known S(n)");
    std::size_t max_n = kMaxBoundsN;
    bounds->add_option("--max-n", max_n, "Largest n to print")->check(CLI::Range(1, 22));
    bounds->add_flag("--json", as_json, "Machine-readable output");

    auto* verify = app.add_subcommand("verify-fixtures", "Check the named fixtures and the identities between them");
    std::string data_dir;
    verify->add_option("--data-dir", data_dir, "Directory containing fixtures/")->envname("SORTBOUND_DATA_DIR");
    verify->add_flag("--json", as_json, "Machine-readable output");

    auto* dot = app.add_subcommand("export-dot", "Print the Hasse diagram of a poset file or fixture in DOT");
    std::string dot_what;
    dot->add_option("poset", dot_what, "Poset file or fixture name")->required();
    dot->add_option("--data-dir", data_dir, "Directory containing fixtures/")->envname("SORTBOUND_DATA_DIR");
    dot->add_flag("--json", as_json, "Covers and DOT text as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (!da.touch.empty() && (da.touch[1] > da.touch[2] || da.touch[2] > da.n)) {
        std::cerr << "--touch needs lo <= hi <= n\n";
        return kExitUsage;
    }

    try {
        if (*count) {
            return cmd_count(count_file, pairs, as_json);
        }
        if (*dec) {
            return cmd_decide(da, as_json);
        }
        if (*bounds) {
            return cmd_bounds(max_n, as_json);
        }
        if (*verify) {
            return cmd_verify(data_dir, as_json);
        }
        if (*dot) {
            return cmd_export_dot(dot_what, data_dir, as_json);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
