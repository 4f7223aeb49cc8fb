// Runs the numbered verification checks and prints one PASS/FAIL line per
// measurement plus an aggregate line per check. Exit code 0 only when every
// requested measurement landed inside its band.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "elsh/verify.hpp"

int main(int argc, char** argv) {
    std::uint64_t seed = 7;
    std::vector<int> checks;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        const auto need_value = [&](const char* flag) -> const char* {
            if (i + 1 >= argc) {
                std::cerr << flag << " needs a value\n";
                std::exit(2);
            }
            return argv[++i];
        };
        if (arg == "--check") {
            checks.push_back(std::atoi(need_value("--check")));
        } else if (arg == "--seed") {
            seed = std::strtoull(need_value("--seed"), nullptr, 10);
        } else if (arg == "--help" || arg == "-h") {
            std::cout << "usage: acceptance_checks [--check N]... [--seed S]\n"
                         "Runs the numbered verification checks (default: all 12).\n";
            return 0;
        } else {
            std::cerr << "unknown argument: " << arg << "\n";
            return 2;
        }
    }

    std::vector<elsh::CheckResult> results;
    try {
        if (checks.empty()) {
            results = elsh::verify_all(seed);
        } else {
            for (int n : checks) {
                auto part = elsh::run_check(n, seed);
                results.insert(results.end(), std::make_move_iterator(part.begin()),
                               std::make_move_iterator(part.end()));
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    const bool ok = elsh::print_checks(std::cout, results);

    std::map<int, std::pair<int, int>> agg;  // number -> (passed, total)
    for (const auto& r : results) {
        agg[r.number].first += r.pass;
        agg[r.number].second += 1;
    }
    for (const auto& [num, pq] : agg) {
        std::printf("CHECK %02d: %s (%d/%d measurements)\n", num,
                    pq.first == pq.second ? "PASS" : "FAIL", pq.first, pq.second);
    }
    return ok ? 0 : 1;
}
