// Runs the acceptance criteria and prints one PASS/FAIL line per criterion,
// followed by its check rows. With an argument, runs only that criterion.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <vector>

#include "hestonlaw/validation.hpp"

int main(int argc, char** argv) {
    std::vector<int> ids;
    if (argc > 1) {
        for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    } else {
        for (int i = 1; i <= 8; ++i) ids.push_back(i);
    }
    bool all = true;
    for (int id : ids) {
        try {
            const auto r = hestonlaw::run_criterion(id);
            std::printf("[%s] criterion %d: %s (%.2f s, limit %.0f s)\n", r.pass() ? "PASS" : "FAIL", r.id,
                        r.title.c_str(), r.seconds, r.limit_seconds);
            for (const auto& row : r.rows)
                std::printf("    %s %-58s measured %-12.6g tolerance %-10.3g %s\n", row.pass ? "ok  " : "FAIL",
                            row.name.c_str(), row.measured, row.tolerance, row.note.c_str());
            all = all && r.pass();
        } catch (const std::exception& e) {
            std::printf("[FAIL] criterion %d: exception: %s\n", id, e.what());
            all = false;
        }
    }
    return all ? 0 : 1;
}
