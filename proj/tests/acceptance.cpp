// Acceptance gate: runs the fourteen-criterion checklist and exits nonzero
// if any gating criterion fails. --quick trims ensemble sizes, --threads N
// bounds worker threads (default: hardware concurrency capped at 8).

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <thread>

#include "rdm/verify.hpp"

int main(int argc, char** argv) {
    auto scale = rdm::verify::Scale::Full;
    const unsigned hw = std::thread::hardware_concurrency();
    int threads = hw == 0 ? 1 : static_cast<int>(hw > 8 ? 8 : hw);
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) {
            scale = rdm::verify::Scale::Quick;
        } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
            threads = std::atoi(argv[++i]);
            if (threads < 1) threads = 1;
        } else {
            std::fprintf(stderr, "usage: %s [--quick] [--threads N]\n", argv[0]);
            return 1;
        }
    }
    const auto suite = rdm::verify::run_all(scale, threads);
    const int failures = rdm::verify::print_suite(suite, stdout);
    return failures == 0 ? 0 : 1;
}
