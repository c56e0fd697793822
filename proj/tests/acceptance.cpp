#include <filesystem>
#include <iostream>

#include "slowmotion/acceptance.hpp"

int main(int argc, char** argv) {
    const std::filesystem::path out = argc > 1 ? argv[1] : "acceptance_output";
    const auto results = slowmotion::acceptance::run_all(out, std::cout);
    int failed = 0;
    for (const auto& r : results) failed += r.pass ? 0 : 1;
    std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
    return failed ? 1 : 0;
}
