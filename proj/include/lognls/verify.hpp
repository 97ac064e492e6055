// The acceptance suite behind `lognls verify`: every criterion with its
// pinned tolerance, one pass/fail line each.
#pragma once

#include <string>
#include <vector>

namespace lognls::verify {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
};

/// Runs all criteria; scenario outputs land under out_dir.
std::vector<CriterionResult> run_all(const std::string& out_dir);

/// Prints one line per criterion plus a summary; returns the process exit
/// code (0 all pass, 1 otherwise).
int report(const std::vector<CriterionResult>& results);

} // namespace lognls::verify
