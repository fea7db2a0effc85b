#pragma once

#include <string>
#include <vector>

namespace recsplit {

// One named sub-check inside a criterion. `statistic` is compared against
// `threshold` in the direction the check defines; `pass` records the verdict
// so consumers never re-derive the direction.
struct CheckRecord {
    std::string check_name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
    std::vector<CheckRecord> checks;
};

// The ten-point acceptance suite. Quick mode cuts Monte Carlo replicate
// counts (statistical bands rescale with them) but runs every criterion.
std::vector<CriterionResult> run_acceptance(bool quick, unsigned threads = 0);

}  // namespace recsplit
