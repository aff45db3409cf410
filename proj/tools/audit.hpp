#pragma once

#include <string>
#include <vector>

#include "eisenlab/eisenstein.hpp"

namespace eisenlab::cli {

struct AuditRow {
    std::string check;
    std::string parameters;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

// Contour shifts, support windows, envelopes and Stirling convergence of the weight functions at T = 50.
std::vector<AuditRow> weights_audit(double alpha);

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    double alpha = 0.009;
    std::string forms_path;
    bool quick = false;  // sub-minute subset: skips the fourth-moment sweep and the Kuznetsov run
};

// Runs criterion id (1..10); tolerances and runtime limits are fixed inside.
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
// Criteria included in the quick subset.
bool in_quick_subset(int id);

}  // namespace eisenlab::cli
