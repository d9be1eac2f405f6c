#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lifespan/exponents.hpp"
#include "lifespan/ode_chain.hpp"
#include "lifespan/pde_sim.hpp"

namespace lifespan {

// Amplitude sweep: the base data is scaled by eps over a log grid spanning
// at least two decades with at least six points (enforced), one simulation
// per grid point, each paired with its analytic upper bound.
struct CampaignConfig {
    SystemParams params;
    InitialData base_data;
    double eps_min = 0.1;
    double eps_max = 10.0;
    int eps_points = 7;
    SimConfig sim;
    double horizon_cap = 1e9;      // never integrate past this
    double horizon_global = 100.0; // horizon when no upper bound exists
    double bound_margin = 1.05;    // per-run horizon = bound_margin * T0
    double slope_tol = 0.3;
    double dominance_slack = 0.05;
    double lambda_factor = 2.0;
    std::optional<double> expected_slope;  // overrides the theoretical value
    int jobs = 0;                          // 0 = hardware concurrency
    unsigned long long seed = 0;           // recorded; campaigns are deterministic
};

struct RunRecord {
    double eps = 0.0;
    std::string status;  // "blowup", "global", or "error: ..."
    double T_num = 0.0;
    double T0 = 0.0;
    double R0 = 0.0;
    double achieved_max = 0.0;
    bool dominance_ok = false;   // T_num <= T0 (1 + slack)
    bool inequality_ok = false;  // traced differential inequality held
};

struct LifespanReport {
    std::vector<RunRecord> runs;
    bool has_fit = false;
    double fitted_slope = 0.0;
    double slope_halfwidth = 0.0;
    double expected_slope = 0.0;
    double slope_tol = 0.3;
    double dominance_slack = 0.05;
    unsigned long long seed = 0;
    bool campaign_failed = false;  // more than 20% of runs errored
    int error_count = 0;
};

LifespanReport run_campaign(const CampaignConfig& cfg);

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

// Two-sided check: fitted slope against the predicted exponent and per-run
// dominance of the analytic bound. Appends a one-page text verdict to page.
Verdict reconcile(const LifespanReport& report, std::string& page);

// CSV round-trip (meta in '#key=value' comment lines, one row per run).
std::string report_to_csv(const LifespanReport& report);
LifespanReport report_from_csv(const std::string& text);

}  // namespace lifespan
