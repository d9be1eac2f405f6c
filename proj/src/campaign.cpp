#include "lifespan/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "lifespan/numerics.hpp"
#include "lifespan/report_io.hpp"

namespace lifespan {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

RunRecord execute_run(const CampaignConfig& cfg, const TestFunctionSpec& tf, double eps,
                      int j0, bool supercritical) {
    RunRecord rec;
    rec.eps = eps;
    rec.T_num = kNaN;
    rec.T0 = kNaN;
    rec.R0 = kNaN;
    try {
        const InitialData data = cfg.base_data.scaled(eps);
        SimConfig sim = cfg.sim;
        double horizon = std::min(cfg.horizon_global, cfg.horizon_cap);

        std::optional<UpperBoundResult> bound;
        if (supercritical) {
            const double support = data.support_radius();
            const auto u0_j0 = [&](double r) { return data.eval(j0, r); };
            const auto U0 = [&](double R) {
                return weighted_mass_profile(u0_j0, support, tf, R, cfg.params.n);
            };
            bound = pde_upper_bound(cfg.params, tf.lambda, U0, j0, cfg.lambda_factor);
            sim.trace_radius = bound->R0;
            horizon = std::min(cfg.bound_margin * bound->T0, cfg.horizon_cap);
            rec.T0 = bound->T0;
            rec.R0 = bound->R0;
        }

        const SimReport report = run(data, cfg.params, tf, horizon, sim);
        rec.achieved_max = report.blowup.achieved_max;
        if (report.blowup.blew_up) {
            rec.status = "blowup";
            rec.T_num = report.blowup.T_num;
            if (bound) {
                rec.dominance_ok = rec.T_num <= rec.T0 * (1.0 + cfg.dominance_slack);
                rec.inequality_ok =
                    verify_ode_inequality(report, tf, bound->R0, bound->Lambda, cfg.params).ok;
            }
        } else {
            rec.status = "global";
            rec.T_num = kNaN;
        }
    } catch (const std::exception& e) {
        rec.status = std::string("error: ") + e.what();
    }
    return rec;
}

}  // namespace

LifespanReport run_campaign(const CampaignConfig& cfg) {
    cfg.params.validate();
    if (cfg.eps_points < 6)
        throw ConfigError("campaign: slope fits need at least 6 epsilon points");
    if (!(cfg.eps_min > 0) || !(cfg.eps_max / cfg.eps_min >= 100.0 * (1.0 - 1e-12)))
        throw ConfigError("campaign: epsilon grid must span at least two decades");

    const auto profile = compute_alpha(cfg.params);
    const TestFunctionSpec tf = build_psi(cfg.params.n);

    // Distinguished component: largest exponent among components that carry
    // data (ties to the smallest index).
    int j0 = -1;
    for (int j = 0; j < cfg.params.k; ++j) {
        if (cfg.base_data.amplitude_of(j) <= 0.0) continue;
        if (j0 < 0 || profile.alpha[j] > profile.alpha[j0]) j0 = j;
    }
    if (j0 < 0) throw ConfigError("campaign: all components have zero data");
    const bool supercritical = profile.alpha[j0] > Rational(cfg.params.n, 2);

    LifespanReport report;
    report.seed = cfg.seed;
    report.slope_tol = cfg.slope_tol;
    report.dominance_slack = cfg.dominance_slack;
    if (cfg.expected_slope) {
        report.expected_slope = *cfg.expected_slope;
    } else if (supercritical) {
        report.expected_slope = to_double(lifespan_exponent(profile));
    }

    std::vector<double> grid(cfg.eps_points);
    for (int i = 0; i < cfg.eps_points; ++i)
        grid[i] = cfg.eps_min *
                  std::pow(cfg.eps_max / cfg.eps_min, double(i) / (cfg.eps_points - 1));

    report.runs.resize(cfg.eps_points);
    std::atomic<int> next{0};
    int jobs = cfg.jobs > 0 ? cfg.jobs
                            : static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min<int>(jobs, cfg.eps_points));
    const auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= cfg.eps_points) return;
            report.runs[i] = execute_run(cfg, tf, grid[i], j0, supercritical);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (const auto& r : report.runs)
        if (r.status.rfind("error", 0) == 0) ++report.error_count;
    report.campaign_failed = report.error_count * 5 > cfg.eps_points;

    // Log-log slope of lifespan against amplitude; the two extreme grid
    // points carry half weight (truncation and overflow bias live there).
    std::vector<double> lx, ly, lw;
    for (const auto& r : report.runs)
        if (r.status == "blowup" && std::isfinite(r.T_num) && r.T_num > 0) {
            lx.push_back(std::log(r.eps));
            ly.push_back(std::log(r.T_num));
            lw.push_back(1.0);
        }
    if (lx.size() >= 3) {
        lw.front() = 0.5;
        lw.back() = 0.5;
        const LinearFit fit = fit_line(lx, ly, lw);
        report.fitted_slope = fit.slope;
        report.slope_halfwidth = 2.0 * fit.slope_stderr;
        report.has_fit = true;
    }
    return report;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

Verdict reconcile(const LifespanReport& report, std::string& page) {
    std::ostringstream out;
    out << "lifespan reconciliation\n";
    out << "=======================\n";

    std::vector<const RunRecord*> blowups;
    for (const auto& r : report.runs)
        if (r.status == "blowup" && std::isfinite(r.T_num)) blowups.push_back(&r);

    if (report.runs.empty() || blowups.empty()) {
        out << "no blow-up measurements available; nothing to reconcile\n";
        out << "verdict: INCONCLUSIVE\n";
        page += out.str();
        return Verdict::Inconclusive;
    }

    const bool slope_ok = report.has_fit &&
                          std::abs(report.fitted_slope - report.expected_slope) <=
                              report.slope_tol;
    bool dominance_ok = true;
    for (const auto* r : blowups) dominance_ok = dominance_ok && r->dominance_ok;
    bool inequality_ok = true;
    for (const auto* r : blowups) inequality_ok = inequality_ok && r->inequality_ok;

    // Compensated lifespans T eps^{-s}: their spread is the empirical gap
    // between the two sandwich constants.
    double c_low = std::numeric_limits<double>::infinity(), c_high = 0.0;
    for (const auto* r : blowups) {
        const double c = r->T_num * std::pow(r->eps, -report.expected_slope);
        c_low = std::min(c_low, c);
        c_high = std::max(c_high, c);
    }

    out << "runs: " << report.runs.size() << " (" << blowups.size() << " blow-up, "
        << report.error_count << " failed)\n";
    out << "expected slope: " << format_double(report.expected_slope) << "\n";
    if (report.has_fit)
        out << "fitted slope:   " << format_double(report.fitted_slope) << " +/- "
            << format_double(report.slope_halfwidth) << " (tolerance "
            << format_double(report.slope_tol) << ") -> " << (slope_ok ? "ok" : "VIOLATED")
            << "\n";
    else
        out << "fitted slope:   unavailable\n";
    out << "bound dominance T_num <= (1+" << format_double(report.dominance_slack)
        << ") T0: " << (dominance_ok ? "ok" : "VIOLATED") << "\n";
    out << "trace inequality: " << (inequality_ok ? "ok" : "VIOLATED") << "\n";
    out << "compensated prefactor range: [" << format_double(c_low) << ", "
        << format_double(c_high) << "]\n";
    for (const auto& r : report.runs) {
        out << "  eps=" << format_double(r.eps) << " status=" << r.status;
        if (r.status == "blowup")
            out << " T_num=" << format_double(r.T_num) << " T0=" << format_double(r.T0)
                << " ratio=" << format_double(r.T_num / r.T0);
        out << "\n";
    }

    Verdict verdict = Verdict::Fail;
    if (report.campaign_failed) {
        out << "more than 20% of runs failed\n";
    } else if (slope_ok && dominance_ok && inequality_ok) {
        verdict = Verdict::Pass;
    }
    out << "verdict: " << to_string(verdict) << "\n";
    page += out.str();
    return verdict;
}

std::string report_to_csv(const LifespanReport& report) {
    std::ostringstream out;
    out << "#has_fit=" << (report.has_fit ? 1 : 0) << "\n";
    out << "#fitted_slope=" << format_double(report.fitted_slope) << "\n";
    out << "#slope_halfwidth=" << format_double(report.slope_halfwidth) << "\n";
    out << "#expected_slope=" << format_double(report.expected_slope) << "\n";
    out << "#slope_tol=" << format_double(report.slope_tol) << "\n";
    out << "#dominance_slack=" << format_double(report.dominance_slack) << "\n";
    out << "#seed=" << report.seed << "\n";
    out << "#error_count=" << report.error_count << "\n";
    out << "#campaign_failed=" << (report.campaign_failed ? 1 : 0) << "\n";
    out << "eps,status,T_num,T0,R0,achieved_max,dominance_ok,inequality_ok\n";
    for (const auto& r : report.runs) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        out << format_double(r.eps) << "," << status << "," << format_double(r.T_num) << ","
            << format_double(r.T0) << "," << format_double(r.R0) << ","
            << format_double(r.achieved_max) << "," << (r.dominance_ok ? 1 : 0) << ","
            << (r.inequality_ok ? 1 : 0) << "\n";
    }
    return out.str();
}

LifespanReport report_from_csv(const std::string& text) {
    LifespanReport report;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(1, eq - 1);
            const std::string value = line.substr(eq + 1);
            if (key == "has_fit") report.has_fit = value == "1";
            else if (key == "fitted_slope") report.fitted_slope = std::stod(value);
            else if (key == "slope_halfwidth") report.slope_halfwidth = std::stod(value);
            else if (key == "expected_slope") report.expected_slope = std::stod(value);
            else if (key == "slope_tol") report.slope_tol = std::stod(value);
            else if (key == "dominance_slack") report.dominance_slack = std::stod(value);
            else if (key == "seed") report.seed = std::stoull(value);
            else if (key == "error_count") report.error_count = std::stoi(value);
            else if (key == "campaign_failed") report.campaign_failed = value == "1";
            continue;
        }
        if (!header_seen) {
            header_seen = true;  // column header row
            continue;
        }
        std::istringstream row(line);
        std::string field;
        RunRecord rec;
        std::getline(row, field, ',');
        rec.eps = std::stod(field);
        std::getline(row, rec.status, ',');
        std::getline(row, field, ',');
        rec.T_num = std::stod(field);
        std::getline(row, field, ',');
        rec.T0 = std::stod(field);
        std::getline(row, field, ',');
        rec.R0 = std::stod(field);
        std::getline(row, field, ',');
        rec.achieved_max = std::stod(field);
        std::getline(row, field, ',');
        rec.dominance_ok = field == "1";
        std::getline(row, field, ',');
        rec.inequality_ok = field == "1";
        report.runs.push_back(std::move(rec));
    }
    return report;
}

}  // namespace lifespan
