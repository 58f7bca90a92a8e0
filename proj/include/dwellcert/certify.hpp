#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dwellcert/certificate.hpp"
#include "dwellcert/lmi.hpp"
#include "dwellcert/sdp.hpp"
#include "dwellcert/system.hpp"

namespace dwellcert {

struct SynthesisParams {
    double rho = 0.0;
    double tau1 = 0.0;
    double tau2 = 0.0;
    double nu = 0.0;
    std::optional<double> mu;  // fixed when set, otherwise found by line search
    CertificateRoute route = CertificateRoute::exp_switch;
    int relaxation_steps = 8;  // chain length for k_relax
    double mu_tolerance = 5e-3;
    SolveOptions solve;
};

struct SynthesisOutcome {
    bool success = false;
    QuadraticCertificate certificate;  // populated on success
    std::string message;
    FeasibilityStatus solver_status = FeasibilityStatus::inconclusive;
    double worst_margin = 0.0;
    int iterations = 0;
    double mu_used = 0.0;
};

namespace detail {

/// Assembles the mu-dependent feasibility problem: positive-definite per-mode
/// pairs, the contraction and growth-bound conditions, and the switch
/// conditions over the mandatory dwell tau1, either through explicit
/// exponentials or through a linear interpolation chain at the signed decay
/// rate -rho.
inline std::pair<LMIProblem, CertificateVars> certificate_problem(const SwitchedLinearSystem& sys,
                                                                  double rho, double tau1,
                                                                  double mu, double nu,
                                                                  CertificateRoute route, int k) {
    LMIProblem prob;
    CertificateVars vars = declare_certificate_vars(prob, sys);
    build_interval_conditions_lmi(prob, sys, vars, mu, nu);
    if (sys.mode_count() > 1) {
        if (route == CertificateRoute::exp_switch) {
            build_switch_conditions(prob, sys, vars, rho, tau1);
        } else {
            build_k_relaxation(prob, sys, vars, -rho, tau1, k);
        }
    }
    return {std::move(prob), std::move(vars)};
}

inline QuadraticCertificate package_certificate(const SwitchedLinearSystem& sys,
                                                const SynthesisParams& params, double mu,
                                                const LMIProblem& prob,
                                                const CertificateVars& vars,
                                                const Assignment& asg) {
    QuadraticCertificate cert;
    cert.fingerprint = system_fingerprint(sys);
    cert.rho = params.rho;
    cert.tau1 = params.tau1;
    cert.tau2 = params.tau2;
    cert.mu = mu;
    cert.nu = params.nu;
    cert.route = params.route;
    for (int i = 1; i <= sys.mode_count(); ++i) {
        cert.p_minus.push_back(asg.values.at(vars.p_minus[i - 1].id));
        cert.p_plus.push_back(asg.values.at(vars.p_plus[i - 1].id));
    }
    if (params.route == CertificateRoute::k_relax && sys.mode_count() > 1) {
        cert.relaxation_steps = params.relaxation_steps;
        // recover interior chain values by label lookup
        for (int i = 1; i <= sys.mode_count(); ++i) {
            for (int j = 1; j <= sys.mode_count(); ++j) {
                if (i == j) continue;
                std::vector<SymMatrix> chain;
                chain.push_back(cert.p_plus[static_cast<std::size_t>(i - 1)]);
                for (int step = 1; step < params.relaxation_steps; ++step) {
                    const std::string label = "Q_{" + std::to_string(i) + std::to_string(j) + "," +
                                              std::to_string(step) + "}";
                    for (const SymVar& v : prob.vars()) {
                        if (v.label == label) {
                            chain.push_back(asg.values.at(v.id));
                            break;
                        }
                    }
                }
                chain.push_back(cert.p_minus[static_cast<std::size_t>(j - 1)]);
                cert.chains.emplace(std::make_pair(i, j), std::move(chain));
            }
        }
    }
    cert.overshoot = certificate_overshoot(cert.p_minus, cert.p_plus);
    return cert;
}

}  // namespace detail

struct MuSearchResult {
    bool success = false;
    double mu_hat = 0.0;
    Assignment assignment;  // feasible point at mu_hat
    std::string message;
    int probes = 0;
};

/// Bisection for the smallest feasible mu in (0,1), stopping at bracket width
/// tolerance. Feasibility is monotone in mu (growing mu only relaxes the
/// contraction condition); the bracketing endpoints are solved first and a
/// non-monotone observation (feasible low endpoint under an infeasible high
/// endpoint) is a hard error rather than a silent wrong answer.
inline MuSearchResult line_search_mu(const SwitchedLinearSystem& sys, double rho, double tau1,
                                     double nu, CertificateRoute route = CertificateRoute::exp_switch,
                                     int relaxation_steps = 8, double tolerance = 5e-3,
                                     const SolveOptions& solve = {}) {
    require(tolerance > 0.0 && tolerance < 0.5, "line_search_mu: tolerance out of range");

    MuSearchResult out;
    std::optional<Assignment> warm;
    auto probe = [&](double mu) -> std::optional<Assignment> {
        auto [prob, vars] = detail::certificate_problem(sys, rho, tau1, mu, nu, route,
                                                        relaxation_steps);
        SolveOptions opts = solve;
        opts.warm_start = warm;
        const FeasibilityResult res = solve_feasibility(prob, opts);
        ++out.probes;
        if (res.status == FeasibilityStatus::feasible) {
            warm = res.assignment;
            return res.assignment;
        }
        return std::nullopt;
    };

    double hi = 1.0 - tolerance;
    auto hi_asg = probe(hi);
    if (!hi_asg) {
        if (probe(tolerance)) {
            throw std::runtime_error(
                "line_search_mu: feasibility is not monotone in mu (feasible at the low endpoint, "
                "infeasible at the high endpoint)");
        }
        out.message = "infeasible at mu = 1 - tolerance; no quadratic certificate at these parameters";
        return out;
    }

    double lo = tolerance;
    auto lo_asg = probe(lo);
    if (lo_asg) {
        out.success = true;
        out.mu_hat = lo;
        out.assignment = *lo_asg;
        out.message = "feasible down to the tolerance floor";
        return out;
    }

    Assignment best = *hi_asg;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (auto asg = probe(mid)) {
            hi = mid;
            best = *asg;
        } else {
            lo = mid;
        }
    }
    out.success = true;
    out.mu_hat = hi;
    out.assignment = std::move(best);
    out.message = "bisection converged";
    return out;
}

/// Builds a certificate at the given parameters. With params.mu unset the
/// smallest feasible mu is located first; either way the window inequality
/// ln(mu) + (tau2-tau1)(nu+rho) <= 0 must hold for the certificate to exist
/// at the requested window.
inline SynthesisOutcome synthesize(const SwitchedLinearSystem& sys, const SynthesisParams& params) {
    require(params.rho > 0.0, "synthesize: rho must be positive");
    require(params.tau1 >= 0.0 && params.tau2 >= params.tau1,
            "synthesize: need 0 <= tau1 <= tau2");
    if (params.route == CertificateRoute::k_relax) {
        require(params.tau1 > 0.0, "synthesize: k_relax route needs tau1 > 0");
        require(params.relaxation_steps >= 1, "synthesize: k_relax route needs steps >= 1");
    }

    SynthesisOutcome out;
    const double window = params.tau2 - params.tau1;

    double mu;
    if (params.mu) {
        mu = *params.mu;
        require(mu > 0.0 && mu < 1.0, "synthesize: mu must lie in (0,1)");
    } else {
        const MuSearchResult search =
            line_search_mu(sys, params.rho, params.tau1, params.nu, params.route,
                           params.relaxation_steps, params.mu_tolerance, params.solve);
        if (!search.success) {
            out.message = search.message;
            return out;
        }
        mu = search.mu_hat;
    }
    out.mu_used = mu;

    if (!check_window_inequality(mu, params.nu, params.rho, window)) {
        out.message = "window inequality fails: ln(mu) + (tau2-tau1)(nu+rho) > 0 at mu=" +
                      std::to_string(mu) + "; the admissible window is " +
                      std::to_string(max_window(mu, params.nu, params.rho));
        return out;
    }

    auto [prob, vars] = detail::certificate_problem(sys, params.rho, params.tau1, mu, params.nu,
                                                    params.route, params.relaxation_steps);
    const FeasibilityResult res = solve_feasibility(prob, params.solve);
    out.solver_status = res.status;
    out.worst_margin = res.worst_margin;
    out.iterations = res.iterations;
    if (res.status != FeasibilityStatus::feasible) {
        out.message = std::string("no quadratic certificate at these parameters (solver: ") +
                      to_string(res.status) + ", " + res.diagnostics + ")";
        return out;
    }

    out.certificate = detail::package_certificate(sys, params, mu, prob, vars, res.assignment);
    check_certificate_invariants(out.certificate);
    out.success = true;
    out.message = "certificate synthesized";
    return out;
}

struct DelayResult {
    bool success = false;
    double mu_hat = 0.0;
    double delta = 0.0;  // admissible window beyond tau1
    QuadraticCertificate certificate;
    std::string message;
};

/// Finds the smallest feasible mu at the mandatory dwell tau1 and converts it
/// into the widest admissible dwell window delta = -ln(mu_hat)/(nu+rho); the
/// returned certificate covers dwell times in [tau1, tau1 + delta].
inline DelayResult max_admissible_delay(const SwitchedLinearSystem& sys, double rho, double tau1,
                                        double nu,
                                        CertificateRoute route = CertificateRoute::exp_switch,
                                        int relaxation_steps = 8, double mu_tolerance = 5e-3,
                                        const SolveOptions& solve = {}) {
    DelayResult out;
    const MuSearchResult search =
        line_search_mu(sys, rho, tau1, nu, route, relaxation_steps, mu_tolerance, solve);
    if (!search.success) {
        out.message = search.message;
        return out;
    }
    out.mu_hat = search.mu_hat;
    out.delta = max_window(search.mu_hat, nu, rho);

    SynthesisParams params;
    params.rho = rho;
    params.tau1 = tau1;
    const double delta_for_cert =
        std::isfinite(out.delta) ? out.delta * (1.0 - 1e-12) : 1e6;  // keep the invariant strict
    params.tau2 = tau1 + delta_for_cert;
    params.nu = nu;
    params.mu = search.mu_hat;
    params.route = route;
    params.relaxation_steps = relaxation_steps;
    params.solve = solve;
    const SynthesisOutcome synth = synthesize(sys, params);
    if (!synth.success) {
        out.message = "delay computed but certificate assembly failed: " + synth.message;
        return out;
    }
    out.certificate = synth.certificate;
    out.success = true;
    out.message = "admissible delay computed";
    return out;
}

/// Candidate growth-bound parameters when the caller does not supply one: a
/// coarse fixed grid joined by the tightest logarithmic-norm bound
/// max_i lambda_max((A_i + A_i^T)/2), deduplicated and sorted.
inline std::vector<double> nu_candidates(const SwitchedLinearSystem& sys) {
    std::vector<double> grid = {0.25, 0.5, 1.0, 1.5, 2.0};
    double log_norm = -std::numeric_limits<double>::infinity();
    for (const Matrix& a : sys.modes) {
        log_norm = std::max(log_norm, max_eig(SymMatrix::from_full(a)));
    }
    grid.push_back(log_norm);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               grid.end());
    return grid;
}

}  // namespace dwellcert
