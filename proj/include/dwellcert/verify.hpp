#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dwellcert/certificate.hpp"
#include "dwellcert/eig.hpp"
#include "dwellcert/expm.hpp"
#include "dwellcert/matrix.hpp"
#include "dwellcert/parallel.hpp"
#include "dwellcert/rng.hpp"
#include "dwellcert/system.hpp"

namespace dwellcert {

enum class Verdict { verified, refuted, numerical_warning };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::verified: return "verified";
        case Verdict::refuted: return "refuted";
        case Verdict::numerical_warning: return "numerical_warning";
    }
    return "?";
}

struct VerificationReport {
    Verdict verdict = Verdict::refuted;
    double grid_margin = -std::numeric_limits<double>::infinity();    // worst over the interval grid
    double switch_margin = -std::numeric_limits<double>::infinity();  // worst over mode pairs
    long trajectory_violations = 0;
    std::string witness;  // what failed, when refuted
    double tolerance = 0.0;
    bool fingerprint_match = true;
    bool lipschitz_warning = false;
    double max_grid_step = 0.0;  // largest adjacent-margin jump seen on the grid
    // parameter echo
    double rho = 0.0, tau1 = 0.0, tau2 = 0.0, mu = 0.0, nu = 0.0;
    int grid_points = 0;
    std::string route;
};

/// Re-checks the certificate conditions against the system with nothing but
/// the eigensolver and the matrix exponential (no solver state shared with
/// synthesis). The interval condition
///   e^{-2 rho t} P_i^-  -  e^{A_i^T t} P_i^+ e^{A_i t}  >= 0
/// is sampled on grid_points equispaced t in [0, tau2-tau1]; the switch
/// condition is checked exactly per ordered mode pair. Margins below
/// -1e-8 * scale refute; a verified grid whose adjacent margins jump by more
/// than the local headroom downgrades to numerical_warning since an
/// inter-sample dip cannot be excluded.
inline VerificationReport verify_certificate(const QuadraticCertificate& cert,
                                             const SwitchedLinearSystem& sys,
                                             int grid_points = 400) {
    require(grid_points >= 2, "verify_certificate: need at least two grid points");

    VerificationReport rep;
    rep.rho = cert.rho;
    rep.tau1 = cert.tau1;
    rep.tau2 = cert.tau2;
    rep.mu = cert.mu;
    rep.nu = cert.nu;
    rep.grid_points = grid_points;
    rep.route = to_string(cert.route);
    rep.fingerprint_match =
        cert.fingerprint.empty() || cert.fingerprint == system_fingerprint(sys);

    auto refute = [&rep](const std::string& why) {
        rep.verdict = Verdict::refuted;
        rep.witness = why;
        return rep;
    };

    // structural gate
    if (cert.p_minus.empty() || cert.p_minus.size() != cert.p_plus.size()) {
        return refute("per-mode matrix lists are absent or mismatched");
    }
    if (cert.mode_count() != sys.mode_count()) {
        return refute("certificate mode count differs from the system");
    }
    if (cert.dim() != sys.dim()) {
        return refute("certificate dimension differs from the system");
    }
    if (!(cert.mu > 0.0 && cert.mu < 1.0)) {
        return refute("mu outside (0,1)");
    }
    if (!(cert.tau1 >= 0.0 && cert.tau2 >= cert.tau1)) {
        return refute("dwell bounds disordered");
    }

    double scale = 1.0;
    for (int i = 0; i < cert.mode_count(); ++i) {
        for (const auto* side : {&cert.p_minus, &cert.p_plus}) {
            const SymMatrix& p = (*side)[static_cast<std::size_t>(i)];
            if (p.dim() != sys.dim() || !p.all_finite()) {
                return refute("malformed certificate matrix for mode " + std::to_string(i + 1));
            }
            const SymEig e = sym_eig(p);
            if (e.values.front() <= 0.0) {
                const bool minus = side == &cert.p_minus;
                return refute("P_" + std::to_string(i + 1) + (minus ? "^-" : "^+") +
                              " is not positive definite (min eigenvalue " +
                              std::to_string(e.values.front()) + ")");
            }
            scale = std::max(scale, e.values.back());
        }
    }
    rep.tolerance = -1e-8 * scale;

    // scalar window inequality is part of the certificate's claim
    const double window = cert.tau2 - cert.tau1;
    if (std::log(cert.mu) + window * (cert.nu + cert.rho) >
        1e-12 * (1.0 + std::abs(std::log(cert.mu)))) {
        return refute("window inequality ln(mu)+(tau2-tau1)(nu+rho) <= 0 fails");
    }

    // interval condition on the grid
    rep.grid_margin = std::numeric_limits<double>::infinity();
    double worst_dip = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= sys.mode_count(); ++i) {
        const SymMatrix& pp = cert.p_plus[static_cast<std::size_t>(i - 1)];
        const SymMatrix& pm = cert.p_minus[static_cast<std::size_t>(i - 1)];
        double prev_margin = 0.0;
        for (int g = 0; g < grid_points; ++g) {
            const double t = (window == 0.0) ? 0.0 : window * g / (grid_points - 1);
            SymMatrix expr = pm * std::exp(-2.0 * cert.rho * t);
            expr -= congruence(mat_exp(sys.mode(i), t), pp);
            const double m = min_eig(expr);
            if (m < rep.grid_margin) {
                rep.grid_margin = m;
            }
            if (g > 0) {
                const double step = std::abs(m - prev_margin);
                rep.max_grid_step = std::max(rep.max_grid_step, step);
                // pessimistic mid-interval estimate from the endpoints
                worst_dip = std::min(worst_dip, std::min(m, prev_margin) - 0.5 * step);
            }
            prev_margin = m;
            if (rep.grid_margin < rep.tolerance) {
                return refute("interval condition fails for mode " + std::to_string(i) + " at t=" +
                              std::to_string(t) + " (margin " + std::to_string(rep.grid_margin) +
                              ")");
            }
            if (window == 0.0) break;
        }
    }

    // switch condition, exact per ordered pair
    rep.switch_margin = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= sys.mode_count(); ++i) {
        const Matrix flow = mat_exp(sys.mode(i), cert.tau1);
        for (int j = 1; j <= sys.mode_count(); ++j) {
            if (i == j) continue;
            SymMatrix expr =
                cert.p_plus[static_cast<std::size_t>(i - 1)] * std::exp(-2.0 * cert.rho * cert.tau1);
            expr -= congruence(flow, cert.p_minus[static_cast<std::size_t>(j - 1)]);
            const double m = min_eig(expr);
            rep.switch_margin = std::min(rep.switch_margin, m);
            if (m < rep.tolerance) {
                return refute("switch condition fails for pair (" + std::to_string(i) + "," +
                              std::to_string(j) + ") (margin " + std::to_string(m) + ")");
            }
        }
    }
    if (sys.mode_count() == 1) {
        rep.switch_margin = 0.0;  // vacuous
    }

    rep.verdict = Verdict::verified;
    if (window > 0.0 && worst_dip < rep.tolerance) {
        rep.lipschitz_warning = true;
        rep.verdict = Verdict::numerical_warning;
        rep.witness = "grid margins pass but adjacent samples vary enough that an inter-sample "
                      "dip below tolerance cannot be excluded";
    }
    return rep;
}

struct TrajectoryCheck {
    long envelope_violations = 0;
    long chain_violations = 0;
    double worst_envelope_ratio = 0.0;  // max |x(t)| / (M e^{-rho t} |x0|)
    double worst_chain_ratio = 0.0;     // max of v_after / (decay * v_before)
    int signals = 0;
    int states = 0;

    long total() const { return envelope_violations + chain_violations; }
};

/// Monte-Carlo soundness probe of a certificate: random class members and
/// random unit initial states, exact piecewise propagation. Checks the decay
/// envelope |x(t)| <= M_env e^{-rho t} |x0| at every sample and the
/// switching-instant chain
///   v^-_{sigma(t_k)}(x(t_k)) <= e^{-rho (t_k - t_{k-1})} v^-_{sigma(t_{k-1})}(x(t_{k-1}))
/// with v^-_i(x) = sqrt(x^T P_i^- x). The interval condition controls only the
/// first tau2 - tau1 time units past a switch; the trailing stretch of length
/// at most tau1 is governed solely by the nu growth bound, so the certified
/// envelope constant is M_env = overshoot * e^{max(0, nu + rho) tau1}.
/// Violations are counted, never repaired; a relative slack of 1e-9 absorbs
/// floating-point noise.
inline TrajectoryCheck trajectory_decrease_check(const QuadraticCertificate& cert,
                                                 const SwitchedLinearSystem& sys,
                                                 const DwellClass& cls, int n_signals,
                                                 int n_states, double horizon,
                                                 std::uint64_t seed) {
    require(n_signals > 0 && n_states > 0, "trajectory_decrease_check: empty sample plan");
    require(horizon > 0.0, "trajectory_decrease_check: horizon must be positive");
    require(cert.dim() == sys.dim() && cert.mode_count() == sys.mode_count(),
            "trajectory_decrease_check: certificate/system shape mismatch");

    TrajectoryCheck init;
    init.signals = n_signals;
    init.states = n_states;
    const double m_bound =
        cert.overshoot * std::exp(std::max(0.0, cert.nu + cert.rho) * cert.tau1);
    const double rel = 1.0 + 1e-9;
    const double sample_dt = horizon / 400.0;

    auto per_signal = [&](TrajectoryCheck& acc, std::size_t s) {
        SwitchingSignal sig;
        if (sys.mode_count() == 1) {
            sig.initial_mode = 1;
            sig.horizon = horizon;
        } else {
            sig = sample_signal(cls, horizon, sys.mode_count(), derive_seed(seed, 2 * s));
        }
        Rng state_rng(derive_seed(seed, 2 * s + 1));
        for (int q = 0; q < n_states; ++q) {
            const Vec x0 = state_rng.unit_vector(sys.dim());

            const Trajectory traj = simulate(sys, sig, x0, sample_dt);
            for (std::size_t k = 0; k < traj.times.size(); ++k) {
                const double bound = m_bound * std::exp(-cert.rho * traj.times[k]);
                const double ratio = norm2(traj.states[k]) / bound;
                acc.worst_envelope_ratio = std::max(acc.worst_envelope_ratio, ratio);
                if (ratio > rel) {
                    ++acc.envelope_violations;
                }
            }

            // switching-instant chain, propagated segment by segment
            Vec x = x0;
            double t_prev = 0.0;
            int mode_prev = sig.initial_mode;
            double v_prev = std::sqrt(
                quad_form(cert.p_minus[static_cast<std::size_t>(mode_prev - 1)], x));
            for (const SwitchEvent& e : sig.events) {
                x = matvec(mat_exp(sys.mode(mode_prev), e.time - t_prev), x);
                const double v_now =
                    std::sqrt(quad_form(cert.p_minus[static_cast<std::size_t>(e.mode - 1)], x));
                const double decay = std::exp(-cert.rho * (e.time - t_prev));
                if (v_prev > 0.0) {
                    const double ratio = v_now / (decay * v_prev);
                    acc.worst_chain_ratio = std::max(acc.worst_chain_ratio, ratio);
                    if (ratio > rel) {
                        ++acc.chain_violations;
                    }
                }
                t_prev = e.time;
                mode_prev = e.mode;
                v_prev = v_now;
            }
        }
    };
    auto merge = [](TrajectoryCheck& total, const TrajectoryCheck& part) {
        total.envelope_violations += part.envelope_violations;
        total.chain_violations += part.chain_violations;
        total.worst_envelope_ratio = std::max(total.worst_envelope_ratio, part.worst_envelope_ratio);
        total.worst_chain_ratio = std::max(total.worst_chain_ratio, part.worst_chain_ratio);
    };
    TrajectoryCheck zero = init;
    TrajectoryCheck out =
        parallel_reduce(static_cast<std::size_t>(n_signals), zero, per_signal, merge);
    out.signals = n_signals;
    out.states = n_states;
    return out;
}

struct GrowthEstimate {
    double rate = 0.0;  // Monte-Carlo estimate, not a bound
    int signals = 0;
    double horizon = 0.0;
};

namespace detail {

/// Transition matrix over the whole horizon plus the max transition norm seen
/// at switching instants and the horizon.
struct SignalFlow {
    Matrix transition;
    double peak_norm = 1.0;  // max over checkpoints of the induced growth |Phi e_j|
};

inline SignalFlow propagate(const SwitchedLinearSystem& sys, const SwitchingSignal& sig) {
    SignalFlow flow{Matrix::identity(sys.dim()), 1.0};
    auto absorb_peak = [&](const Matrix& phi) {
        for (std::size_t j = 0; j < phi.cols(); ++j) {
            double col = 0.0;
            for (std::size_t i = 0; i < phi.rows(); ++i) {
                col += phi(i, j) * phi(i, j);
            }
            flow.peak_norm = std::max(flow.peak_norm, std::sqrt(col));
        }
    };
    double t_prev = 0.0;
    int mode = sig.initial_mode;
    for (const SwitchEvent& e : sig.events) {
        flow.transition = mat_exp(sys.mode(mode), e.time - t_prev) * flow.transition;
        absorb_peak(flow.transition);
        t_prev = e.time;
        mode = e.mode;
    }
    flow.transition = mat_exp(sys.mode(mode), sig.horizon - t_prev) * flow.transition;
    absorb_peak(flow.transition);
    return flow;
}

}  // namespace detail

/// Worst empirical exponential rate over sampled class members and
/// canonical-basis initial states: max of ln|Phi(horizon) e_j| / horizon.
/// This is an ESTIMATE from finitely many samples, usable as evidence and for
/// refutation, never as a stability proof.
inline GrowthEstimate empirical_growth(const SwitchedLinearSystem& sys, const DwellClass& cls,
                                       int n_signals, double horizon, std::uint64_t seed) {
    require(n_signals > 0, "empirical_growth: need at least one signal");
    require(sys.mode_count() == 1 || horizon >= 5.0 * cls.tau2,
            "empirical_growth: horizon must cover at least five maximal dwell periods");

    GrowthEstimate out;
    out.signals = n_signals;
    out.horizon = horizon;

    auto column_rate_max = [&](const Matrix& phi) {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < phi.cols(); ++j) {
            double col = 0.0;
            for (std::size_t i = 0; i < phi.rows(); ++i) {
                col += phi(i, j) * phi(i, j);
            }
            worst = std::max(worst, std::log(std::sqrt(col)) / horizon);
        }
        return worst;
    };

    if (sys.mode_count() == 1) {  // only the constant signal exists
        SwitchingSignal sig;
        sig.horizon = horizon;
        out.rate = column_rate_max(detail::propagate(sys, sig).transition);
        return out;
    }

    out.rate = parallel_reduce(
        static_cast<std::size_t>(n_signals), -std::numeric_limits<double>::infinity(),
        [&](double& worst, std::size_t s) {
            const SwitchingSignal sig =
                sample_signal(cls, horizon, sys.mode_count(), derive_seed(seed, s));
            worst = std::max(worst, column_rate_max(detail::propagate(sys, sig).transition));
        },
        [](double& total, double part) { total = std::max(total, part); });
    return out;
}

struct ProductScanEntry {
    std::vector<int> cycle;  // mode sequence, 1-based
    double radius = 0.0;
};

struct ProductScan {
    std::vector<ProductScanEntry> entries;
    double max_radius = 0.0;
    bool all_schur = true;
};

/// Spectral radii of the period maps of fixed-dwell periodic signals: all
/// mode cycles without immediate repetition (wrap-around included) up to
/// max_len, deduplicated up to rotation (period maps of rotated cycles are
/// similar). A necessary-condition scan: it covers periodic signals only and
/// cannot certify the whole fixed-dwell class.
inline ProductScan fixed_time_product_check(const SwitchedLinearSystem& sys, double tau,
                                            int max_len = 0) {
    require(tau > 0.0, "fixed_time_product_check: tau must be positive");
    const int m = sys.mode_count();
    if (max_len <= 0) max_len = m;

    std::vector<Matrix> exps;
    exps.reserve(static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i) {
        exps.push_back(mat_exp(sys.mode(i), tau));
    }

    ProductScan out;
    if (m == 1) {
        // no switching possible; the single-mode period map is still reported
        out.entries.push_back({{1}, spectral_radius(exps[0])});
        out.max_radius = out.entries[0].radius;
        out.all_schur = out.max_radius < 1.0;
        return out;
    }

    std::vector<int> cycle;
    auto canonical = [](const std::vector<int>& c) {
        std::vector<int> best = c;
        std::vector<int> rot = c;
        for (std::size_t r = 1; r < c.size(); ++r) {
            std::rotate(rot.begin(), rot.begin() + 1, rot.end());
            if (rot < best) best = rot;
        }
        return best;
    };

    std::vector<std::vector<int>> seen;
    std::function<void(int)> walk = [&](int len) {
        if (len >= 2) {
            if (cycle.front() != cycle.back()) {
                const std::vector<int> canon = canonical(cycle);
                if (std::find(seen.begin(), seen.end(), canon) == seen.end()) {
                    seen.push_back(canon);
                    Matrix prod = Matrix::identity(sys.dim());
                    for (int mode : cycle) {
                        prod = exps[static_cast<std::size_t>(mode - 1)] * prod;
                    }
                    out.entries.push_back({cycle, spectral_radius(prod)});
                }
            }
        }
        if (len == max_len) return;
        for (int next = 1; next <= m; ++next) {
            if (!cycle.empty() && next == cycle.back()) continue;
            cycle.push_back(next);
            walk(len + 1);
            cycle.pop_back();
        }
    };
    walk(0);

    for (const auto& e : out.entries) {
        out.max_radius = std::max(out.max_radius, e.radius);
    }
    out.all_schur = out.max_radius < 1.0;
    return out;
}

struct Lemma1Probe {
    double rate_strict = 0.0;
    double rate_star = 0.0;
    double overshoot_strict = 1.0;
    double overshoot_star = 1.0;
    double overshoot_ratio = 1.0;  // star / strict
};

/// Compares the empirical decay under the strict class (all gaps in
/// [tau1,tau2]) against the star class (first gap only bounded above). The
/// two describe the same asymptotic behavior, so their rates agree up to
/// sampling noise while the transient overshoot may differ by a bounded
/// factor; both observations are reported for the caller to judge.
inline Lemma1Probe lemma1_equivalence_probe(const SwitchedLinearSystem& sys, double tau1,
                                            double tau2, int n_signals, double horizon,
                                            std::uint64_t seed) {
    require(n_signals > 0, "lemma1_equivalence_probe: need at least one signal");
    require(horizon >= 5.0 * tau2, "lemma1_equivalence_probe: horizon too short");

    Lemma1Probe out;

    struct Acc {
        double rate = -std::numeric_limits<double>::infinity();
        double peak = 1.0;
    };
    auto measure = [&](const DwellClass& cls) {
        if (sys.mode_count() == 1) {
            SwitchingSignal sig;
            sig.horizon = horizon;
            const detail::SignalFlow flow = detail::propagate(sys, sig);
            Acc acc;
            acc.peak = flow.peak_norm;
            for (std::size_t j = 0; j < sys.dim(); ++j) {
                double col = 0.0;
                for (std::size_t i = 0; i < sys.dim(); ++i) {
                    col += flow.transition(i, j) * flow.transition(i, j);
                }
                acc.rate = std::max(acc.rate, std::log(std::sqrt(col)) / horizon);
            }
            return acc;
        }
        return parallel_reduce(
            static_cast<std::size_t>(n_signals), Acc{},
            [&](Acc& acc, std::size_t s) {
                const SwitchingSignal sig =
                    sample_signal(cls, horizon, sys.mode_count(), derive_seed(seed, s));
                const detail::SignalFlow flow = detail::propagate(sys, sig);
                acc.peak = std::max(acc.peak, flow.peak_norm);
                for (std::size_t j = 0; j < sys.dim(); ++j) {
                    double col = 0.0;
                    for (std::size_t i = 0; i < sys.dim(); ++i) {
                        col += flow.transition(i, j) * flow.transition(i, j);
                    }
                    acc.rate = std::max(acc.rate, std::log(std::sqrt(col)) / horizon);
                }
            },
            [](Acc& total, const Acc& part) {
                total.rate = std::max(total.rate, part.rate);
                total.peak = std::max(total.peak, part.peak);
            });
    };

    const Acc strict_acc = measure(DwellClass::strict(tau1, tau2));
    const Acc star_acc = measure(DwellClass::star(tau1, tau2));
    out.rate_strict = strict_acc.rate;
    out.overshoot_strict = strict_acc.peak;
    out.rate_star = star_acc.rate;
    out.overshoot_star = star_acc.peak;
    out.overshoot_ratio = out.overshoot_star / out.overshoot_strict;
    return out;
}

}  // namespace dwellcert
