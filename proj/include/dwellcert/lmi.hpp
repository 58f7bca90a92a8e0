#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dwellcert/expm.hpp"
#include "dwellcert/matrix.hpp"
#include "dwellcert/system.hpp"

namespace dwellcert {

/// Handle to a symmetric matrix decision variable.
struct SymVar {
    int id = -1;
    std::size_t dim = 0;
    std::string label;
};

/// One linear term: scalar * sym(left * X * right) where X is the variable.
/// sym(.) keeps expressions symmetric for every symmetric assignment.
struct LinearTerm {
    double scalar = 1.0;
    int var_id = -1;
    std::size_t var_dim = 0;
    Matrix left, right;
};

/// constant + sum of linear terms in symmetric matrix variables.
class AffineSymExpr {
public:
    explicit AffineSymExpr(std::size_t dim) : dim_(dim), constant_(dim) {}
    explicit AffineSymExpr(SymMatrix constant)
        : dim_(constant.dim()), constant_(std::move(constant)) {}

    std::size_t dim() const { return dim_; }
    const SymMatrix& constant() const { return constant_; }
    const std::vector<LinearTerm>& terms() const { return terms_; }

    void add_constant(const SymMatrix& c) {
        require(c.dim() == dim_, "AffineSymExpr: constant dimension mismatch");
        constant_ += c;
    }

    /// scalar * sym(left * X * right)
    void add_product(double scalar, Matrix left, const SymVar& var, Matrix right) {
        require(left.rows() == dim_ && left.cols() == var.dim,
                "AffineSymExpr: left factor dimension mismatch");
        require(right.rows() == var.dim && right.cols() == dim_,
                "AffineSymExpr: right factor dimension mismatch");
        terms_.push_back({scalar, var.id, var.dim, std::move(left), std::move(right)});
    }

    /// scalar * X
    void add_scaled_var(double scalar, const SymVar& var) {
        require(var.dim == dim_, "AffineSymExpr: variable dimension mismatch");
        add_product(scalar, Matrix::identity(dim_), var, Matrix::identity(dim_));
    }

    /// scalar * m^T X m
    void add_congruence(double scalar, const Matrix& m, const SymVar& var) {
        require(m.rows() == var.dim && m.cols() == dim_,
                "AffineSymExpr: congruence factor dimension mismatch");
        add_product(scalar, m.transposed(), var, m);
    }

    SymMatrix evaluate(const std::map<int, SymMatrix>& values) const {
        SymMatrix out = constant_;
        for (const LinearTerm& term : terms_) {
            const auto it = values.find(term.var_id);
            require(it != values.end(), "AffineSymExpr: unassigned variable in evaluation");
            require(it->second.dim() == term.var_dim, "AffineSymExpr: assignment dimension mismatch");
            const Matrix prod = term.left * it->second.full() * term.right;
            out += term.scalar * SymMatrix::from_full(prod);
        }
        return out;
    }

private:
    std::size_t dim_;
    SymMatrix constant_;
    std::vector<LinearTerm> terms_;
};

struct PsdConstraint {
    std::string label;
    AffineSymExpr expr;
};

/// Feasibility problem: find symmetric X_1.. with every registered expression
/// positive semidefinite with slack margin*I, subject to one trace
/// normalization that kills the scaling degree of freedom. Strict inequalities
/// of the underlying conditions are realized by that margin.
class LMIProblem {
public:
    SymVar declare(std::size_t dim, std::string label) {
        require(dim > 0, "LMIProblem: variable dimension must be positive");
        SymVar v{next_id_++, dim, std::move(label)};
        vars_.push_back(v);
        return v;
    }

    void require_psd(AffineSymExpr expr, std::string label) {
        for (const LinearTerm& term : expr.terms()) {
            require(find_var(term.var_id) != nullptr, "LMIProblem: constraint uses undeclared variable");
        }
        constraints_.push_back({std::move(label), std::move(expr)});
    }

    /// Fixes trace(var) = target. The problem margin scales with the implied
    /// per-eigenvalue level target/dim.
    void set_normalization(const SymVar& var, double target) {
        require(find_var(var.id) != nullptr, "LMIProblem: normalizing undeclared variable");
        require(target > 0.0, "LMIProblem: normalization target must be positive");
        norm_var_ = var.id;
        norm_target_ = target;
        margin_ = 1e-6 * target / static_cast<double>(var.dim);
    }

    const std::vector<SymVar>& vars() const { return vars_; }
    const std::vector<PsdConstraint>& constraints() const { return constraints_; }
    bool has_normalization() const { return norm_var_ >= 0; }
    int normalization_var() const { return norm_var_; }
    double normalization_target() const { return norm_target_; }
    double margin() const { return margin_; }

    const SymVar* find_var(int id) const {
        for (const SymVar& v : vars_) {
            if (v.id == id) return &v;
        }
        return nullptr;
    }

private:
    std::vector<SymVar> vars_;
    std::vector<PsdConstraint> constraints_;
    int next_id_ = 0;
    int norm_var_ = -1;
    double norm_target_ = 0.0;
    double margin_ = 1e-6;
};

/// The per-mode variable pair: p_minus[i-1], p_plus[i-1] belong to mode i.
struct CertificateVars {
    std::vector<SymVar> p_minus;
    std::vector<SymVar> p_plus;
};

/// Declares P_i^-, P_i^+ for every mode with positive-definiteness
/// constraints, and normalizes trace(P_1^-) = n.
inline CertificateVars declare_certificate_vars(LMIProblem& prob, const SwitchedLinearSystem& sys) {
    CertificateVars vars;
    const std::size_t n = sys.dim();
    for (int i = 1; i <= sys.mode_count(); ++i) {
        SymVar pm = prob.declare(n, "P_" + std::to_string(i) + "^-");
        SymVar pp = prob.declare(n, "P_" + std::to_string(i) + "^+");
        vars.p_minus.push_back(pm);
        vars.p_plus.push_back(pp);
    }
    prob.set_normalization(vars.p_minus.front(), static_cast<double>(n));
    for (int i = 1; i <= sys.mode_count(); ++i) {
        AffineSymExpr em(n), ep(n);
        em.add_scaled_var(1.0, vars.p_minus[i - 1]);
        ep.add_scaled_var(1.0, vars.p_plus[i - 1]);
        prob.require_psd(std::move(em), "pd(" + vars.p_minus[i - 1].label + ")");
        prob.require_psd(std::move(ep), "pd(" + vars.p_plus[i - 1].label + ")");
    }
    return vars;
}

/// Switch conditions: for every ordered pair i != j,
///   exp(-2 rho tau1) P_i^+  -  e^{A_i^T tau1} P_j^- e^{A_i tau1}  >= 0.
inline void build_switch_conditions(LMIProblem& prob, const SwitchedLinearSystem& sys,
                                    const CertificateVars& vars, double rho, double tau1) {
    require(tau1 >= 0.0, "build_switch_conditions: tau1 must be nonnegative");
    const std::size_t n = sys.dim();
    for (int i = 1; i <= sys.mode_count(); ++i) {
        const Matrix flow = mat_exp(sys.mode(i), tau1);
        for (int j = 1; j <= sys.mode_count(); ++j) {
            if (i == j) continue;
            AffineSymExpr expr(n);
            expr.add_scaled_var(std::exp(-2.0 * rho * tau1), vars.p_plus[i - 1]);
            expr.add_congruence(-1.0, flow, vars.p_minus[j - 1]);
            prob.require_psd(std::move(expr),
                             "switch(i=" + std::to_string(i) + ",j=" + std::to_string(j) + ")");
        }
    }
}

/// Interval conditions in scalar-coupled form: per mode i,
///   mu^2 P_i^- - P_i^+ >= 0   and   2 nu P_i^+ - A_i^T P_i^+ - P_i^+ A_i >= 0.
inline void build_interval_conditions_lmi(LMIProblem& prob, const SwitchedLinearSystem& sys,
                                          const CertificateVars& vars, double mu, double nu) {
    require(mu > 0.0 && mu < 1.0, "build_interval_conditions_lmi: mu must lie in (0,1)");
    const std::size_t n = sys.dim();
    for (int i = 1; i <= sys.mode_count(); ++i) {
        AffineSymExpr contraction(n);
        contraction.add_scaled_var(mu * mu, vars.p_minus[i - 1]);
        contraction.add_scaled_var(-1.0, vars.p_plus[i - 1]);
        prob.require_psd(std::move(contraction), "contraction(mode " + std::to_string(i) + ")");

        AffineSymExpr growth(n);
        growth.add_scaled_var(2.0 * nu, vars.p_plus[i - 1]);
        growth.add_product(-2.0, sys.mode(i).transposed(), vars.p_plus[i - 1],
                           Matrix::identity(n));
        prob.require_psd(std::move(growth), "growth-bound(mode " + std::to_string(i) + ")");
    }
}

/// Scalar window inequality ln(mu) + window*(nu + rho) <= 0. For nu + rho <= 0
/// it holds for every window.
inline bool check_window_inequality(double mu, double nu, double rho, double window) {
    require(mu > 0.0 && mu < 1.0, "check_window_inequality: mu must lie in (0,1)");
    require(window >= 0.0, "check_window_inequality: window must be nonnegative");
    return std::log(mu) + window * (nu + rho) <= 0.0;
}

/// Largest admissible window -ln(mu)/(nu + rho); +inf when nu + rho <= 0.
inline double max_window(double mu, double nu, double rho) {
    require(mu > 0.0 && mu < 1.0, "max_window: mu must lie in (0,1)");
    if (nu + rho <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return -std::log(mu) / (nu + rho);
}

/// Piecewise-linear interpolation chains replacing the exponential switch
/// conditions. For every ordered pair i != j a chain Q_0..Q_K is laid down
/// with the endpoints aliased to Q_0 = P_i^+ and Q_K = P_j^- (no equality
/// constraints), interior points as fresh positive-definite variables, and
/// per step k = 1..K the two inequalities
///   2*rate*Q_k     - A_i^T Q_k     - Q_k     A_i - (K/tau1)(Q_k - Q_{k-1}) >= 0
///   2*rate*Q_{k-1} - A_i^T Q_{k-1} - Q_{k-1} A_i - (K/tau1)(Q_k - Q_{k-1}) >= 0.
///
/// rate is the signed exponential rate bounding the interpolated form: the
/// chain certifies e^{A_i^T tau1} P_j^- e^{A_i tau1} <= e^{2*rate*tau1} P_i^+
/// (up to margins) as K grows. A decay certificate at rate rho therefore
/// passes rate = -rho; the positive-sign reading is kept available since the
/// inequalities are well-formed for either sign.
inline std::map<std::pair<int, int>, std::vector<SymVar>> build_k_relaxation(
    LMIProblem& prob, const SwitchedLinearSystem& sys, const CertificateVars& vars, double rate,
    double tau1, int relaxation_steps) {
    require(relaxation_steps >= 1, "build_k_relaxation: need at least one step");
    require(tau1 > 0.0, "build_k_relaxation: tau1 must be positive");
    const std::size_t n = sys.dim();
    const double slope = static_cast<double>(relaxation_steps) / tau1;

    std::map<std::pair<int, int>, std::vector<SymVar>> chains;
    for (int i = 1; i <= sys.mode_count(); ++i) {
        const Matrix at = sys.mode(i).transposed();
        for (int j = 1; j <= sys.mode_count(); ++j) {
            if (i == j) continue;
            std::vector<SymVar> chain;
            chain.push_back(vars.p_plus[i - 1]);
            for (int k = 1; k < relaxation_steps; ++k) {
                const std::string label =
                    "Q_{" + std::to_string(i) + std::to_string(j) + "," + std::to_string(k) + "}";
                SymVar q = prob.declare(n, label);
                AffineSymExpr pd(n);
                pd.add_scaled_var(1.0, q);
                prob.require_psd(std::move(pd), "pd(" + label + ")");
                chain.push_back(q);
            }
            chain.push_back(vars.p_minus[j - 1]);

            for (int k = 1; k <= relaxation_steps; ++k) {
                const SymVar& qk = chain[static_cast<std::size_t>(k)];
                const SymVar& qp = chain[static_cast<std::size_t>(k - 1)];
                const std::string where = "(i=" + std::to_string(i) + ",j=" + std::to_string(j) +
                                          ",k=" + std::to_string(k) + ")";

                AffineSymExpr hi(n);
                hi.add_product(-2.0, at, qk, Matrix::identity(n));
                hi.add_scaled_var(2.0 * rate - slope, qk);
                hi.add_scaled_var(slope, qp);
                prob.require_psd(std::move(hi), "chain-upper" + where);

                AffineSymExpr lo(n);
                lo.add_product(-2.0, at, qp, Matrix::identity(n));
                lo.add_scaled_var(2.0 * rate + slope, qp);
                lo.add_scaled_var(-slope, qk);
                prob.require_psd(std::move(lo), "chain-lower" + where);
            }
            chains.emplace(std::make_pair(i, j), std::move(chain));
        }
    }
    return chains;
}

/// Sampled interval conditions: per mode i and grid time t in [0, tau2-tau1],
///   exp(-2 rho t) P_i^- - e^{A_i^T t} P_i^+ e^{A_i t} >= 0.
/// A sampled relaxation only; certified claims must re-check the interval
/// condition on an independent (and finer) grid.
inline void build_quadratic_grid_conditions(LMIProblem& prob, const SwitchedLinearSystem& sys,
                                            const CertificateVars& vars, double rho, double tau1,
                                            double tau2, int grid_points) {
    require(grid_points >= 2, "build_quadratic_grid_conditions: need at least two grid points");
    require(tau2 >= tau1, "build_quadratic_grid_conditions: tau2 must be >= tau1");
    const std::size_t n = sys.dim();
    const double window = tau2 - tau1;
    const int points = (window == 0.0) ? 1 : grid_points;
    for (int i = 1; i <= sys.mode_count(); ++i) {
        for (int g = 0; g < points; ++g) {
            const double t = (points == 1) ? 0.0 : window * g / (points - 1);
            AffineSymExpr expr(n);
            expr.add_scaled_var(std::exp(-2.0 * rho * t), vars.p_minus[i - 1]);
            expr.add_congruence(-1.0, mat_exp(sys.mode(i), t), vars.p_plus[i - 1]);
            prob.require_psd(std::move(expr), "interval(mode " + std::to_string(i) + ",t=" +
                                                  std::to_string(t) + ")");
        }
    }
}

}  // namespace dwellcert
