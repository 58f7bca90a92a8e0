#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dwellcert/eig.hpp"
#include "dwellcert/lmi.hpp"
#include "dwellcert/matrix.hpp"

namespace dwellcert {

struct Assignment {
    std::map<int, SymMatrix> values;  // SymVar id -> value
};

enum class FeasibilityStatus { feasible, infeasible_evidence, inconclusive };

inline const char* to_string(FeasibilityStatus s) {
    switch (s) {
        case FeasibilityStatus::feasible: return "feasible";
        case FeasibilityStatus::infeasible_evidence: return "infeasible_evidence";
        case FeasibilityStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

struct FeasibilityResult {
    FeasibilityStatus status = FeasibilityStatus::inconclusive;
    Assignment assignment;   // meaningful proof object only when status == feasible
    double worst_margin = -std::numeric_limits<double>::infinity();  // min over constraints of min-eig
    int iterations = 0;
    std::string diagnostics;
};

/// Independent soundness gate: evaluates every constraint at the assignment
/// with nothing but the eigensolver and returns the worst minimum eigenvalue.
/// Throws when the assignment misses a declared variable.
inline double verify_assignment(const LMIProblem& prob, const Assignment& asg) {
    for (const SymVar& v : prob.vars()) {
        const auto it = asg.values.find(v.id);
        require(it != asg.values.end(), "verify_assignment: missing value for " + v.label);
        require(it->second.dim() == v.dim, "verify_assignment: wrong dimension for " + v.label);
        require(it->second.all_finite(), "verify_assignment: non-finite value for " + v.label);
    }
    double worst = std::numeric_limits<double>::infinity();
    for (const PsdConstraint& c : prob.constraints()) {
        worst = std::min(worst, min_eig(c.expr.evaluate(asg.values)));
    }
    return worst;
}

namespace detail {

inline std::size_t svec_dim(std::size_t n) { return n * (n + 1) / 2; }

/// Isometric vectorization: diagonal entries as-is, off-diagonals scaled by
/// sqrt(2), upper triangle row-major. Keeps Euclidean geometry of the matrix
/// space so least-squares corrections are honest projections.
inline void svec_into(const SymMatrix& s, double* out) {
    const double rt2 = std::sqrt(2.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        for (std::size_t j = i; j < s.dim(); ++j) {
            out[k++] = (i == j) ? s(i, i) : rt2 * s(i, j);
        }
    }
}

inline SymMatrix smat(const double* in, std::size_t n) {
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    SymMatrix s(n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            s.at(i, j) = (i == j) ? in[k] : inv_rt2 * in[k];
            ++k;
        }
    }
    return s;
}

struct VarSlot {
    int id = -1;
    std::size_t dim = 0;
    std::size_t offset = 0;  // into the stacked svec coordinate vector
};

struct CompiledConstraint {
    std::string label;
    std::size_t block_dim = 0;
    Vec constant;       // svec of the constant part
    Matrix map;         // d x N, y = constant + map * x
    Matrix correction;  // N x d, minimum-norm preimage of an svec displacement
};

}  // namespace detail

struct SolveOptions {
    int max_iter = 40000;        // projection sweeps
    double tol = 5e-7;           // margin slack, relative to normalization scale
    int stall_window = 1500;     // sweeps without progress before giving up
    double relaxation = 1.0;     // step scaling on each correction
    std::optional<Assignment> warm_start;
};

/// Alternating-projection feasibility search.
///
/// State lives as one stacked vector of isometric svec coordinates of all
/// variables. Each sweep first re-imposes the trace normalization, then walks
/// the constraints in declaration order: evaluate, eigen-decompose, and if the
/// minimum eigenvalue sits below the problem margin, clip eigenvalues up to
/// the margin and pull the state by the precomputed minimum-norm correction of
/// the constraint's linear map. A sweep that never corrects means every
/// constraint clears margin - tol, which for tol < margin implies strict
/// positive definiteness; the returned margin is re-measured independently by
/// verify_assignment before feasible is announced.
///
/// Infeasibility is reported as evidence only: a stall (no improvement of the
/// best worst-margin across stall_window sweeps) far below the margin, or
/// iterates escaping to non-finite values along a recession direction, which
/// the corrections cannot produce when a feasible point exists. A stall close
/// to the margin is inconclusive.
inline FeasibilityResult solve_feasibility(const LMIProblem& prob, const SolveOptions& opts = {}) {
    require(prob.has_normalization(),
            "solve_feasibility: problem lacks a trace normalization (homogeneous problems "
            "admit the zero matrix)");
    require(opts.max_iter > 0, "solve_feasibility: max_iter must be positive");
    require(opts.tol > 0.0, "solve_feasibility: tol must be positive");

    const SymVar* norm_var = prob.find_var(prob.normalization_var());
    const double scale = prob.normalization_target() / static_cast<double>(norm_var->dim);
    const double margin = prob.margin();
    const double slack = opts.tol * scale;

    // variable layout
    std::vector<detail::VarSlot> slots;
    std::size_t total = 0;
    for (const SymVar& v : prob.vars()) {
        slots.push_back({v.id, v.dim, total});
        total += detail::svec_dim(v.dim);
    }
    auto slot_of = [&](int id) -> const detail::VarSlot& {
        for (const auto& s : slots) {
            if (s.id == id) return s;
        }
        throw std::logic_error("solve_feasibility: unknown variable id");
    };

    // compile constraints to dense affine maps on the stacked coordinates
    std::vector<detail::CompiledConstraint> compiled;
    compiled.reserve(prob.constraints().size());
    for (const PsdConstraint& c : prob.constraints()) {
        detail::CompiledConstraint cc;
        cc.label = c.label;
        cc.block_dim = c.expr.dim();
        const std::size_t d = detail::svec_dim(cc.block_dim);
        cc.constant.resize(d);
        detail::svec_into(c.expr.constant(), cc.constant.data());
        cc.map = Matrix(d, total);
        for (const LinearTerm& term : c.expr.terms()) {
            const detail::VarSlot& slot = slot_of(term.var_id);
            std::size_t col = slot.offset;
            for (std::size_t p = 0; p < slot.dim; ++p) {
                for (std::size_t q = p; q < slot.dim; ++q, ++col) {
                    // unit coordinate -> basis matrix E_pq (isometric scaling)
                    SymMatrix basis(slot.dim);
                    basis.at(p, q) = (p == q) ? 1.0 : 1.0 / std::sqrt(2.0);
                    const Matrix prod = term.left * basis.full() * term.right;
                    const SymMatrix symd = SymMatrix::from_full(prod) * term.scalar;
                    Vec column(d);
                    detail::svec_into(symd, column.data());
                    for (std::size_t r = 0; r < d; ++r) {
                        cc.map(r, col) += column[r];
                    }
                }
            }
        }
        // minimum-norm correction: map^T (map map^T)^+
        SymMatrix gram(d);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t s = r; s < d; ++s) {
                double acc = 0.0;
                for (std::size_t k = 0; k < total; ++k) {
                    acc += cc.map(r, k) * cc.map(s, k);
                }
                gram.at(r, s) = acc;
            }
        }
        const SymEig ge = sym_eig(gram);
        const double lam_max = std::max(ge.values.back(), 0.0);
        Matrix inv_half(d, d);  // V diag(1/lambda) V^T
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t s = 0; s < d; ++s) {
                double acc = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    if (ge.values[k] > lam_max * 1e-12 && ge.values[k] > 0.0) {
                        acc += ge.vectors(r, k) * ge.vectors(s, k) / ge.values[k];
                    }
                }
                inv_half(r, s) = acc;
            }
        }
        cc.correction = cc.map.transposed() * inv_half;
        compiled.push_back(std::move(cc));
    }

    // normalization hyperplane: coefficients 1 on the diagonal coordinates
    const detail::VarSlot& nslot = slot_of(prob.normalization_var());
    std::vector<std::size_t> diag_coords;
    {
        std::size_t k = nslot.offset;
        for (std::size_t p = 0; p < nslot.dim; ++p) {
            diag_coords.push_back(k);
            k += nslot.dim - p;
        }
    }
    const double target = prob.normalization_target();

    // initial point: warm start where provided, scaled identities elsewhere
    Vec x(total, 0.0);
    for (const auto& slot : slots) {
        const SymMatrix* src = nullptr;
        if (opts.warm_start) {
            const auto it = opts.warm_start->values.find(slot.id);
            if (it != opts.warm_start->values.end() && it->second.dim() == slot.dim) {
                src = &it->second;
            }
        }
        const SymMatrix init = src ? *src : SymMatrix::scaled_identity(slot.dim, scale);
        detail::svec_into(init, x.data() + slot.offset);
    }

    auto project_normalization = [&]() {
        double sum = 0.0;
        for (std::size_t k : diag_coords) sum += x[k];
        const double shift = (target - sum) / static_cast<double>(diag_coords.size());
        for (std::size_t k : diag_coords) x[k] += shift;
    };

    auto finite = [](const Vec& v) {
        for (double t : v) {
            if (!std::isfinite(t)) return false;
        }
        return true;
    };

    double best_worst = -std::numeric_limits<double>::infinity();
    int best_iter = 0;
    int iter = 0;
    bool clean_sweep = false;
    bool diverged = false;
    Vec x_prev = x;

    Vec y;
    for (iter = 1; iter <= opts.max_iter; ++iter) {
        project_normalization();
        if (!finite(x)) {
            x = x_prev;
            diverged = true;
            break;
        }
        x_prev = x;
        bool corrected = false;
        double worst = std::numeric_limits<double>::infinity();

        for (const auto& cc : compiled) {
            const std::size_t d = cc.constant.size();
            y.assign(cc.constant.begin(), cc.constant.end());
            for (std::size_t r = 0; r < d; ++r) {
                double acc = y[r];
                for (std::size_t k = 0; k < total; ++k) {
                    acc += cc.map(r, k) * x[k];
                }
                y[r] = acc;
            }
            if (!finite(y)) {
                diverged = true;
                break;
            }
            const SymEig eig = sym_eig(detail::smat(y.data(), cc.block_dim));
            worst = std::min(worst, eig.values.front() - margin);
            if (eig.values.front() < margin - slack) {
                // eigenvalue clipping up to the margin, then least-squares pullback
                SymMatrix clipped(cc.block_dim);
                for (std::size_t p = 0; p < cc.block_dim; ++p) {
                    for (std::size_t q = p; q < cc.block_dim; ++q) {
                        double acc = 0.0;
                        for (std::size_t k = 0; k < cc.block_dim; ++k) {
                            acc += std::max(eig.values[k], margin) * eig.vectors(p, k) *
                                   eig.vectors(q, k);
                        }
                        clipped.at(p, q) = acc;
                    }
                }
                Vec delta(d);
                detail::svec_into(clipped, delta.data());
                for (std::size_t r = 0; r < d; ++r) {
                    delta[r] -= y[r];
                }
                for (std::size_t k = 0; k < total; ++k) {
                    double acc = 0.0;
                    for (std::size_t r = 0; r < d; ++r) {
                        acc += cc.correction(k, r) * delta[r];
                    }
                    x[k] += opts.relaxation * acc;
                }
                corrected = true;
            }
        }

        if (diverged) {
            x = x_prev;
            break;
        }
        if (!corrected) {
            clean_sweep = true;
            break;
        }
        if (worst > best_worst + 1e-9 * scale) {
            best_worst = worst;
            best_iter = iter;
        }
        if (iter - best_iter >= opts.stall_window) {
            break;
        }
    }

    FeasibilityResult out;
    out.iterations = std::min(iter, opts.max_iter);
    for (const auto& slot : slots) {
        out.assignment.values.emplace(slot.id, detail::smat(x.data() + slot.offset, slot.dim));
    }
    out.worst_margin = verify_assignment(prob, out.assignment);

    if (clean_sweep && out.worst_margin >= 0.0) {
        out.status = FeasibilityStatus::feasible;
        out.diagnostics = "clean sweep, re-verified margin " + std::to_string(out.worst_margin);
    } else if (clean_sweep) {
        // projection said yes but the independent pass disagrees; never
        // report feasible without the gate
        out.status = FeasibilityStatus::inconclusive;
        out.diagnostics = "sweep converged but re-verification failed";
    } else if (diverged) {
        out.status = FeasibilityStatus::infeasible_evidence;
        out.diagnostics = "iterates diverged to non-finite values; heuristic evidence only";
    } else if (iter > opts.max_iter) {
        out.status = FeasibilityStatus::inconclusive;
        out.diagnostics = "iteration budget exhausted";
    } else if (best_worst < -5.0 * margin) {
        out.status = FeasibilityStatus::infeasible_evidence;
        out.diagnostics = "stalled " + std::to_string(-best_worst / scale) +
                          " (relative) below the required margin; heuristic evidence only";
    } else {
        out.status = FeasibilityStatus::inconclusive;
        out.diagnostics = "stalled near the margin";
    }
    return out;
}

inline FeasibilityResult solve_feasibility(const LMIProblem& prob, int max_iter, double tol) {
    SolveOptions opts;
    opts.max_iter = max_iter;
    opts.tol = tol;
    return solve_feasibility(prob, opts);
}

}  // namespace dwellcert
