#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "dwellcert/eig.hpp"
#include "dwellcert/rng.hpp"
#include "dwellcert/sdp.hpp"

using namespace dwellcert;

namespace {

// Lyapunov feasibility: find P with trace normalization, P >= margin,
// and -(A'P + PA) - I >= 0. Feasible exactly when A is Hurwitz.
LMIProblem lyapunov_problem(const Matrix& a, double target_scale = 1.0) {
    LMIProblem prob;
    const std::size_t n = a.rows();
    SymVar p = prob.declare(n, "P");
    prob.set_normalization(p, static_cast<double>(n) * 10.0 * target_scale);

    AffineSymExpr pd(n);
    pd.add_scaled_var(1.0, p);
    prob.require_psd(std::move(pd), "pd(P)");

    AffineSymExpr lyap(n);
    lyap.add_product(-2.0, a.transposed(), p, Matrix::identity(n));
    lyap.add_constant(SymMatrix::scaled_identity(n, -1.0 * target_scale));
    prob.require_psd(std::move(lyap), "lyapunov");
    return prob;
}

Matrix random_hurwitz(Rng& rng, std::size_t n) {
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = rng.uniform(-1.0, 1.0);
    SymMatrix s = SymMatrix::from_full(b);
    double shift = max_eig(s) + 0.3 + rng.uniform(0.0, 0.5);
    for (std::size_t i = 0; i < n; ++i) b(i, i) -= shift;
    return b;
}

}  // namespace

TEST_CASE("symmetric vectorization is an isometry") {
    Rng rng(31);
    for (std::size_t n : {1u, 2u, 4u}) {
        Matrix b(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) b(i, j) = rng.uniform(-2.0, 2.0);
        SymMatrix s = SymMatrix::from_full(b);

        Vec v(detail::svec_dim(n));
        detail::svec_into(s, v.data());
        double vnorm = std::sqrt(dot(v, v));
        CHECK(vnorm == Catch::Approx(s.norm_fro()).margin(1e-13));

        SymMatrix back = detail::smat(v.data(), n);
        CHECK((back.full() - s.full()).norm_fro() <= 1e-14);
    }
}

TEST_CASE("assignment verification computes the worst eigenvalue") {
    Matrix a = Matrix::from_rows({{-1.0, 0.0}, {0.0, -2.0}});
    LMIProblem prob = lyapunov_problem(a);
    Assignment asg;

    SECTION("identity satisfies the stable diagonal case") {
        asg.values[prob.vars().front().id] = SymMatrix::scaled_identity(2, 10.0);
        double margin = verify_assignment(prob, asg);
        // -(A'P+PA) - I has eigenvalues {2*10-1, 4*10-1}; P itself min 10
        CHECK(margin == Catch::Approx(10.0));
    }
    SECTION("missing variable throws") {
        CHECK_THROWS_AS(verify_assignment(prob, asg), std::invalid_argument);
    }
    SECTION("wrong dimension throws") {
        asg.values[prob.vars().front().id] = SymMatrix::scaled_identity(3, 1.0);
        CHECK_THROWS_AS(verify_assignment(prob, asg), std::invalid_argument);
    }
}

TEST_CASE("feasible Lyapunov problems are solved and verified") {
    SECTION("diagonal stable pair") {
        Matrix a = Matrix::from_rows({{-1.0, 0.0}, {0.0, -2.0}});
        LMIProblem prob = lyapunov_problem(a);
        FeasibilityResult res = solve_feasibility(prob);
        REQUIRE(res.status == FeasibilityStatus::feasible);
        CHECK(verify_assignment(prob, res.assignment) >= 0.0);
        CHECK(res.worst_margin >= 0.0);
    }
    SECTION("random Hurwitz batch") {
        Rng rng(77);
        for (int trial = 0; trial < 10; ++trial) {
            Matrix a = random_hurwitz(rng, 3);
            LMIProblem prob = lyapunov_problem(a);
            FeasibilityResult res = solve_feasibility(prob);
            INFO("trial " << trial);
            REQUIRE(res.status == FeasibilityStatus::feasible);
            CHECK(verify_assignment(prob, res.assignment) >= -1e-9);
        }
    }
}

TEST_CASE("infeasible Lyapunov demands never report feasible") {
    SECTION("scalar antistable mode") {
        Matrix a = Matrix::from_rows({{1.0}});
        LMIProblem prob = lyapunov_problem(a);
        FeasibilityResult res = solve_feasibility(prob);
        CHECK(res.status != FeasibilityStatus::feasible);
    }
    SECTION("rotation with positive divergence") {
        Matrix a = Matrix::from_rows({{0.5, -1.0}, {1.0, 0.5}});
        LMIProblem prob = lyapunov_problem(a);
        FeasibilityResult res = solve_feasibility(prob);
        CHECK(res.status != FeasibilityStatus::feasible);
        CHECK(res.status == FeasibilityStatus::infeasible_evidence);
    }
    SECTION("runaway iterates are caught, not crashed on") {
        // this antistable matrix drives the correction sweeps toward
        // overflow instead of a bounded stall
        Matrix a = Matrix::from_rows({{0.66680712501927442, 0.58027545876670961, 0.78604592683924079},
                                      {0.16802776747598802, 0.27137547953992863, -0.86219455638966958},
                                      {-0.49385469300683615, 0.28488329609620378, -0.12172981202129501}});
        LMIProblem prob = lyapunov_problem(a);
        FeasibilityResult res = solve_feasibility(prob);
        CHECK(res.status == FeasibilityStatus::infeasible_evidence);
        CHECK(res.diagnostics.find("diverged") != std::string::npos);
        for (const auto& [id, value] : res.assignment.values) {
            CHECK(value.all_finite());
        }
    }
}

TEST_CASE("solver runs are deterministic") {
    Rng rng(5);
    Matrix a = random_hurwitz(rng, 3);
    LMIProblem prob = lyapunov_problem(a);
    FeasibilityResult r1 = solve_feasibility(prob);
    FeasibilityResult r2 = solve_feasibility(prob);
    REQUIRE(r1.status == r2.status);
    CHECK(r1.iterations == r2.iterations);
    CHECK(r1.worst_margin == r2.worst_margin);
    const SymMatrix& p1 = r1.assignment.values.begin()->second;
    const SymMatrix& p2 = r2.assignment.values.begin()->second;
    CHECK((p1.full() - p2.full()).norm_fro() == 0.0);
}

TEST_CASE("feasibility status is scale invariant") {
    Matrix a = Matrix::from_rows({{-0.3, 1.0}, {-1.0, -0.3}});
    for (double scale : {1e-4, 1.0, 1e4}) {
        LMIProblem prob = lyapunov_problem(a, scale);
        FeasibilityResult res = solve_feasibility(prob);
        INFO("scale " << scale);
        CHECK(res.status == FeasibilityStatus::feasible);
    }
    Matrix bad = Matrix::from_rows({{0.5, -1.0}, {1.0, 0.5}});
    for (double scale : {1e-4, 1.0, 1e4}) {
        LMIProblem prob = lyapunov_problem(bad, scale);
        FeasibilityResult res = solve_feasibility(prob);
        INFO("scale " << scale);
        CHECK(res.status != FeasibilityStatus::feasible);
    }
}

TEST_CASE("warm starts cannot hurt convergence") {
    Rng rng(8);
    Matrix a = random_hurwitz(rng, 4);
    LMIProblem prob = lyapunov_problem(a);
    FeasibilityResult cold = solve_feasibility(prob);
    REQUIRE(cold.status == FeasibilityStatus::feasible);

    SolveOptions opts;
    opts.warm_start = cold.assignment;
    FeasibilityResult warm = solve_feasibility(prob, opts);
    CHECK(warm.status == FeasibilityStatus::feasible);
    CHECK(warm.iterations <= cold.iterations);
}

TEST_CASE("verification margin is Lipschitz in the constant term") {
    Matrix a = Matrix::from_rows({{-1.0, 0.4}, {0.0, -0.8}});
    LMIProblem prob = lyapunov_problem(a);
    FeasibilityResult res = solve_feasibility(prob);
    REQUIRE(res.status == FeasibilityStatus::feasible);
    double base = verify_assignment(prob, res.assignment);

    for (double eps : {1e-6, 1e-3, 1e-1}) {
        // same problem with the Lyapunov constant block shifted by -eps*I
        LMIProblem fresh;
        SymVar p = fresh.declare(2, "P");
        fresh.set_normalization(p, 20.0);
        AffineSymExpr pd(2);
        pd.add_scaled_var(1.0, p);
        fresh.require_psd(std::move(pd), "pd(P)");
        AffineSymExpr lyap(2);
        lyap.add_product(-2.0, a.transposed(), p, Matrix::identity(2));
        lyap.add_constant(SymMatrix::scaled_identity(2, -1.0 - eps));
        fresh.require_psd(std::move(lyap), "lyapunov");

        Assignment same;
        same.values[p.id] = res.assignment.values.begin()->second;
        double shifted = verify_assignment(fresh, same);
        CHECK(std::abs(shifted - base) <= eps + 1e-12);
    }
}

TEST_CASE("solver requires a normalization anchor") {
    LMIProblem prob;
    SymVar p = prob.declare(2, "P");
    AffineSymExpr pd(2);
    pd.add_scaled_var(1.0, p);
    prob.require_psd(std::move(pd), "pd(P)");
    CHECK_THROWS_AS(solve_feasibility(prob), std::invalid_argument);
}
