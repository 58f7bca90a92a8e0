#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "dwellcert/example_systems.hpp"
#include "dwellcert/expm.hpp"
#include "dwellcert/lmi.hpp"
#include "dwellcert/rng.hpp"

using namespace dwellcert;

namespace {

SymMatrix random_spd(Rng& rng, std::size_t n) {
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = rng.uniform(-1.0, 1.0);
    Matrix g = b.transposed() * b + Matrix::identity(n) * 0.5;
    return SymMatrix::from_full(g);
}

}  // namespace

TEST_CASE("affine expressions evaluate term by term") {
    LMIProblem prob;
    SymVar x = prob.declare(2, "X");
    std::map<int, SymMatrix> point;
    point[x.id] = SymMatrix::from_full(Matrix::from_rows({{2.0, 1.0}, {1.0, 4.0}}));

    SECTION("constant plus scaled variable") {
        AffineSymExpr e(2);
        e.add_constant(SymMatrix::scaled_identity(2, 3.0));
        e.add_scaled_var(-2.0, x);
        SymMatrix v = e.evaluate(point);
        CHECK(v(0, 0) == Catch::Approx(3.0 - 4.0));
        CHECK(v(0, 1) == Catch::Approx(-2.0));
        CHECK(v(1, 1) == Catch::Approx(3.0 - 8.0));
    }

    SECTION("two sided product symmetrizes") {
        Matrix a = Matrix::from_rows({{0.0, 1.0}, {-1.0, 0.5}});
        AffineSymExpr e(2);
        e.add_product(1.0, a.transposed(), x, Matrix::identity(2));
        SymMatrix v = e.evaluate(point);
        Matrix p = point[x.id].full();
        Matrix expect = (a.transposed() * p + p * a) * 0.5;
        CHECK((v.full() - expect).norm_fro() <= 1e-14);
    }

    SECTION("congruence term") {
        Matrix m = Matrix::from_rows({{1.0, 2.0}, {0.0, 1.0}});
        AffineSymExpr e(2);
        e.add_congruence(1.5, m, x);
        SymMatrix v = e.evaluate(point);
        Matrix expect = (m.transposed() * point[x.id].full() * m) * 1.5;
        CHECK((v.full() - expect).norm_fro() <= 1e-14);
    }

    SECTION("missing variable in assignment throws") {
        AffineSymExpr e(2);
        LMIProblem other;
        SymVar y = other.declare(2, "Y");
        e.add_scaled_var(1.0, y);
        std::map<int, SymMatrix> empty;
        CHECK_THROWS_AS(e.evaluate(empty), std::invalid_argument);
    }
}

TEST_CASE("certificate variable layout") {
    SwitchedLinearSystem sys = saddle_pair();
    LMIProblem prob;
    CertificateVars vars = declare_certificate_vars(prob, sys);

    CHECK(vars.p_minus.size() == 2);
    CHECK(vars.p_plus.size() == 2);
    CHECK(prob.vars().size() == 4);
    CHECK(prob.has_normalization());
    CHECK(prob.normalization_var() == vars.p_minus[0].id);
    CHECK(prob.normalization_target() == Catch::Approx(2.0));
    CHECK(prob.margin() == Catch::Approx(1e-6 * 2.0 / 2.0));
    // one positive-definiteness constraint per variable
    CHECK(prob.constraints().size() == 4);
}

TEST_CASE("switch conditions encode the dwell flow") {
    SwitchedLinearSystem sys = saddle_pair();
    const double rho = 0.05, tau1 = 0.7;
    LMIProblem prob;
    CertificateVars vars = declare_certificate_vars(prob, sys);
    std::size_t before = prob.constraints().size();
    build_switch_conditions(prob, sys, vars, rho, tau1);
    REQUIRE(prob.constraints().size() == before + 2);

    Rng rng(3);
    std::map<int, SymMatrix> point;
    for (const auto& v : prob.vars()) point[v.id] = random_spd(rng, 2);

    for (int i = 1; i <= 2; ++i) {
        int j = 3 - i;
        Matrix flow = mat_exp(sys.mode(i), tau1);
        Matrix pm = point[vars.p_minus[j - 1].id].full();
        Matrix pp = point[vars.p_plus[i - 1].id].full();
        Matrix expect = pp * std::exp(-2.0 * rho * tau1) - flow.transposed() * pm * flow;
        bool found = false;
        for (const auto& c : prob.constraints()) {
            if (c.label.find("switch(i=" + std::to_string(i)) == std::string::npos) continue;
            found = true;
            SymMatrix got = c.expr.evaluate(point);
            CHECK((got.full() - expect).norm_fro() <= 1e-12 * std::max(1.0, expect.norm_fro()));
        }
        CHECK(found);
    }
}

TEST_CASE("interval conditions encode contraction and growth bounds") {
    SwitchedLinearSystem sys = rotation_pair(0.1);
    const double mu = 0.8, nu = 1.2;
    LMIProblem prob;
    CertificateVars vars = declare_certificate_vars(prob, sys);
    build_interval_conditions_lmi(prob, sys, vars, mu, nu);

    Rng rng(4);
    std::map<int, SymMatrix> point;
    for (const auto& v : prob.vars()) point[v.id] = random_spd(rng, 2);

    for (int i = 1; i <= 2; ++i) {
        Matrix pm = point[vars.p_minus[i - 1].id].full();
        Matrix pp = point[vars.p_plus[i - 1].id].full();
        Matrix a = sys.mode(i);
        Matrix contraction = pm * (mu * mu) - pp;
        Matrix growth = pp * (2.0 * nu) - a.transposed() * pp - pp * a;
        int matched = 0;
        for (const auto& c : prob.constraints()) {
            std::string tail = "(mode " + std::to_string(i) + ")";
            if (c.label == "contraction" + tail) {
                ++matched;
                CHECK((c.expr.evaluate(point).full() - contraction).norm_fro() <= 1e-13);
            } else if (c.label == "growth-bound" + tail) {
                ++matched;
                CHECK((c.expr.evaluate(point).full() - growth).norm_fro() <= 1e-13);
            }
        }
        CHECK(matched == 2);
    }
}

TEST_CASE("window inequality and the admissible window") {
    CHECK(check_window_inequality(0.65, 0.25, 0.001, 1.7));
    CHECK_FALSE(check_window_inequality(0.65, 0.25, 0.001, 1.8));
    CHECK(max_window(0.65, 0.25, 0.001) == Catch::Approx(-std::log(0.65) / 0.251));
    CHECK(max_window(0.86, 1.5, 0.001) == Catch::Approx(-std::log(0.86) / 1.501));
    CHECK(std::isinf(max_window(0.5, -0.2, 0.1)));
    CHECK(check_window_inequality(0.5, -0.2, 0.1, 1e9));
    CHECK_THROWS_AS(check_window_inequality(1.0, 0.5, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(check_window_inequality(0.5, 0.5, 0.1, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(max_window(0.0, 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("quadratic grid conditions sample the interval flow") {
    SwitchedLinearSystem sys = rotation_pair(0.1);
    const double rho = 0.01, tau1 = 0.5, tau2 = 1.1;
    LMIProblem prob;
    CertificateVars vars = declare_certificate_vars(prob, sys);
    std::size_t before = prob.constraints().size();
    build_quadratic_grid_conditions(prob, sys, vars, rho, tau1, tau2, 5);
    REQUIRE(prob.constraints().size() == before + 2 * 5);

    Rng rng(9);
    std::map<int, SymMatrix> point;
    for (const auto& v : prob.vars()) point[v.id] = random_spd(rng, 2);

    // endpoint t = tau2 - tau1 must appear on the grid
    const double window = tau2 - tau1;
    int checked = 0;
    for (const auto& c : prob.constraints()) {
        if (c.label.rfind("interval(mode 1", 0) != 0) continue;
        ++checked;
    }
    CHECK(checked == 5);

    Matrix pm = point[vars.p_minus[0].id].full();
    Matrix pp = point[vars.p_plus[0].id].full();
    for (double t : {0.0, window}) {
        Matrix flow = mat_exp(sys.mode(1), t);
        Matrix expect = pm * std::exp(-2.0 * rho * t) - flow.transposed() * pp * flow;
        bool found = false;
        std::string label = "interval(mode 1,t=" + std::to_string(t) + ")";
        for (const auto& c : prob.constraints()) {
            if (c.label != label) continue;
            found = true;
            CHECK((c.expr.evaluate(point).full() - expect).norm_fro() <= 1e-12);
        }
        CHECK(found);
    }

    SECTION("degenerate window collapses to one point per mode") {
        LMIProblem flat;
        CertificateVars fv = declare_certificate_vars(flat, sys);
        std::size_t base = flat.constraints().size();
        build_quadratic_grid_conditions(flat, sys, fv, rho, 1.0, 1.0, 7);
        CHECK(flat.constraints().size() == base + 2);
    }
}

TEST_CASE("relaxation chains interpolate the switch condition") {
    SwitchedLinearSystem sys = saddle_pair();
    const double rate = -0.05, tau1 = 0.8;
    const int steps = 4;
    LMIProblem prob;
    CertificateVars vars = declare_certificate_vars(prob, sys);
    std::size_t before = prob.constraints().size();
    auto chains = build_k_relaxation(prob, sys, vars, rate, tau1, steps);

    REQUIRE(chains.size() == 2);
    for (const auto& [key, chain] : chains) {
        REQUIRE(chain.size() == static_cast<std::size_t>(steps) + 1);
        CHECK(chain.front().id == vars.p_plus[key.first - 1].id);
        CHECK(chain.back().id == vars.p_minus[key.second - 1].id);
    }
    // interior variables: 2 chains x (steps-1), constraints: pd per interior + 2 per step per chain
    CHECK(prob.vars().size() == 4 + 2 * (steps - 1));
    CHECK(prob.constraints().size() == before + 2 * (steps - 1) + 2 * 2 * steps);

    SECTION("step constraints match the differential form") {
        Rng rng(21);
        std::map<int, SymMatrix> point;
        for (const auto& v : prob.vars()) point[v.id] = random_spd(rng, 2);
        const double slope = steps / tau1;
        const auto& chain = chains.at({1, 2});
        Matrix a = sys.mode(1);
        for (int k = 1; k <= steps; ++k) {
            Matrix qk = point[chain[k].id].full();
            Matrix qp = point[chain[k - 1].id].full();
            Matrix upper =
                qk * (2.0 * rate - slope) + qp * slope - a.transposed() * qk - qk * a;
            Matrix lower =
                qp * (2.0 * rate + slope) - qk * slope - a.transposed() * qp - qp * a;
            std::string where = "(i=1,j=2,k=" + std::to_string(k) + ")";
            int matched = 0;
            for (const auto& c : prob.constraints()) {
                if (c.label == "chain-upper" + where) {
                    ++matched;
                    CHECK((c.expr.evaluate(point).full() - upper).norm_fro() <= 1e-12);
                } else if (c.label == "chain-lower" + where) {
                    ++matched;
                    CHECK((c.expr.evaluate(point).full() - lower).norm_fro() <= 1e-12);
                }
            }
            CHECK(matched == 2);
        }
    }

    SECTION("scalar chain feasibility boundary") {
        // With a single scalar mode the fastest feasible growth per segment is
        // the linearized ratio 1 + (-2a-2rho)*seg; the exact exponential ratio
        // exceeds it and must violate the left-knot inequality.
        const double a = -1.0, rho = 0.05;
        const double seg = tau1 / steps;
        const double slope = steps / tau1;
        const double growth = -2.0 * a - 2.0 * rho;
        double q0 = 1.0;

        double q1 = q0 * (1.0 + growth * seg);
        double upper = -2.0 * a * q1 + (-2.0 * rho - slope) * q1 + slope * q0;
        double lower = -2.0 * a * q0 + (-2.0 * rho + slope) * q0 - slope * q1;
        CHECK(upper >= -1e-12);
        CHECK(lower >= -1e-12);

        double q1_exp = q0 * std::exp(growth * seg);
        double lower_exp = -2.0 * a * q0 + (-2.0 * rho + slope) * q0 - slope * q1_exp;
        CHECK(lower_exp < 0.0);
    }
}
