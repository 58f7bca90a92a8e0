#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dwellcert/certify.hpp"
#include "dwellcert/eig.hpp"
#include "dwellcert/example_systems.hpp"
#include "dwellcert/verify.hpp"

using namespace dwellcert;

namespace {

SynthesisParams saddle_params() {
    SynthesisParams p;
    p.rho = 0.001;
    p.tau1 = 0.6;
    p.tau2 = 2.3;
    p.nu = 0.25;
    p.mu = 0.65;
    return p;
}

}  // namespace

TEST_CASE("fixed-mu synthesis reproduces the saddle pair certificate") {
    SwitchedLinearSystem sys = saddle_pair();
    SynthesisOutcome res = synthesize(sys, saddle_params());
    REQUIRE(res.success);
    CHECK(res.solver_status == FeasibilityStatus::feasible);
    CHECK(res.mu_used == 0.65);

    const QuadraticCertificate& cert = res.certificate;
    CHECK(cert.route == CertificateRoute::exp_switch);
    CHECK(cert.mu == 0.65);
    CHECK(cert.nu == 0.25);
    CHECK(cert.rho == 0.001);
    CHECK(cert.tau1 == 0.6);
    CHECK(cert.tau2 == 2.3);
    CHECK(cert.fingerprint == system_fingerprint(sys));
    CHECK(cert.p_minus.size() == 2);
    CHECK(cert.p_plus.size() == 2);
    CHECK(cert.overshoot >= 1.0);
    CHECK_NOTHROW(check_certificate_invariants(cert));

    for (const auto& p : cert.p_minus) CHECK(min_eig(p) > 0.0);
    for (const auto& p : cert.p_plus) CHECK(min_eig(p) > 0.0);
}

TEST_CASE("window inequality gates synthesis up front") {
    SwitchedLinearSystem sys = saddle_pair();
    SynthesisParams p = saddle_params();
    p.tau2 = 0.6 + max_window(0.65, 0.25, 0.001) + 0.01;
    SynthesisOutcome res = synthesize(sys, p);
    CHECK_FALSE(res.success);
    CHECK(res.message.find("window") != std::string::npos);
    CHECK(res.iterations == 0);
}

TEST_CASE("parameter validation rejects malformed requests") {
    SwitchedLinearSystem sys = saddle_pair();
    SynthesisParams p = saddle_params();

    p.rho = 0.0;
    CHECK_THROWS_AS(synthesize(sys, p), std::invalid_argument);
    p = saddle_params();
    p.mu = 1.0;
    CHECK_THROWS_AS(synthesize(sys, p), std::invalid_argument);
    p = saddle_params();
    p.tau2 = 0.5;
    CHECK_THROWS_AS(synthesize(sys, p), std::invalid_argument);
    p = saddle_params();
    p.route = CertificateRoute::k_relax;
    p.relaxation_steps = 0;
    CHECK_THROWS_AS(synthesize(sys, p), std::invalid_argument);
}

TEST_CASE("contraction line search brackets the optimum") {
    SwitchedLinearSystem sys = rotation_pair(0.1);
    const double pi = std::acos(-1.0);
    MuSearchResult coarse = line_search_mu(sys, 0.001, pi / 2, 1.5, CertificateRoute::exp_switch, 8, 5e-3);
    REQUIRE(coarse.success);
    CHECK(coarse.mu_hat >= 0.84);
    CHECK(coarse.mu_hat <= 0.88);
    CHECK(coarse.probes >= 2);

    MuSearchResult fine = line_search_mu(sys, 0.001, pi / 2, 1.5, CertificateRoute::exp_switch, 8, 1e-3);
    REQUIRE(fine.success);
    CHECK(fine.mu_hat <= coarse.mu_hat + 1e-12);
    CHECK(std::abs(fine.mu_hat - coarse.mu_hat) <= 5e-3 + 1e-3);
}

TEST_CASE("admissible delay combines the search with the window bound") {
    SwitchedLinearSystem sys = rotation_pair(0.1);
    const double pi = std::acos(-1.0);
    DelayResult res = max_admissible_delay(sys, 0.001, pi / 2, 1.5, CertificateRoute::exp_switch, 8, 5e-3);
    REQUIRE(res.success);
    CHECK(res.delta == Catch::Approx(max_window(res.mu_hat, 1.5, 0.001)));
    CHECK(res.delta >= 0.09);
    CHECK(res.certificate.tau2 <= res.certificate.tau1 + res.delta);
    CHECK(res.certificate.tau2 == Catch::Approx(res.certificate.tau1 + res.delta));
    CHECK_NOTHROW(check_certificate_invariants(res.certificate));

    auto report = verify_certificate(res.certificate, sys, 200);
    CHECK(report.verdict == Verdict::verified);
}

TEST_CASE("relaxation route synthesizes verifiable certificates") {
    SwitchedLinearSystem sys = saddle_pair();
    SynthesisParams p;
    p.rho = 0.001;
    p.tau1 = 0.6;
    p.tau2 = 1.4;
    p.nu = 0.25;
    p.mu = 0.8;
    p.route = CertificateRoute::k_relax;
    p.relaxation_steps = 16;
    SynthesisOutcome res = synthesize(sys, p);
    REQUIRE(res.success);

    const QuadraticCertificate& cert = res.certificate;
    CHECK(cert.route == CertificateRoute::k_relax);
    CHECK(cert.relaxation_steps == 16);
    REQUIRE(cert.chains.size() == 2);
    for (const auto& [key, chain] : cert.chains) {
        REQUIRE(chain.size() == 17);
        CHECK((chain.front().full() - cert.p_plus[key.first - 1].full()).norm_fro() <= 1e-14);
        CHECK((chain.back().full() - cert.p_minus[key.second - 1].full()).norm_fro() <= 1e-14);
        for (const auto& q : chain) CHECK(min_eig(q) > 0.0);
    }

    auto report = verify_certificate(cert, sys, 300);
    CHECK(report.verdict == Verdict::verified);
}

TEST_CASE("relaxation route is conservative at the exact feasibility edge") {
    SwitchedLinearSystem sys = saddle_pair();
    SynthesisParams p = saddle_params();
    p.route = CertificateRoute::k_relax;
    p.relaxation_steps = 8;
    SynthesisOutcome res = synthesize(sys, p);
    CHECK_FALSE(res.success);
}

TEST_CASE("single mode systems certify without switch conditions") {
    SwitchedLinearSystem sys({Matrix::from_rows({{-1.0, 0.5}, {0.0, -2.0}})});
    SynthesisParams p;
    p.rho = 0.1;
    p.tau1 = 0.5;
    p.tau2 = 0.6;
    p.nu = 0.5;
    p.mu = 0.9;
    SynthesisOutcome res = synthesize(sys, p);
    REQUIRE(res.success);
    CHECK(res.certificate.p_minus.size() == 1);
    auto report = verify_certificate(res.certificate, sys, 100);
    CHECK(report.verdict == Verdict::verified);
    CHECK(report.switch_margin == 0.0);
}

TEST_CASE("growth bound candidates cover the log norm") {
    SwitchedLinearSystem sys = rotation_pair(0.1);
    auto nus = nu_candidates(sys);
    REQUIRE_FALSE(nus.empty());
    CHECK(std::is_sorted(nus.begin(), nus.end()));

    double lognorm = -1e300;
    for (int i = 1; i <= sys.mode_count(); ++i) {
        SymMatrix s = SymMatrix::from_full(sys.mode(i));
        lognorm = std::max(lognorm, max_eig(s));
    }
    bool has_lognorm = false;
    for (double v : nus) has_lognorm = has_lognorm || std::abs(v - lognorm) <= 1e-9;
    CHECK(has_lognorm);
    bool has_grid = false;
    for (double v : nus) has_grid = has_grid || v == 1.5;
    CHECK(has_grid);
}

TEST_CASE("certificate overshoot matches the eigenvalue formula") {
    SwitchedLinearSystem sys = saddle_pair();
    SynthesisOutcome res = synthesize(sys, saddle_params());
    REQUIRE(res.success);
    double lo = 1e300, hi = -1e300;
    auto absorb = [&](const SymMatrix& p) {
        lo = std::min(lo, min_eig(p));
        hi = std::max(hi, max_eig(p));
    };
    for (const auto& p : res.certificate.p_minus) absorb(p);
    for (const auto& p : res.certificate.p_plus) absorb(p);
    CHECK(res.certificate.overshoot == Catch::Approx(std::sqrt(hi / lo)));
}
