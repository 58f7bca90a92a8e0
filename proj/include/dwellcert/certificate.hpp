#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dwellcert/eig.hpp"
#include "dwellcert/lmi.hpp"
#include "dwellcert/matrix.hpp"
#include "dwellcert/system.hpp"

namespace dwellcert {

enum class CertificateRoute { exp_switch, k_relax };

inline const char* to_string(CertificateRoute r) {
    return r == CertificateRoute::exp_switch ? "exp_switch" : "k_relax";
}

/// FNV-1a over the exact bit patterns of the mode matrices, so a certificate
/// stays bound to the system it was synthesized for across JSON round-trips
/// (doubles serialize losslessly).
inline std::string system_fingerprint(const SwitchedLinearSystem& sys) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* bytes, std::size_t len) {
        const unsigned char* p = static_cast<const unsigned char*>(bytes);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::uint64_t n = sys.dim();
    const std::uint64_t m = static_cast<std::uint64_t>(sys.mode_count());
    mix(&n, sizeof n);
    mix(&m, sizeof m);
    for (const Matrix& a : sys.modes) {
        for (double v : a.data()) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            mix(&bits, sizeof bits);
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Multiple-Lyapunov-function stability certificate: per-mode pairs
/// (P_i^-, P_i^+) with the scalar parameters tying them into a decay claim at
/// rate rho over dwell times in [tau1, tau2].
struct QuadraticCertificate {
    std::string fingerprint;  // of the certified system
    double rho = 0.0;
    double tau1 = 0.0;
    double tau2 = 0.0;
    double mu = 0.0;
    double nu = 0.0;
    CertificateRoute route = CertificateRoute::exp_switch;
    int relaxation_steps = 0;  // chain length for the k_relax route
    std::vector<SymMatrix> p_minus;
    std::vector<SymMatrix> p_plus;
    // full chains including the aliased endpoints, keyed by ordered pair (i,j)
    std::map<std::pair<int, int>, std::vector<SymMatrix>> chains;
    double overshoot = 0.0;  // sqrt(max lambda_max / min lambda_min) over all P's

    int mode_count() const { return static_cast<int>(p_minus.size()); }
    std::size_t dim() const { return p_minus.empty() ? 0 : p_minus.front().dim(); }
};

/// sqrt(max_i lambda_max(P_i^+-) / min_i lambda_min(P_i^+-)): the worst
/// norm-equivalence ratio between the certificate's quadratic norms and the
/// Euclidean norm. It bounds the trajectory at switching instants; between
/// switches the envelope additionally carries the nu-growth transient factor
/// e^{max(0, nu + rho) tau1}.
inline double certificate_overshoot(const std::vector<SymMatrix>& p_minus,
                                    const std::vector<SymMatrix>& p_plus) {
    require(!p_minus.empty() && p_minus.size() == p_plus.size(),
            "certificate_overshoot: per-mode matrix lists must match");
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    auto absorb = [&](const SymMatrix& p) {
        const SymEig e = sym_eig(p);
        lo = std::min(lo, e.values.front());
        hi = std::max(hi, e.values.back());
    };
    for (const SymMatrix& p : p_minus) absorb(p);
    for (const SymMatrix& p : p_plus) absorb(p);
    require(lo > 0.0, "certificate_overshoot: matrices must be positive definite");
    return std::sqrt(hi / lo);
}

/// Structural invariants a freshly synthesized certificate must satisfy:
/// positive-definite P's, sane scalars, and the window inequality
/// ln(mu) + (tau2-tau1)(nu+rho) <= 0 (tiny slack for the case where tau2 sits
/// exactly at the computed maximum). Loaded files are allowed to violate
/// these; the verifier refutes them instead of throwing.
inline void check_certificate_invariants(const QuadraticCertificate& cert) {
    require(!cert.p_minus.empty() && cert.p_minus.size() == cert.p_plus.size(),
            "certificate: per-mode matrix lists must match");
    const std::size_t n = cert.p_minus.front().dim();
    for (const SymMatrix& p : cert.p_minus) {
        require(p.dim() == n && p.all_finite(), "certificate: malformed P^-");
        require(min_eig(p) > 0.0, "certificate: P^- not positive definite");
    }
    for (const SymMatrix& p : cert.p_plus) {
        require(p.dim() == n && p.all_finite(), "certificate: malformed P^+");
        require(min_eig(p) > 0.0, "certificate: P^+ not positive definite");
    }
    require(cert.mu > 0.0 && cert.mu < 1.0, "certificate: mu must lie in (0,1)");
    require(cert.tau1 >= 0.0 && cert.tau2 >= cert.tau1, "certificate: need 0 <= tau1 <= tau2");
    const double lhs = std::log(cert.mu) + (cert.tau2 - cert.tau1) * (cert.nu + cert.rho);
    require(lhs <= 1e-12 * (1.0 + std::abs(std::log(cert.mu))),
            "certificate: window inequality violated");
    if (cert.route == CertificateRoute::k_relax) {
        require(cert.relaxation_steps >= 1, "certificate: k_relax route needs a chain length");
    }
}

}  // namespace dwellcert
