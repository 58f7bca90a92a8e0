// dwellcert: synthesize, verify and stress-test dwell-time stability
// certificates for switched linear systems.
//
// Exit codes: 0 success / certificate verified, 1 negative verdict
// (infeasible, refuted, violations found), 2 usage or input errors.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dwellcert/dwellcert.hpp"

namespace fs = std::filesystem;
using namespace dwellcert;

namespace {

void ensure_out_dir(const std::string& dir) {
    if (dir.empty() || dir == ".") return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty()) return name;
    return (fs::path(dir) / name).string();
}

std::string sig(double v) { return format_sig(v); }

Vec parse_x0(const std::string& text, int dim) {
    Vec x;
    std::string tok;
    std::istringstream in(text);
    while (std::getline(in, tok, ',')) {
        size_t pos = 0;
        double v = std::stod(tok, &pos);
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size()) throw std::invalid_argument("bad --x0 entry '" + tok + "'");
        x.push_back(v);
    }
    if (static_cast<int>(x.size()) != dim)
        throw std::invalid_argument("--x0 has " + std::to_string(x.size()) + " entries, system dimension is " +
                                    std::to_string(dim));
    return x;
}

// "dur:mode,dur:mode,..." -> one period of a periodic switching pattern.
std::vector<std::pair<double, int>> parse_periodic(const std::string& text) {
    std::vector<std::pair<double, int>> gaps;
    std::string tok;
    std::istringstream in(text);
    while (std::getline(in, tok, ',')) {
        auto colon = tok.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("bad --periodic entry '" + tok + "', want dur:mode");
        double dur = std::stod(tok.substr(0, colon));
        int mode = std::stoi(tok.substr(colon + 1));
        gaps.emplace_back(dur, mode);
    }
    if (gaps.empty()) throw std::invalid_argument("--periodic pattern is empty");
    return gaps;
}

CertificateRoute parse_route(const std::string& name) {
    if (name == "exp") return CertificateRoute::exp_switch;
    if (name == "krelax") return CertificateRoute::k_relax;
    throw std::invalid_argument("unknown route '" + name + "' (expected exp or krelax)");
}

struct CheckTable {
    int failures = 0;
    void check(bool ok, const std::string& name, const std::string& detail) {
        std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
        if (!ok) ++failures;
    }
};

// ---------------------------------------------------------------- certify --

struct CertifyOpts {
    std::string system_path;
    std::string out_dir = ".";
    double rho = 0.0;
    double tau1 = 0.0;
    double tau2 = 0.0;
    std::optional<double> mu;
    bool search_mu = false;
    std::optional<double> nu;
    std::string route = "exp";
    int relaxation_steps = 8;
    int grid = 400;
    double mu_tolerance = 5e-3;
};

int cmd_certify(const CertifyOpts& opt) {
    SwitchedLinearSystem sys;
    CertificateRoute route;
    try {
        sys = load_system(opt.system_path);
        route = parse_route(opt.route);
        require(opt.rho > 0.0, "--rho must be positive");
        require(opt.tau1 >= 0.0 && opt.tau2 >= opt.tau1, "need 0 <= tau1 <= tau2");
        require(opt.mu.has_value() != opt.search_mu, "give exactly one of --mu or --search-mu");
        if (opt.mu) require(*opt.mu > 0.0 && *opt.mu < 1.0, "--mu must lie in (0,1)");
        require(opt.relaxation_steps >= 1, "--K must be at least 1");
        require(opt.grid >= 2, "--grid must be at least 2");
        ensure_out_dir(opt.out_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    std::vector<double> nus = opt.nu ? std::vector<double>{*opt.nu} : nu_candidates(sys);

    try {
        std::optional<QuadraticCertificate> best;
        double best_delta = -1.0;
        std::string last_message = "no feasible certificate found";

        for (double nu : nus) {
            if (opt.search_mu) {
                // Pick the nu whose best mu gives the widest admissible window.
                auto res = max_admissible_delay(sys, opt.rho, opt.tau1, nu, route, opt.relaxation_steps,
                                                opt.mu_tolerance);
                if (!res.success) {
                    last_message = res.message;
                    continue;
                }
                std::printf("nu = %s: mu_hat = %s, delta = %s\n", sig(nu).c_str(), sig(res.mu_hat).c_str(),
                            sig(res.delta).c_str());
                if (res.delta > best_delta) {
                    best_delta = res.delta;
                    best = res.certificate;
                }
            } else {
                SynthesisParams params;
                params.rho = opt.rho;
                params.tau1 = opt.tau1;
                params.tau2 = opt.tau2;
                params.nu = nu;
                params.mu = opt.mu;
                params.route = route;
                params.relaxation_steps = opt.relaxation_steps;
                auto res = synthesize(sys, params);
                if (res.success) {
                    best = res.certificate;
                    break;
                }
                last_message = res.message;
            }
        }

        if (!best) {
            std::fprintf(stderr, "certification failed: %s\n", last_message.c_str());
            return 1;
        }

        QuadraticCertificate cert = *best;
        auto report = verify_certificate(cert, sys, opt.grid);

        save_certificate(join_path(opt.out_dir, "certificate.json"), cert);
        detail::write_file(join_path(opt.out_dir, "report.json"), report_to_json(report).dump(2) + "\n");
        detail::write_file(join_path(opt.out_dir, "report.txt"), report_text(report));

        std::printf("route %s, mu = %s, nu = %s, rho = %s, window [%s, %s]\n", to_string(cert.route),
                    sig(cert.mu).c_str(), sig(cert.nu).c_str(), sig(cert.rho).c_str(), sig(cert.tau1).c_str(),
                    sig(cert.tau2).c_str());
        if (opt.search_mu)
            std::printf("max admissible window delta = %s (tau2 bound %s)\n", sig(best_delta).c_str(),
                        sig(opt.tau1 + best_delta).c_str());
        std::printf("overshoot M = %s\n", sig(cert.overshoot).c_str());
        std::printf("%s", report_text(report).c_str());

        return report.verdict == Verdict::verified ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "certification aborted: %s\n", e.what());
        return 1;
    }
}

// ----------------------------------------------------------------- verify --

struct VerifyOpts {
    std::string system_path;
    std::string cert_path;
    std::string out_dir;
    int grid = 400;
    int signals = 100;
    int states = 4;
    double horizon = 20.0;
    std::uint64_t seed = 1;
};

int cmd_verify(const VerifyOpts& opt) {
    SwitchedLinearSystem sys;
    QuadraticCertificate cert;
    try {
        sys = load_system(opt.system_path);
        cert = load_certificate(opt.cert_path);
        require(opt.grid >= 2, "--grid must be at least 2");
        require(opt.signals >= 0 && opt.states >= 1, "need --signals >= 0 and --states >= 1");
        require(opt.horizon > 0.0, "--horizon must be positive");
        ensure_out_dir(opt.out_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    if (cert.fingerprint != system_fingerprint(sys)) {
        std::fprintf(stderr, "certificate fingerprint %s does not match system fingerprint %s\n",
                     cert.fingerprint.c_str(), system_fingerprint(sys).c_str());
        return 1;
    }

    try {
        auto report = verify_certificate(cert, sys, opt.grid);
        std::printf("%s", report_text(report).c_str());

        TrajectoryCheck traj;
        if (opt.signals > 0) {
            DwellClass cls = DwellClass::strict(cert.tau1, cert.tau2 > cert.tau1 ? cert.tau2 : cert.tau1 + 1e-9);
            if (cert.tau1 == 0.0) cls.tau1 = 1e-3;  // sampling needs a positive minimum gap
            traj = trajectory_decrease_check(cert, sys, cls, opt.signals, opt.states, opt.horizon, opt.seed);
            std::printf("trajectory check: %d signals x %d states, %ld envelope / %ld chain violations\n", traj.signals,
                        traj.states, traj.envelope_violations, traj.chain_violations);
            std::printf("worst envelope ratio %s, worst chain ratio %s\n", sig(traj.worst_envelope_ratio).c_str(),
                        sig(traj.worst_chain_ratio).c_str());
        }

        if (!opt.out_dir.empty()) {
            json out = report_to_json(report);
            out["trajectory_check"] = {{"signals", traj.signals},
                                       {"states", traj.states},
                                       {"envelope_violations", traj.envelope_violations},
                                       {"chain_violations", traj.chain_violations},
                                       {"worst_envelope_ratio", traj.worst_envelope_ratio},
                                       {"worst_chain_ratio", traj.worst_chain_ratio}};
            detail::write_file(join_path(opt.out_dir, "report.json"), out.dump(2) + "\n");
            detail::write_file(join_path(opt.out_dir, "report.txt"), report_text(report));
        }

        bool ok = report.verdict == Verdict::verified && traj.total() == 0;
        return ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "verification aborted: %s\n", e.what());
        return 1;
    }
}

// --------------------------------------------------------------- simulate --

struct SimulateOpts {
    std::string system_path;
    std::string signal_path;
    std::string periodic;
    double fixed_tau = 0.0;
    bool sample = false;
    double horizon = 0.0;
    double dt = 0.0;
    std::string x0;
    std::string out_path = "trajectory.csv";
    std::string dwell_class;
    double tau1 = 0.0;
    double tau2 = 0.0;
    std::uint64_t seed = 1;
};

int cmd_simulate(const SimulateOpts& opt) {
    SwitchedLinearSystem sys;
    SwitchingSignal sig_obj;
    std::optional<DwellClass> cls;
    Vec x0;
    double dt = 0.0;
    try {
        sys = load_system(opt.system_path);
        if (!opt.dwell_class.empty()) {
            cls = opt.dwell_class == "strict"       ? DwellClass::strict(opt.tau1, opt.tau2)
                  : opt.dwell_class == "star"       ? DwellClass::star(opt.tau1, opt.tau2)
                  : opt.dwell_class == "fixed"      ? DwellClass::fixed(opt.tau1)
                  : opt.dwell_class == "pure_dwell" ? DwellClass::pure_dwell(opt.tau1)
                                                    : throw std::invalid_argument(
                                                          "unknown --class '" + opt.dwell_class + "'");
        }
        int generators = (!opt.signal_path.empty()) + (!opt.periodic.empty()) + (opt.fixed_tau > 0.0) +
                         static_cast<int>(opt.sample);
        require(generators == 1, "give exactly one of --signal, --periodic, --fixed-tau, --sample");

        if (!opt.signal_path.empty()) {
            sig_obj = load_signal(opt.signal_path);
        } else {
            require(opt.horizon > 0.0, "--horizon must be positive");
            if (opt.sample) {
                require(cls.has_value(), "--sample needs --class with its dwell parameters");
                sig_obj = sample_signal(*cls, opt.horizon, sys.mode_count(), opt.seed);
            } else if (!opt.periodic.empty()) {
                sig_obj = periodic_signal(parse_periodic(opt.periodic), opt.horizon);
            } else {
                std::vector<std::pair<double, int>> gaps;
                for (int m = 1; m <= sys.mode_count(); ++m) gaps.emplace_back(opt.fixed_tau, m);
                sig_obj = periodic_signal(gaps, opt.horizon);
            }
        }
        check_signal_structure(sig_obj, sys.mode_count());

        x0 = opt.x0.empty() ? Vec(sys.dim(), 0.0) : parse_x0(opt.x0, sys.dim());
        if (opt.x0.empty()) x0[0] = 1.0;
        dt = opt.dt > 0.0 ? opt.dt : sig_obj.horizon / 1000.0;

        ensure_out_dir(fs::path(opt.out_path).parent_path().string());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    try {
        if (cls.has_value()) {
            auto chk = validate_signal(sig_obj, *cls);
            if (!chk.valid) {
                std::fprintf(stderr, "signal violates the %s dwell class:\n", to_string(cls->variant));
                for (const auto& v : chk.violations) std::fprintf(stderr, "  %s\n", v.c_str());
                return 1;
            }
        }

        Trajectory traj = simulate(sys, sig_obj, x0, dt);
        save_trajectory_csv(opt.out_path, traj);

        double n0 = norm2(traj.states.front());
        double nT = norm2(traj.states.back());
        double rate = (n0 > 0.0 && nT > 0.0) ? std::log(nT / n0) / sig_obj.horizon : 0.0;
        std::printf("simulated %zu samples over horizon %s (%d events)\n", traj.times.size(),
                    sig(sig_obj.horizon).c_str(), static_cast<int>(sig_obj.events.size()));
        std::printf("|x(0)| = %s, |x(T)| = %s, mean growth rate %s\n", sig(n0).c_str(), sig(nT).c_str(),
                    sig(rate).c_str());
        std::printf("trajectory written to %s\n", opt.out_path.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "simulation aborted: %s\n", e.what());
        return 1;
    }
}

// ---------------------------------------------------------------- example --

int run_example_rotation(double eps, const std::string& out_dir) {
    std::printf("== two rotating stable modes (eps = %s) ==\n", sig(eps).c_str());
    SwitchedLinearSystem sys = rotation_pair(eps);
    ensure_out_dir(out_dir);
    save_system(join_path(out_dir, "system.json"), sys);

    CheckTable t;
    const double pi = std::acos(-1.0);

    // First alignment time of the slow axis: entry (2,1) of exp(A_1 t) vanishes.
    double tau_bar = zero_crossing_time(sys.mode(1), 1, 0, 1e-6, 2.0);
    t.check(std::abs(tau_bar - pi / 2) <= 1e-8, "alignment time",
            "tau_bar = " + sig(tau_bar) + ", pi/2 = " + sig(pi / 2));

    // Switching exactly at tau_bar makes the period map a pure contraction.
    Matrix period_fast = mat_exp(sys.mode(2), tau_bar) * mat_exp(sys.mode(1), tau_bar);
    double r_fast = spectral_radius(period_fast);
    double r_fast_expect = std::exp(-eps * pi);
    t.check(std::abs(r_fast - r_fast_expect) <= 1e-6 && is_schur(period_fast), "fast-switching radius",
            "rho = " + sig(r_fast) + ", exp(-eps*pi) = " + sig(r_fast_expect));

    // Dwelling past tau_bar until the flow maps the slow axis onto the fast
    // axis of the next mode (next zero of entry (1,1)) destabilizes the loop.
    double t_mis = zero_crossing_time(sys.mode(1), 0, 0, tau_bar, 3.0);
    t.check(std::abs(t_mis - 0.75 * pi) <= 1e-8, "misalignment time",
            "t = " + sig(t_mis) + ", 3*pi/4 = " + sig(0.75 * pi));
    Matrix period_slow = mat_exp(sys.mode(2), t_mis) * mat_exp(sys.mode(1), t_mis);
    double r_slow = spectral_radius(period_slow);
    double r_slow_expect = 4.0 * std::exp(-1.5 * eps * pi);
    t.check(std::abs(r_slow - r_slow_expect) <= 1e-4, "slow-switching radius",
            "rho = " + sig(r_slow) + ", 4*exp(-1.5*eps*pi) = " + sig(r_slow_expect));
    if (r_slow_expect > 1.0 + 1e-9)
        t.check(!is_schur(period_slow), "slow switching destabilizes", "rho = " + sig(r_slow) + " > 1");

    // One period of the destabilizing pattern, simulated, matches the map.
    {
        double horizon = 2.0 * t_mis;
        SwitchingSignal sig_slow = periodic_signal({{t_mis, 1}, {t_mis, 2}}, horizon);
        Vec x0{0.5, 0.0};
        Trajectory traj = simulate(sys, sig_slow, x0, horizon / 3000.0);
        save_trajectory_csv(join_path(out_dir, "trajectory_slow.csv"), traj);
        Vec mapped = matvec(period_slow, x0);
        double got = norm2(traj.states.back()) / norm2(x0);
        double want = norm2(mapped) / norm2(x0);
        t.check(std::abs(got - want) <= 1e-6 * std::abs(want), "one-period growth",
                "simulated " + sig(got) + ", period map " + sig(want));
    }

    // Certificate search: contraction factor and admissible window at rho = 0.001.
    const double rho = 1e-3, tau1 = pi / 2;
    DelayResult best;
    double best_nu = 0.0;
    for (double nu : nu_candidates(sys)) {
        auto res = max_admissible_delay(sys, rho, tau1, nu, CertificateRoute::exp_switch, 8, 5e-3);
        if (res.success && (!best.success || res.delta > best.delta)) {
            best = res;
            best_nu = nu;
        }
    }
    t.check(best.success, "certificate search", best.success ? "feasible at nu = " + sig(best_nu) : best.message);
    if (best.success) {
        std::printf("  mu_hat = %s, delta = %s, overshoot M = %s\n", sig(best.mu_hat).c_str(), sig(best.delta).c_str(),
                    sig(best.certificate.overshoot).c_str());
        if (std::abs(eps - 0.1) < 1e-12) {
            t.check(best.mu_hat >= 0.84 && best.mu_hat <= 0.88, "contraction factor bracket",
                    "mu_hat = " + sig(best.mu_hat) + ", expected in [0.84, 0.88]");
            t.check(best.delta >= 0.09, "admissible window", "delta = " + sig(best.delta) + ", expected >= 0.09");
        }
        auto report = verify_certificate(best.certificate, sys, 400);
        t.check(report.verdict == Verdict::verified, "independent verification", report_text(report));
        save_certificate(join_path(out_dir, "certificate.json"), best.certificate);
        detail::write_file(join_path(out_dir, "report.json"), report_to_json(report).dump(2) + "\n");
        detail::write_file(join_path(out_dir, "report.txt"), report_text(report));
    }

    std::printf("%s\n", t.failures == 0 ? "all checks passed" : "some checks FAILED");
    return t.failures == 0 ? 0 : 1;
}

int run_example_saddles(const std::string& out_dir) {
    std::printf("== two unstable modes stabilized by switching ==\n");
    SwitchedLinearSystem sys = saddle_pair();
    ensure_out_dir(out_dir);
    save_system(join_path(out_dir, "system.json"), sys);

    CheckTable t;
    t.check(!is_hurwitz(sys.mode(1)) && !is_hurwitz(sys.mode(2)), "modes individually unstable",
            "both modes have an eigenvalue with positive real part");

    const double rho = 1e-3, tau1 = 0.6, mu = 0.65, nu = 0.25;
    SynthesisParams params;
    params.rho = rho;
    params.tau1 = tau1;
    params.tau2 = 2.3;
    params.nu = nu;
    params.mu = mu;
    auto res = synthesize(sys, params);
    t.check(res.success, "certificate synthesis",
            res.success ? "feasible at mu = " + sig(mu) + ", nu = " + sig(nu) : res.message);
    if (!res.success) return 1;

    double bound = tau1 + max_window(mu, nu, rho);
    t.check(std::abs(bound - 2.3163) <= 1e-3, "maximum dwell bound",
            "tau1 + delta = " + sig(bound) + ", expected 2.3163 +- 1e-3");

    auto report = verify_certificate(res.certificate, sys, 400);
    t.check(report.verdict == Verdict::verified && report.grid_margin >= -1e-8, "independent verification",
            "verdict " + std::string(to_string(report.verdict)) + ", grid margin " + sig(report.grid_margin));

    save_certificate(join_path(out_dir, "certificate.json"), res.certificate);
    detail::write_file(join_path(out_dir, "report.json"), report_to_json(report).dump(2) + "\n");
    detail::write_file(join_path(out_dir, "report.txt"), report_text(report));

    // A fixed-dwell product scan inside the admissible window is contractive.
    auto scan = fixed_time_product_check(sys, 1.5, 2);
    t.check(scan.all_schur, "fixed-dwell product scan",
            "max cycle radius " + sig(scan.max_radius) + " at tau = 1.5");

    std::printf("%s\n", t.failures == 0 ? "all checks passed" : "some checks FAILED");
    return t.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dwell-time stability certificates for switched linear systems"};
    app.require_subcommand(1);

    CertifyOpts copt;
    auto* certify = app.add_subcommand("certify", "synthesize a certificate and verify it");
    certify->add_option("--system", copt.system_path, "system JSON file")->required();
    certify->add_option("--rho", copt.rho, "decay rate to certify")->required();
    certify->add_option("--tau1", copt.tau1, "minimum dwell time")->required();
    certify->add_option("--tau2", copt.tau2, "maximum dwell time (ignored with --search-mu)");
    certify->add_option("--mu", copt.mu, "fixed contraction factor in (0,1)");
    certify->add_flag("--search-mu", copt.search_mu, "line search the best contraction factor");
    certify->add_option("--nu", copt.nu, "growth bound (default: coarse grid)");
    certify->add_option("--route", copt.route, "certificate route: exp or krelax")->default_val("exp");
    certify->add_option("--K", copt.relaxation_steps, "relaxation steps for the krelax route");
    certify->add_option("--grid", copt.grid, "verification grid density");
    certify->add_option("--mu-tol", copt.mu_tolerance, "line search tolerance");
    certify->add_option("--out", copt.out_dir, "output directory");

    VerifyOpts vopt;
    auto* verify = app.add_subcommand("verify", "independently re-check a certificate");
    verify->add_option("--system", vopt.system_path, "system JSON file")->required();
    verify->add_option("--certificate", vopt.cert_path, "certificate JSON file")->required();
    verify->add_option("--grid", vopt.grid, "verification grid density");
    verify->add_option("--signals", vopt.signals, "sampled switching signals");
    verify->add_option("--states", vopt.states, "initial states per signal");
    verify->add_option("--horizon", vopt.horizon, "simulation horizon");
    verify->add_option("--seed", vopt.seed, "sampling seed");
    verify->add_option("--out", vopt.out_dir, "output directory");

    SimulateOpts sopt;
    auto* simulate = app.add_subcommand("simulate", "integrate the system under a switching signal");
    simulate->add_option("--system", sopt.system_path, "system JSON file")->required();
    simulate->add_option("--signal", sopt.signal_path, "switching signal JSON file");
    simulate->add_option("--periodic", sopt.periodic, "periodic pattern dur:mode,dur:mode,...");
    simulate->add_option("--fixed-tau", sopt.fixed_tau, "cycle all modes with this dwell time");
    simulate->add_flag("--sample", sopt.sample, "draw a random signal from --class");
    simulate->add_option("--seed", sopt.seed, "seed for --sample");
    simulate->add_option("--horizon", sopt.horizon, "horizon for generated signals");
    simulate->add_option("--dt", sopt.dt, "sample spacing (default horizon/1000)");
    simulate->add_option("--x0", sopt.x0, "initial state, comma separated (default e1)");
    simulate->add_option("--class", sopt.dwell_class, "validate against strict|star|fixed|pure_dwell");
    simulate->add_option("--tau1", sopt.tau1, "dwell class minimum gap");
    simulate->add_option("--tau2", sopt.tau2, "dwell class maximum gap");
    simulate->add_option("--out", sopt.out_path, "output CSV path");

    int which = 0;
    double ex_eps = 0.1;
    std::string ex_out;
    auto* example = app.add_subcommand("example", "run a built-in worked example");
    example->add_option("which", which, "1: rotating stable pair, 2: unstable saddle pair")->required();
    example->add_option("--eps", ex_eps, "damping for example 1");
    example->add_option("--out", ex_out, "output directory (default example<n>_out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (certify->parsed()) return cmd_certify(copt);
    if (verify->parsed()) return cmd_verify(vopt);
    if (simulate->parsed()) return cmd_simulate(sopt);
    if (example->parsed()) {
        if (which == 1) {
            if (ex_eps <= 0.0) {
                std::fprintf(stderr, "error: --eps must be positive\n");
                return 2;
            }
            return run_example_rotation(ex_eps, ex_out.empty() ? "example1_out" : ex_out);
        }
        if (which == 2) return run_example_saddles(ex_out.empty() ? "example2_out" : ex_out);
        std::fprintf(stderr, "error: unknown example %d (have 1 and 2)\n", which);
        return 2;
    }
    return 2;
}
