#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dwellcert/certificate.hpp"
#include "dwellcert/lmi.hpp"
#include "dwellcert/matrix.hpp"
#include "dwellcert/system.hpp"
#include "dwellcert/verify.hpp"
#include "dwellcert/version.hpp"

namespace dwellcert {

using json = nlohmann::json;

namespace detail {

inline json matrix_rows(const Matrix& a) {
    json rows = json::array();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < a.cols(); ++j) {
            row.push_back(a(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_rows(const json& rows, const std::string& what) {
    if (!rows.is_array() || rows.empty()) {
        throw std::runtime_error(what + ": expected a non-empty array of rows");
    }
    const std::size_t r = rows.size();
    const std::size_t c = rows.front().is_array() ? rows.front().size() : 0;
    if (c == 0) {
        throw std::runtime_error(what + ": expected arrays of numbers as rows");
    }
    Vec data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != c) {
            throw std::runtime_error(what + ": ragged rows");
        }
        for (const auto& v : row) {
            if (!v.is_number()) {
                throw std::runtime_error(what + ": non-numeric entry");
            }
            data.push_back(v.get<double>());
        }
    }
    return Matrix::from_data(r, c, std::move(data));
}

inline SymMatrix sym_from_rows(const json& rows, const std::string& what) {
    const Matrix full = matrix_from_rows(rows, what);
    if (!full.square()) {
        throw std::runtime_error(what + ": expected a square matrix");
    }
    double asym = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < full.rows(); ++i) {
        for (std::size_t j = 0; j < full.cols(); ++j) {
            asym = std::max(asym, std::abs(full(i, j) - full(j, i)));
            scale = std::max(scale, std::abs(full(i, j)));
        }
    }
    if (asym > 1e-9 * scale) {
        throw std::runtime_error(what + ": matrix is not symmetric");
    }
    return SymMatrix::from_full(full);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << content;
    if (!out) {
        throw std::runtime_error("short write to " + path);
    }
}

inline json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw std::runtime_error("invalid JSON in " + what);
    }
    return j;
}

}  // namespace detail

// ---- system files: {"n": int, "modes": [[row-major reals], ...]} ----

inline json system_to_json(const SwitchedLinearSystem& sys) {
    json j;
    j["n"] = sys.dim();
    json modes = json::array();
    for (const Matrix& a : sys.modes) {
        json flat = json::array();
        for (double v : a.data()) {
            flat.push_back(v);
        }
        modes.push_back(std::move(flat));
    }
    j["modes"] = std::move(modes);
    return j;
}

inline SwitchedLinearSystem system_from_json(const json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("modes")) {
        throw std::runtime_error("system: expected {\"n\": ..., \"modes\": [...]}");
    }
    if (!j["n"].is_number_integer() || j["n"].get<long>() < 1) {
        throw std::runtime_error("system: n must be a positive integer");
    }
    const std::size_t n = j["n"].get<std::size_t>();
    if (!j["modes"].is_array() || j["modes"].empty()) {
        throw std::runtime_error("system: modes must be a non-empty array");
    }
    std::vector<Matrix> modes;
    for (const auto& flat : j["modes"]) {
        if (!flat.is_array() || flat.size() != n * n) {
            throw std::runtime_error("system: each mode must hold n*n row-major reals");
        }
        Vec data;
        data.reserve(n * n);
        for (const auto& v : flat) {
            if (!v.is_number()) {
                throw std::runtime_error("system: non-numeric matrix entry");
            }
            data.push_back(v.get<double>());
        }
        modes.push_back(Matrix::from_data(n, n, std::move(data)));
    }
    return SwitchedLinearSystem(std::move(modes));
}

inline SwitchedLinearSystem load_system(const std::string& path) {
    return system_from_json(detail::parse_json(detail::read_file(path), path));
}

inline void save_system(const std::string& path, const SwitchedLinearSystem& sys) {
    detail::write_file(path, system_to_json(sys).dump(2) + "\n");
}

// ---- signal files: {"initial_mode": int, "events": [[t, mode], ...], "horizon": real} ----

inline json signal_to_json(const SwitchingSignal& sig) {
    json j;
    j["initial_mode"] = sig.initial_mode;
    json events = json::array();
    for (const SwitchEvent& e : sig.events) {
        events.push_back(json::array({e.time, e.mode}));
    }
    j["events"] = std::move(events);
    j["horizon"] = sig.horizon;
    return j;
}

inline SwitchingSignal signal_from_json(const json& j) {
    if (!j.is_object() || !j.contains("initial_mode") || !j.contains("events") ||
        !j.contains("horizon")) {
        throw std::runtime_error(
            "signal: expected {\"initial_mode\": ..., \"events\": [...], \"horizon\": ...}");
    }
    SwitchingSignal sig;
    if (!j["initial_mode"].is_number_integer()) {
        throw std::runtime_error("signal: initial_mode must be an integer");
    }
    sig.initial_mode = j["initial_mode"].get<int>();
    if (!j["horizon"].is_number()) {
        throw std::runtime_error("signal: horizon must be a number");
    }
    sig.horizon = j["horizon"].get<double>();
    if (!j["events"].is_array()) {
        throw std::runtime_error("signal: events must be an array");
    }
    for (const auto& e : j["events"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number_integer()) {
            throw std::runtime_error("signal: each event must be [time, mode]");
        }
        sig.events.push_back({e[0].get<double>(), e[1].get<int>()});
    }
    check_signal_structure(sig);
    return sig;
}

inline SwitchingSignal load_signal(const std::string& path) {
    return signal_from_json(detail::parse_json(detail::read_file(path), path));
}

inline void save_signal(const std::string& path, const SwitchingSignal& sig) {
    detail::write_file(path, signal_to_json(sig).dump(2) + "\n");
}

// ---- certificate files ----

inline json certificate_to_json(const QuadraticCertificate& cert) {
    json j;
    j["fingerprint"] = cert.fingerprint;
    j["rho"] = cert.rho;
    j["tau1"] = cert.tau1;
    j["tau2"] = cert.tau2;
    j["mu"] = cert.mu;
    j["nu"] = cert.nu;
    j["route"] = to_string(cert.route);
    j["relaxation_steps"] = cert.relaxation_steps;
    j["overshoot_M"] = cert.overshoot;
    json pm = json::array(), pp = json::array();
    for (const SymMatrix& p : cert.p_minus) {
        pm.push_back(detail::matrix_rows(p.full()));
    }
    for (const SymMatrix& p : cert.p_plus) {
        pp.push_back(detail::matrix_rows(p.full()));
    }
    j["P_minus"] = std::move(pm);
    j["P_plus"] = std::move(pp);
    if (!cert.chains.empty()) {
        json chains = json::array();
        for (const auto& [pair, chain] : cert.chains) {
            json entry;
            entry["i"] = pair.first;
            entry["j"] = pair.second;
            json mats = json::array();
            for (const SymMatrix& q : chain) {
                mats.push_back(detail::matrix_rows(q.full()));
            }
            entry["Q"] = std::move(mats);
            chains.push_back(std::move(entry));
        }
        j["chains"] = std::move(chains);
    }
    j["metadata"] = {{"tool", "dwellcert"},
                     {"version", version_string},
                     {"route", to_string(cert.route)}};
    return j;
}

inline QuadraticCertificate certificate_from_json(const json& j) {
    if (!j.is_object()) {
        throw std::runtime_error("certificate: expected a JSON object");
    }
    for (const char* key : {"rho", "tau1", "tau2", "mu", "nu"}) {
        if (!j.contains(key) || !j[key].is_number()) {
            throw std::runtime_error(std::string("certificate: missing numeric field ") + key);
        }
    }
    QuadraticCertificate cert;
    cert.fingerprint = j.value("fingerprint", std::string{});
    cert.rho = j["rho"].get<double>();
    cert.tau1 = j["tau1"].get<double>();
    cert.tau2 = j["tau2"].get<double>();
    cert.mu = j["mu"].get<double>();
    cert.nu = j["nu"].get<double>();
    const std::string route = j.value("route", std::string("exp_switch"));
    if (route == "exp_switch") {
        cert.route = CertificateRoute::exp_switch;
    } else if (route == "k_relax") {
        cert.route = CertificateRoute::k_relax;
    } else {
        throw std::runtime_error("certificate: unknown route " + route);
    }
    cert.relaxation_steps = j.value("relaxation_steps", 0);
    cert.overshoot = j.value("overshoot_M", 0.0);
    if (!j.contains("P_minus") || !j.contains("P_plus") || !j["P_minus"].is_array() ||
        !j["P_plus"].is_array() || j["P_minus"].size() != j["P_plus"].size() ||
        j["P_minus"].empty()) {
        throw std::runtime_error("certificate: P_minus / P_plus must be matching matrix arrays");
    }
    for (std::size_t i = 0; i < j["P_minus"].size(); ++i) {
        cert.p_minus.push_back(
            detail::sym_from_rows(j["P_minus"][i], "certificate P_minus[" + std::to_string(i) + "]"));
        cert.p_plus.push_back(
            detail::sym_from_rows(j["P_plus"][i], "certificate P_plus[" + std::to_string(i) + "]"));
    }
    if (j.contains("chains")) {
        for (const auto& entry : j["chains"]) {
            if (!entry.contains("i") || !entry.contains("j") || !entry.contains("Q")) {
                throw std::runtime_error("certificate: chain entries need i, j, Q");
            }
            std::vector<SymMatrix> chain;
            for (std::size_t k = 0; k < entry["Q"].size(); ++k) {
                chain.push_back(detail::sym_from_rows(entry["Q"][k],
                                                      "certificate chain Q[" + std::to_string(k) + "]"));
            }
            cert.chains.emplace(
                std::make_pair(entry["i"].get<int>(), entry["j"].get<int>()), std::move(chain));
        }
    }
    return cert;
}

inline QuadraticCertificate load_certificate(const std::string& path) {
    return certificate_from_json(detail::parse_json(detail::read_file(path), path));
}

inline void save_certificate(const std::string& path, const QuadraticCertificate& cert) {
    detail::write_file(path, certificate_to_json(cert).dump(2) + "\n");
}

// ---- trajectory CSV: header "t,mode,x1,...,xn" ----

inline std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "t,mode";
    const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
    for (std::size_t j = 1; j <= n; ++j) {
        out << ",x" << j;
    }
    out << "\n";
    char buf[32];
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.times[k]);
        out << buf << "," << traj.modes[k];
        for (double v : traj.states[k]) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << "," << buf;
        }
        out << "\n";
    }
    return out.str();
}

inline void save_trajectory_csv(const std::string& path, const Trajectory& traj) {
    detail::write_file(path, trajectory_csv(traj));
}

// ---- verification reports ----

inline json report_to_json(const VerificationReport& rep) {
    json j;
    j["verdict"] = to_string(rep.verdict);
    j["grid_margin"] = rep.grid_margin;
    j["switch_margin"] = rep.switch_margin;
    j["trajectory_violations"] = rep.trajectory_violations;
    j["witness"] = rep.witness;
    j["tolerance"] = rep.tolerance;
    j["fingerprint_match"] = rep.fingerprint_match;
    j["lipschitz_warning"] = rep.lipschitz_warning;
    j["max_grid_step"] = rep.max_grid_step;
    j["params"] = {{"rho", rep.rho},   {"tau1", rep.tau1}, {"tau2", rep.tau2},
                   {"mu", rep.mu},     {"nu", rep.nu},     {"grid_points", rep.grid_points},
                   {"route", rep.route}};
    return j;
}

inline std::string format_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string report_text(const VerificationReport& rep) {
    std::ostringstream out;
    out << "verdict:            " << to_string(rep.verdict) << "\n";
    out << "grid margin:        " << format_sig(rep.grid_margin) << " over " << rep.grid_points
        << " points\n";
    out << "switch margin:      " << format_sig(rep.switch_margin) << "\n";
    out << "tolerance:          " << format_sig(rep.tolerance) << "\n";
    out << "trajectory viol.:   " << rep.trajectory_violations << "\n";
    out << "fingerprint match:  " << (rep.fingerprint_match ? "yes" : "no") << "\n";
    out << "params:             rho=" << format_sig(rep.rho) << " tau1=" << format_sig(rep.tau1)
        << " tau2=" << format_sig(rep.tau2) << " mu=" << format_sig(rep.mu)
        << " nu=" << format_sig(rep.nu) << " route=" << rep.route << "\n";
    if (!rep.witness.empty()) {
        out << "witness:            " << rep.witness << "\n";
    }
    return out.str();
}

// ---- LMI problem debug dump ----

inline json problem_to_json(const LMIProblem& prob) {
    json j;
    json vars = json::array();
    for (const SymVar& v : prob.vars()) {
        vars.push_back({{"id", v.id}, {"dim", v.dim}, {"label", v.label}});
    }
    j["vars"] = std::move(vars);
    json cons = json::array();
    for (const PsdConstraint& c : prob.constraints()) {
        json jc;
        jc["label"] = c.label;
        jc["dim"] = c.expr.dim();
        jc["constant"] = detail::matrix_rows(c.expr.constant().full());
        json terms = json::array();
        for (const LinearTerm& t : c.expr.terms()) {
            terms.push_back({{"scalar", t.scalar},
                             {"var", t.var_id},
                             {"left", detail::matrix_rows(t.left)},
                             {"right", detail::matrix_rows(t.right)}});
        }
        jc["terms"] = std::move(terms);
        cons.push_back(std::move(jc));
    }
    j["constraints"] = std::move(cons);
    if (prob.has_normalization()) {
        j["normalization"] = {{"var", prob.normalization_var()},
                              {"target", prob.normalization_target()}};
    }
    j["margin"] = prob.margin();
    return j;
}

}  // namespace dwellcert
