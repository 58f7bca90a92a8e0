#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dwellcert/eig.hpp"
#include "dwellcert/expm.hpp"
#include "dwellcert/matrix.hpp"
#include "dwellcert/rng.hpp"

namespace dwellcert {

/// Family of mode matrices A_1..A_M. Mode indices are 1-based everywhere
/// (matching the on-disk formats); matrix entries stay 0-based.
struct SwitchedLinearSystem {
    std::vector<Matrix> modes;

    SwitchedLinearSystem() = default;

    explicit SwitchedLinearSystem(std::vector<Matrix> mode_list) : modes(std::move(mode_list)) {
        require(!modes.empty(), "SwitchedLinearSystem: at least one mode required");
        require(modes.front().square(), "SwitchedLinearSystem: modes must be square");
        const std::size_t n = modes.front().rows();
        for (const Matrix& a : modes) {
            require(a.rows() == n && a.cols() == n, "SwitchedLinearSystem: mode dimension mismatch");
            require(a.all_finite(), "SwitchedLinearSystem: non-finite mode entry");
        }
    }

    std::size_t dim() const { return modes.front().rows(); }
    int mode_count() const { return static_cast<int>(modes.size()); }

    const Matrix& mode(int index) const {
        require(index >= 1 && index <= mode_count(), "SwitchedLinearSystem: mode index out of range");
        return modes[static_cast<std::size_t>(index - 1)];
    }
};

enum class DwellVariant { strict, star, fixed, pure_dwell };

inline const char* to_string(DwellVariant v) {
    switch (v) {
        case DwellVariant::strict: return "strict";
        case DwellVariant::star: return "star";
        case DwellVariant::fixed: return "fixed";
        case DwellVariant::pure_dwell: return "pure_dwell";
    }
    return "?";
}

/// Dwell-time class parameters. For strict, every inter-switch gap (the first
/// counted from t=0) lies in [tau1, tau2]; star relaxes the first gap to only
/// an upper bound; fixed pins all gaps to one period; pure_dwell only bounds
/// gaps from below.
struct DwellClass {
    double tau1 = 0.0;
    double tau2 = 0.0;
    DwellVariant variant = DwellVariant::strict;

    static DwellClass strict(double tau1, double tau2) {
        require(tau1 >= 0.0 && tau2 >= tau1, "DwellClass: need 0 <= tau1 <= tau2");
        return {tau1, tau2, DwellVariant::strict};
    }

    static DwellClass star(double tau1, double tau2) {
        require(tau1 >= 0.0 && tau2 >= tau1, "DwellClass: need 0 <= tau1 <= tau2");
        return {tau1, tau2, DwellVariant::star};
    }

    static DwellClass fixed(double tau) {
        require(tau > 0.0, "DwellClass: fixed period must be positive");
        return {tau, tau, DwellVariant::fixed};
    }

    static DwellClass pure_dwell(double tau1) {
        require(tau1 >= 0.0, "DwellClass: tau1 must be nonnegative");
        return {tau1, std::numeric_limits<double>::infinity(), DwellVariant::pure_dwell};
    }
};

struct SwitchEvent {
    double time = 0.0;
    int mode = 1;  // mode entered at this instant
};

/// Piecewise-constant mode schedule on [0, horizon). sigma is right
/// continuous: mode_at(t) for t in [events[k].time, events[k+1].time) is
/// events[k].mode.
struct SwitchingSignal {
    int initial_mode = 1;
    std::vector<SwitchEvent> events;
    double horizon = 0.0;

    int mode_at(double t) const {
        int m = initial_mode;
        for (const SwitchEvent& e : events) {
            if (e.time <= t) {
                m = e.mode;
            } else {
                break;
            }
        }
        return m;
    }
};

/// Throws std::invalid_argument naming the offending event index when the
/// signal breaks its structural invariants. mode_count 0 skips the range
/// check on mode indices.
inline void check_signal_structure(const SwitchingSignal& sig, int mode_count = 0) {
    require(sig.horizon > 0.0 && std::isfinite(sig.horizon), "signal: horizon must be positive and finite");
    require(sig.initial_mode >= 1, "signal: initial_mode must be >= 1");
    if (mode_count > 0) {
        require(sig.initial_mode <= mode_count, "signal: initial_mode exceeds mode count");
    }
    double prev_time = 0.0;
    int prev_mode = sig.initial_mode;
    for (std::size_t k = 0; k < sig.events.size(); ++k) {
        const SwitchEvent& e = sig.events[k];
        const std::string where = "signal: event " + std::to_string(k);
        require(std::isfinite(e.time) && e.time > 0.0, where + ": time must be positive");
        require(e.time > prev_time, where + ": times must be strictly increasing");
        require(e.time < sig.horizon, where + ": time must be below the horizon");
        require(e.mode >= 1, where + ": mode must be >= 1");
        if (mode_count > 0) {
            require(e.mode <= mode_count, where + ": mode exceeds mode count");
        }
        require(e.mode != prev_mode, where + ": consecutive modes must differ");
        prev_time = e.time;
        prev_mode = e.mode;
    }
}

struct SignalCheck {
    bool valid = true;
    std::vector<std::string> violations;
};

/// Class-membership check. Structural defects throw; dwell-bound defects are
/// reported in the returned SignalCheck. Bound comparisons carry a 1e-12
/// absolute slack so signals assembled by cumulative sums do not fail on the
/// last ulp.
inline SignalCheck validate_signal(const SwitchingSignal& sig, const DwellClass& cls) {
    check_signal_structure(sig);
    SignalCheck out;
    const double slack = 1e-12;

    auto fail = [&](std::size_t k, const std::string& what) {
        out.valid = false;
        out.violations.push_back("gap " + std::to_string(k) + ": " + what);
    };

    std::vector<double> gaps;
    gaps.reserve(sig.events.size());
    double prev = 0.0;
    for (const SwitchEvent& e : sig.events) {
        gaps.push_back(e.time - prev);
        prev = e.time;
    }

    switch (cls.variant) {
        case DwellVariant::strict:
        case DwellVariant::star:
            for (std::size_t k = 0; k < gaps.size(); ++k) {
                const bool first = (k == 0);
                const bool skip_lower = first && cls.variant == DwellVariant::star;
                if (!skip_lower && gaps[k] < cls.tau1 - slack) {
                    fail(k, "below tau1");
                }
                if (gaps[k] > cls.tau2 + slack) {
                    fail(k, "above tau2");
                }
            }
            break;
        case DwellVariant::fixed: {
            for (std::size_t k = 0; k < gaps.size(); ++k) {
                if (std::abs(gaps[k] - cls.tau1) > 1e-12) {
                    fail(k, "not equal to the fixed period");
                }
            }
            const double tail = sig.horizon - prev;
            if (tail > cls.tau1 + slack) {
                out.valid = false;
                out.violations.push_back("tail: a switch is overdue before the horizon");
            }
            break;
        }
        case DwellVariant::pure_dwell:
            for (std::size_t k = 0; k < gaps.size(); ++k) {
                if (gaps[k] < cls.tau1 - slack) {
                    fail(k, "below tau1");
                }
            }
            break;
    }
    return out;
}

/// Draws a random member of the class: gap lengths uniform on [tau1, tau2]
/// (star: first gap uniform on (0, tau2]), initial mode uniform on 1..M,
/// successive modes uniform among the M-1 others. Deterministic given seed.
inline SwitchingSignal sample_signal(const DwellClass& cls, double horizon, int mode_count,
                                     std::uint64_t seed) {
    require(horizon > 0.0 && std::isfinite(horizon), "sample_signal: horizon must be positive");
    require(mode_count >= 2, "sample_signal: need at least two modes to switch between");
    require(cls.variant != DwellVariant::pure_dwell,
            "sample_signal: pure_dwell has unbounded gaps, no sampling distribution is defined");
    require(cls.tau2 > 0.0, "sample_signal: tau2 = 0 would demand infinitely many switches");

    Rng rng(seed);
    SwitchingSignal sig;
    sig.horizon = horizon;
    sig.initial_mode = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(mode_count)));

    int current = sig.initial_mode;
    double t = 0.0;
    bool first = true;
    while (true) {
        double gap;
        if (first && cls.variant == DwellVariant::star) {
            gap = cls.tau2 * (1.0 - rng.uniform());  // uniform on (0, tau2]
        } else {
            gap = rng.uniform(cls.tau1, cls.tau2);
        }
        first = false;
        t += gap;
        if (t >= horizon) break;
        int step = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(mode_count - 1)));
        int next = current + step;
        if (next > mode_count) next -= mode_count;
        sig.events.push_back({t, next});
        current = next;
    }
    return sig;
}

/// Repeats the (duration, mode) pattern from t=0 until the horizon. The first
/// entry's mode is the initial mode; each later entry opens with a switch.
/// Events landing on or past the horizon are dropped (signal invariant:
/// event times < horizon).
inline SwitchingSignal periodic_signal(const std::vector<std::pair<double, int>>& gaps,
                                       double horizon) {
    require(!gaps.empty(), "periodic_signal: empty pattern");
    require(horizon > 0.0 && std::isfinite(horizon), "periodic_signal: horizon must be positive");
    for (std::size_t k = 0; k < gaps.size(); ++k) {
        require(gaps[k].first > 0.0 && std::isfinite(gaps[k].first),
                "periodic_signal: durations must be positive");
        require(gaps[k].second >= 1, "periodic_signal: modes must be >= 1");
        const int next_mode = gaps[(k + 1) % gaps.size()].second;
        require(gaps[k].second != next_mode,
                "periodic_signal: consecutive modes repeat (wrap-around included)");
    }

    SwitchingSignal sig;
    sig.horizon = horizon;
    sig.initial_mode = gaps.front().second;
    double t = 0.0;
    const double limit = horizon - 1e-12 * std::max(1.0, horizon);
    for (std::size_t k = 0;; ++k) {
        t += gaps[k % gaps.size()].first;
        if (t >= limit) break;
        sig.events.push_back({t, gaps[(k + 1) % gaps.size()].second});
    }
    return sig;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<int> modes;  // active mode at times[k]; the final sample keeps the last mode
};

/// Exact piecewise flow: within each constant-mode segment the state advances
/// by mat_exp, segment endpoints are computed in one hop from the segment
/// start so error does not accumulate over interior samples. Samples land
/// every sample_dt plus at every switching instant and the horizon.
inline Trajectory simulate(const SwitchedLinearSystem& sys, const SwitchingSignal& sig,
                           const Vec& x0, double sample_dt) {
    check_signal_structure(sig, sys.mode_count());
    require(x0.size() == sys.dim(), "simulate: initial state dimension mismatch");
    require(sample_dt > 0.0, "simulate: sample_dt must be positive");

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    traj.modes.push_back(sig.initial_mode);

    std::map<int, Matrix> step_cache;  // e^{A_m dt} per mode
    auto step_matrix = [&](int mode) -> const Matrix& {
        auto it = step_cache.find(mode);
        if (it == step_cache.end()) {
            it = step_cache.emplace(mode, mat_exp(sys.mode(mode), sample_dt)).first;
        }
        return it->second;
    };

    double seg_start = 0.0;
    Vec seg_state = x0;
    int mode = sig.initial_mode;
    std::size_t next_event = 0;

    while (seg_start < sig.horizon) {
        const bool has_event = next_event < sig.events.size();
        const double seg_end = has_event ? sig.events[next_event].time : sig.horizon;

        // interior samples, stepped with the cached per-dt exponential
        Vec x = seg_state;
        double t = seg_start;
        while (t + sample_dt < seg_end - 1e-12 * std::max(1.0, seg_end)) {
            x = matvec(step_matrix(mode), x);
            t += sample_dt;
            traj.times.push_back(t);
            traj.states.push_back(x);
            traj.modes.push_back(mode);
        }

        // segment end in one hop from the segment start
        Vec end_state = matvec(mat_exp(sys.mode(mode), seg_end - seg_start), seg_state);
        traj.times.push_back(seg_end);
        if (has_event) {
            mode = sig.events[next_event].mode;
            ++next_event;
        }
        traj.states.push_back(end_state);
        traj.modes.push_back(mode);

        seg_state = std::move(end_state);
        seg_start = seg_end;
    }
    return traj;
}

struct ZeroCrossingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// First root of t -> (e^{At})_{row,col} in (t_min, t_max]: sign scan over
/// 10^4 intervals, then bisection to 1e-10. Indices are 0-based. Throws
/// ZeroCrossingError when no sign change is found.
inline double zero_crossing_time(const Matrix& a, std::size_t probe_row, std::size_t probe_col,
                                 double t_min, double t_max) {
    require(a.square(), "zero_crossing_time: matrix must be square");
    require(probe_row < a.rows() && probe_col < a.cols(), "zero_crossing_time: probe out of range");
    require(t_max > t_min, "zero_crossing_time: empty window");

    auto entry = [&](double t) { return mat_exp(a, t)(probe_row, probe_col); };

    const int scan = 10000;
    const double h = (t_max - t_min) / scan;
    double t_prev = t_min;
    double f_prev = entry(t_prev);
    for (int k = 1; k <= scan; ++k) {
        const double t_cur = t_min + k * h;
        const double f_cur = entry(t_cur);
        if (f_cur == 0.0) return t_cur;
        if (f_prev == 0.0 && t_prev > t_min) return t_prev;
        if (f_prev * f_cur < 0.0) {
            double lo = t_prev, hi = t_cur;
            double f_lo = f_prev;
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                const double f_mid = entry(mid);
                if (f_mid == 0.0) return mid;
                if (f_lo * f_mid < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    f_lo = f_mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        t_prev = t_cur;
        f_prev = f_cur;
    }
    throw ZeroCrossingError("zero_crossing_time: no crossing in the window");
}

}  // namespace dwellcert
