#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "parobs/bounds.hpp"
#include "parobs/data.hpp"
#include "parobs/errors.hpp"
#include "parobs/grid.hpp"
#include "parobs/lti.hpp"
#include "parobs/parareal.hpp"
#include "parobs/propagators.hpp"
#include "parobs/timing.hpp"

namespace parobs {

/// Parameters of a fixed-window assimilation run.
struct DiamondConfig {
    GridSpec grid;              // window length T, N subintervals, fine step
    double gamma_tilde = 1.0;   // parallelization error budget
    double Tol = 1e-8;          // target accuracy driving the horizons
    int M_windows = 1;          // window budget of the run
    double eps0_bound = 0.0;    // 0: use ground truth ||x(0) - xhat(0)||
    int workers = 1;
};

/// Iteration policy inside each window.
enum class IterationMode {
    a_posteriori,  // jump-based stop rule
    a_priori       // fixed iteration counts from the bound table
};

/// Rate-preserving accuracy test on the jumps of window ell (1-based):
///   gamma * sum_{n=1}^{N-1} e^{mu n dT} ||J_n|| <= gamma_tilde * e^{-mu (ell-1) T} / 2^ell.
/// Jump norms are the physical-space discontinuities of the current iterate.
inline bool stop_criterion(const std::vector<double>& x_jump_norms,
                           const ObserverDesign& design, const GridSpec& grid, int ell,
                           double gamma_tilde) {
    double lhs = 0.0;
    const int upto = std::min<int>(grid.N - 1, static_cast<int>(x_jump_norms.size()));
    for (int n = 1; n <= upto; ++n)
        lhs += std::exp(design.mu * grid.dT * static_cast<double>(n)) * x_jump_norms[n - 1];
    lhs *= design.gamma;
    const double rhs = gamma_tilde *
                       std::exp(-design.mu * grid.T * static_cast<double>(ell - 1)) *
                       std::ldexp(1.0, -ell);
    return lhs <= rhs;
}

/// Smallest k whose jump bounds 2 B_n^k already satisfy the stop criterion on
/// window ell; evaluated through stop_criterion itself so the two stay
/// definitionally consistent. Returns N when nothing smaller qualifies.
inline int a_priori_iterations(const BoundTable& table, const ObserverDesign& design,
                               const GridSpec& grid, int ell, double gamma_tilde) {
    for (int k = 0; k <= std::min(grid.N, table.k_max()); ++k) {
        std::vector<double> bounds(grid.N - 1);
        for (int n = 1; n <= grid.N - 1; ++n) bounds[n - 1] = table.jump_bound(k, n);
        if (stop_criterion(bounds, design, grid, ell, gamma_tilde)) return k;
    }
    return grid.N;
}

/// Window counts needed to push the sequential and the parallelized observer
/// error under Tol, both clamped below at one window.
struct Horizons {
    int ell_tol = 1;
    int ell_par_tol = 1;
};

inline Horizons horizon_windows(double gamma, double mu, double T, double eps0,
                                double gamma_tilde, double tol) {
    auto ceil_windows = [&](double numerator) {
        const double raw = std::ceil(std::log(gamma * numerator / tol) / (mu * T));
        return raw < 1.0 ? 1 : static_cast<int>(raw);
    };
    Horizons h;
    h.ell_tol = ceil_windows(eps0);
    h.ell_par_tol = ceil_windows(eps0 + gamma_tilde);
    return h;
}

inline Horizons horizon_windows(const ObserverDesign& design, const DiamondConfig& cfg,
                                double eps0) {
    return horizon_windows(design.gamma, design.mu, cfg.grid.T, eps0, cfg.gamma_tilde,
                           cfg.Tol);
}

/// Everything recorded about one window of the run.
struct WindowRun {
    int ell = 0;
    int k_obs = 0;
    int k_pred = 0;           // a priori count, clamped to >= 1 like the run itself
    JumpHistory jumps;
    Vector end_state_x;       // xhat_par at the right window edge
    double err_end = 0.0;     // ||x(T_ell) - xhat_par(T_ell)||, ground truth
    double bound_end = 0.0;   // gamma (eps0 + gamma_tilde) e^{-mu ell T}
    double tau_F_s = 0.0;     // mean sequential-equivalent fine sweep seconds
    double tau_G_s = 0.0;     // mean coarse sweep seconds
    double tau_p_model_s = 0.0;
    double wall_s = 0.0;
};

/// Sequential windows, Parareal inside each, plus the calibration timings the
/// efficiency report needs.
struct AssimilationTrace {
    std::vector<WindowRun> windows;
    DiamondConfig config;
    IterationMode mode = IterationMode::a_posteriori;
    double eps0 = 0.0;
    std::string eps0_source;  // "ground-truth" or "user-bound"
    Horizons horizons;
    std::vector<int> k_pred_raw;  // unclamped a priori sequence, entry i is window i+1
    PropagatorConstants constants;

    // timing calibration (median-of-5, see timing::median_seconds)
    double tau_F_cal = 0.0;  // one fine window solve
    double tau_G_cal = 0.0;  // one coarse window sweep
    double tau_s_cal = 0.0;  // sequential fine solve over ell_par_tol windows
};

namespace detail {

inline Vector plant_state_at_index(const PlantData& plant, int j) {
    return plant.state_col(j);
}

}  // namespace detail

/// Fixed-window assimilation: windows processed sequentially, each solved by
/// Parareal with either the a posteriori stop rule or the a priori iteration
/// counts; the observer state is continuous across window boundaries.
inline AssimilationTrace run_diamond(const LtiSystem& sys, const ObserverDesign& design,
                                     const DiamondConfig& cfg,
                                     IterationMode mode = IterationMode::a_posteriori) {
    sys.validate();
    AssimilationTrace trace;
    trace.config = cfg;
    trace.mode = mode;

    if (cfg.eps0_bound > 0.0) {
        trace.eps0 = cfg.eps0_bound;
        trace.eps0_source = "user-bound";
    } else {
        trace.eps0 = (sys.x0_true - design.xhat0).norm();
        trace.eps0_source = "ground-truth";
    }
    trace.horizons = horizon_windows(design, cfg, trace.eps0);

    const double horizon = cfg.grid.T * static_cast<double>(cfg.M_windows);
    const PlantData plant = PlantData::backward_euler(sys, cfg.grid.dt_fine, horizon);
    const ForcingGrid forcing = ForcingGrid::from_plant(design, sys, plant);
    trace.constants = compute_constants(design, sys, cfg.grid, horizon, plant);
    const BoundTable table(trace.constants, cfg.grid.N, cfg.grid.N);

    trace.k_pred_raw.resize(cfg.M_windows);
    Vector z = design.zhat0();
    for (int ell = 1; ell <= cfg.M_windows; ++ell) {
        Window w{cfg.grid.T * static_cast<double>(ell - 1), cfg.grid};
        const int k_raw = a_priori_iterations(table, design, cfg.grid, ell, cfg.gamma_tilde);
        const int k_pred = std::max(1, k_raw);
        trace.k_pred_raw[ell - 1] = k_raw;

        StopRule rule;
        if (mode == IterationMode::a_posteriori) {
            rule = [&, ell](const JumpHistory& h) {
                return stop_criterion(h.latest_x(), design, cfg.grid, ell,
                                      cfg.gamma_tilde);
            };
        } else {
            rule = [k_pred](const JumpHistory& h) { return h.iterations() >= k_pred; };
        }

        WindowResult res = solve_window(design, forcing, w, z, rule, cfg.workers);

        WindowRun run;
        run.ell = ell;
        run.k_obs = res.k_obs;
        run.k_pred = k_pred;
        run.jumps = std::move(res.jumps);
        run.end_state_x = design.V * res.end_state;
        run.err_end =
            (plant.state_at(w.node(cfg.grid.N)) - run.end_state_x).norm();
        run.bound_end = design.gamma * (trace.eps0 + cfg.gamma_tilde) *
                        std::exp(-design.mu * cfg.grid.T * static_cast<double>(ell));
        run.tau_F_s = res.fine_seq_seconds / static_cast<double>(res.fine_sweeps);
        run.tau_G_s = res.coarse_seconds / static_cast<double>(res.coarse_sweeps);
        run.tau_p_model_s =
            static_cast<double>(run.k_obs) *
            (run.tau_F_s / static_cast<double>(cfg.grid.N) + run.tau_G_s);
        run.wall_s = res.wall_seconds;
        trace.windows.push_back(std::move(run));

        z = res.end_state;
    }

    // Calibration for the efficiency report.
    Window w1{0.0, cfg.grid};
    const Vector z0 = design.zhat0();
    trace.tau_F_cal = timing::median_seconds(
        [&] { (void)sequential_fine(design, forcing, w1, z0); });
    trace.tau_G_cal =
        timing::median_seconds([&] { (void)coarse_init(design, forcing, w1, z0); });
    const int span = std::min(trace.horizons.ell_par_tol, cfg.M_windows);
    trace.tau_s_cal = timing::median_seconds([&] {
        Vector zz = z0;
        for (int ell = 1; ell <= span; ++ell) {
            Window w{cfg.grid.T * static_cast<double>(ell - 1), cfg.grid};
            zz = sequential_fine(design, forcing, w, zz).col(cfg.grid.N);
        }
    });
    return trace;
}

/// Efficiency numbers of a finished trace.
struct EfficiencyReport {
    double E_obs_kobs = 0.0;   // E with the observed iteration counts
    double E_obs_kth = 0.0;    // E with the a priori iteration counts
    double E_lower_bound = 0.0;
    double E0_th = 0.0;
    int ell_tol = 0;
    int ell_par_tol = 0;
    std::string mode;
};

/// Pure-form efficiency computation shared by the trace wrapper and tests.
/// tau_s is the sequential fine cost over the ell_par_tol horizon; per
/// iteration the parallel solver pays tau_F / N (fine, spread over N workers)
/// plus one coarse sweep tau_G.
inline EfficiencyReport efficiency_from(const std::vector<int>& k_obs,
                                        const std::vector<int>& k_pred,
                                        const std::vector<int>& k_pred_raw,
                                        double tau_F, double tau_G, double tau_s,
                                        int N, const Horizons& h,
                                        double tau_p_measured = 0.0) {
    if (static_cast<int>(k_obs.size()) < h.ell_par_tol ||
        static_cast<int>(k_pred.size()) < h.ell_par_tol)
        throw IncompleteTrace("trace shorter than ell_par_tol windows");
    double sum_obs = 0.0, sum_pred = 0.0, sum_raw = 0.0;
    for (int i = 0; i < h.ell_par_tol; ++i) {
        sum_obs += k_obs[i];
        sum_pred += k_pred[i];
        sum_raw += k_pred_raw[i];
    }
    const double per_iter = tau_F / static_cast<double>(N) + tau_G;
    EfficiencyReport r;
    r.ell_tol = h.ell_tol;
    r.ell_par_tol = h.ell_par_tol;
    const double tau_p_obs = tau_p_measured > 0.0 ? tau_p_measured : sum_obs * per_iter;
    r.E_obs_kobs = tau_s / (static_cast<double>(N) * tau_p_obs);
    r.E_obs_kth = tau_s / (static_cast<double>(N) * sum_pred * per_iter);
    r.E_lower_bound = static_cast<double>(h.ell_tol) * tau_F /
                      ((tau_F + static_cast<double>(N) * tau_G) * std::max(sum_raw, 1.0));
    r.E0_th = static_cast<double>(h.ell_par_tol) / std::max(sum_raw, 1.0);
    return r;
}

/// Efficiency of a trace; mode "modeled" uses the communication-free cost
/// model with calibrated tau_F / tau_G, mode "measured" divides by the summed
/// window wall-clock instead.
inline EfficiencyReport efficiency_report(const AssimilationTrace& trace,
                                          const std::string& mode = "modeled") {
    const int span = trace.horizons.ell_par_tol;
    if (static_cast<int>(trace.windows.size()) < span)
        throw IncompleteTrace("trace has " + std::to_string(trace.windows.size()) +
                              " windows, needs " + std::to_string(span));
    std::vector<int> k_obs, k_pred, k_raw;
    double tau_p_measured = 0.0;
    for (int i = 0; i < span; ++i) {
        k_obs.push_back(trace.windows[i].k_obs);
        k_pred.push_back(trace.windows[i].k_pred);
        k_raw.push_back(trace.k_pred_raw[i]);
        tau_p_measured += trace.windows[i].wall_s;
    }
    EfficiencyReport r = efficiency_from(
        k_obs, k_pred, k_raw, trace.tau_F_cal, trace.tau_G_cal, trace.tau_s_cal,
        trace.config.grid.N, trace.horizons,
        mode == "measured" ? tau_p_measured : 0.0);
    r.mode = mode;
    return r;
}

}  // namespace parobs
