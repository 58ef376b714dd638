#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "parobs/config.hpp"
#include "parobs/csv.hpp"
#include "parobs/diamond.hpp"
#include "parobs/errors.hpp"
#include "parobs/sysfile.hpp"
#include "parobs/timing.hpp"
#include "parobs/variable_window.hpp"

namespace parobs {

namespace fs = std::filesystem;

inline ObserverDesign make_design(const SystemSpec& spec,
                                  const std::vector<double>& eigs) {
    const Vector gain = ackermann_gain(spec.sys, eigs);
    Matrix L(gain.size(), 1);
    L.col(0) = gain;
    return decay_constants(spec.sys, L, eigs, spec.xhat0);
}

struct RunOptions {
    fs::path out_dir = "out";
    int workers = 1;
    std::string efficiency_mode = "modeled";  // "modeled" or "measured"
};

/// Record of one CLI invocation: which files were written and under what
/// conditions, echoed to runreport.txt.
struct RunReport {
    ExperimentConfig config;
    RunOptions options;
    std::vector<std::string> csv_files;
    std::vector<std::string> notes;
    double clock_resolution = 0.0;

    void add_csv(const fs::path& p) { csv_files.push_back(p.string()); }

    void write(const fs::path& dir) const {
        fs::create_directories(dir);
        std::ofstream out(dir / "runreport.txt", std::ios::binary);
        out << "experiment = " << to_string(config.experiment) << "\n"
            << "workers = " << options.workers << "\n"
            << "efficiency-mode = " << options.efficiency_mode << "\n"
            << "clock resolution [s] = " << clock_resolution << "\n"
            << "T = " << config.T << ", Tol = " << config.Tol << ", N = " << config.N
            << ", fine_divisor = " << config.fine_divisor << "\n";
        out << "csv files:\n";
        for (const auto& f : csv_files) out << "  " << f << "\n";
        if (!notes.empty()) {
            out << "notes:\n";
            for (const auto& n : notes) out << "  " << n << "\n";
        }
    }
};

namespace detail {

inline std::string sanitize_tag(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    std::string s(buf);
    for (char& c : s) {
        if (c == '-') c = 'm';
        else if (c == '.') c = 'p';
        else if (c == '+') c = '_';
    }
    return s;
}

inline std::string eig_tag(const std::vector<double>& eigs) {
    std::string s = "eigs";
    for (double e : eigs) s += "_" + sanitize_tag(e);
    return s;
}

inline SystemSpec load_system(const ExperimentConfig& cfg) {
    if (!cfg.system_file.empty()) return parse_system_file(cfg.system_file);
    return default_system_spec();
}

inline void write_windows_csv(const fs::path& path, const AssimilationTrace& trace,
                              RunReport& report) {
    CsvWriter w(path, {"ell", "k_obs", "k_pred", "err_end", "bound_end", "tau_F_s",
                       "tau_G_s", "tau_p_model_s"});
    for (const auto& run : trace.windows) {
        w.field(run.ell)
            .field(run.k_obs)
            .field(run.k_pred)
            .field(run.err_end)
            .field(run.bound_end)
            .field(run.tau_F_s)
            .field(run.tau_G_s)
            .field(run.tau_p_model_s);
        w.end_row();
    }
    report.add_csv(path);
}

inline void write_efficiency_csv(const fs::path& path,
                                 const std::vector<std::pair<std::string, double>>& rows,
                                 const EfficiencyReport& base, RunReport& report) {
    CsvWriter w(path, {"mode", "E_obs", "E_lower_bound", "E0_th", "ell_tol",
                       "ell_par_tol"});
    for (const auto& [mode, e_obs] : rows) {
        w.field(mode)
            .field(e_obs)
            .field(base.E_lower_bound)
            .field(base.E0_th)
            .field(base.ell_tol)
            .field(base.ell_par_tol);
        w.end_row();
    }
    report.add_csv(path);
}

inline void write_gnuplot(const fs::path& path, const std::string& body,
                          RunReport& report) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << "set datafile separator \",\"\nset key autotitle columnhead\n" << body;
    report.notes.push_back("gnuplot script: " + path.string());
}

struct CellResult {
    AssimilationTrace posteriori;
    AssimilationTrace a_priori;
};

inline CellResult run_cell(const SystemSpec& spec, const std::vector<double>& eigs,
                           double gamma_tilde, const GridSpec& grid, double tol,
                           int workers, int min_windows = 0) {
    const ObserverDesign design = make_design(spec, eigs);
    DiamondConfig cfg;
    cfg.grid = grid;
    cfg.gamma_tilde = gamma_tilde;
    cfg.Tol = tol;
    cfg.workers = workers;
    const double eps0 = (spec.sys.x0_true - design.xhat0).norm();
    cfg.M_windows = std::max(
        {horizon_windows(design, cfg, eps0).ell_par_tol, min_windows, 2});
    CellResult cell;
    cell.posteriori = run_diamond(spec.sys, design, cfg, IterationMode::a_posteriori);
    cell.a_priori = run_diamond(spec.sys, design, cfg, IterationMode::a_priori);
    for (std::size_t i = 0; i < cell.posteriori.windows.size(); ++i) {
        if (cell.posteriori.windows[i].k_obs > cell.posteriori.windows[i].k_pred)
            throw Error("window " + std::to_string(i + 1) +
                        ": observed iterations exceed the a priori count");
    }
    return cell;
}

}  // namespace detail

/// Iteration-count curves: for every (eigenvalue set, gamma budget) cell the
/// observed and the a priori per-window iteration counts, from two runs.
inline RunReport run_exp1(const ExperimentConfig& cfg, const RunOptions& opt) {
    RunReport report;
    report.config = cfg;
    report.options = opt;
    report.clock_resolution = timing::resolution();
    const SystemSpec spec = detail::load_system(cfg);
    const GridSpec grid(cfg.T, cfg.N, 1 << cfg.fine_divisor);

    for (const auto& eigs : cfg.eig_sets) {
        for (double gt : cfg.gamma_tilde) {
            const auto cell =
                detail::run_cell(spec, eigs, gt, grid, cfg.Tol, opt.workers);
            const std::string tag =
                detail::eig_tag(eigs) + "_g" + detail::sanitize_tag(gt);
            const fs::path dir = opt.out_dir / "exp1" / tag;

            CsvWriter w(dir / ("exp1_" + tag + ".csv"), {"ell", "k_obs", "k_pred"});
            for (const auto& run : cell.posteriori.windows) {
                w.field(run.ell).field(run.k_obs).field(run.k_pred);
                w.end_row();
            }
            report.add_csv(w.path());
            detail::write_windows_csv(dir / "windows.csv", cell.posteriori, report);
            detail::write_windows_csv(dir / "windows_a_priori.csv", cell.a_priori,
                                      report);
            detail::write_gnuplot(
                dir / ("fig_exp1_" + tag + ".gp"),
                "set xlabel \"window\"\nset ylabel \"parareal iterations\"\n"
                "plot \"exp1_" + tag + ".csv\" using 1:2 with steps, \\\n"
                "     \"\" using 1:3 with steps\n",
                report);
        }
    }
    report.write(opt.out_dir / "exp1");
    return report;
}

/// Efficiency sweeps over the budget gamma_tilde, the processor count N and
/// the fine step. Sweep points whose truncation constants violate dT*K < 1
/// are skipped and listed in the run report.
inline RunReport run_exp2(const ExperimentConfig& cfg, const RunOptions& opt) {
    RunReport report;
    report.config = cfg;
    report.options = opt;
    report.clock_resolution = timing::resolution();
    const SystemSpec spec = detail::load_system(cfg);

    struct SweepPoint {
        std::string axis;
        double axis_value;
        double gamma_tilde;
        int N;
        int divisor;
    };
    std::vector<SweepPoint> points;
    for (double gt : cfg.gamma_tilde)
        points.push_back({"gamma", gt, gt, cfg.N, cfg.fine_divisor});
    for (int n : cfg.N_list)
        points.push_back({"N", static_cast<double>(n), cfg.gamma_tilde_base, n,
                          cfg.fine_divisor});
    for (int d : cfg.fine_divisors)
        points.push_back({"dt", static_cast<double>(d), cfg.gamma_tilde_base, cfg.N, d});

    for (const auto& eigs : cfg.eig_sets) {
        const std::string etag = detail::eig_tag(eigs);
        std::map<std::string, std::vector<std::vector<double>>> summaries;
        for (const auto& pt : points) {
            const GridSpec grid(cfg.T, pt.N, 1 << pt.divisor);
            const std::string tag = etag + "_" + pt.axis + detail::sanitize_tag(pt.axis_value);
            const fs::path dir = opt.out_dir / "exp2" / tag;
            detail::CellResult cell;
            try {
                cell = detail::run_cell(spec, eigs, pt.gamma_tilde, grid, cfg.Tol,
                                        opt.workers);
            } catch (const StabilityViolation& e) {
                report.notes.push_back("skipped " + tag + ": " + e.what());
                continue;
            }
            const EfficiencyReport modeled =
                efficiency_report(cell.posteriori, "modeled");
            std::vector<std::pair<std::string, double>> rows = {
                {"modeled_kobs", modeled.E_obs_kobs},
                {"modeled_kth", modeled.E_obs_kth}};
            if (opt.efficiency_mode == "measured") {
                rows.emplace_back(
                    "measured_kobs",
                    efficiency_report(cell.posteriori, "measured").E_obs_kobs);
                rows.emplace_back(
                    "measured_kth",
                    efficiency_report(cell.a_priori, "measured").E_obs_kobs);
            }
            detail::write_efficiency_csv(dir / "efficiency.csv", rows, modeled, report);
            detail::write_windows_csv(dir / "windows.csv", cell.posteriori, report);
            summaries[pt.axis].push_back({pt.axis_value, modeled.E_obs_kobs,
                                          modeled.E_obs_kth, modeled.E0_th,
                                          modeled.E_lower_bound});
        }
        for (const auto& [axis, rows] : summaries) {
            CsvWriter w(opt.out_dir / "exp2" / ("sweep_" + axis + "_" + etag + ".csv"),
                        {axis, "E_obs_kobs", "E_obs_kth", "E0_th", "E_lower_bound"});
            for (const auto& r : rows) {
                for (double v : r) w.field(v);
                w.end_row();
            }
            report.add_csv(w.path());
            detail::write_gnuplot(
                opt.out_dir / "exp2" / ("fig_exp2_" + axis + "_" + etag + ".gp"),
                "set xlabel \"" + axis + "\"\nset ylabel \"efficiency\"\n" +
                    std::string(axis == "N" ? "" : "set logscale x\n") +
                    "plot \"sweep_" + axis + "_" + etag +
                    ".csv\" using 1:2 with linespoints, \\\n     \"\" using 1:3 with "
                    "linespoints, \\\n     \"\" using 1:4 with linespoints\n",
                report);
        }
    }
    report.write(opt.out_dir / "exp2");
    return report;
}

/// Cumulative iteration step functions; used to compare the two strategies.
struct CumulativeCurve {
    std::vector<double> t;       // window right boundaries
    std::vector<long long> cum;  // iterations completed by that time

    long long value_at(double time) const {
        long long v = 0;
        for (std::size_t i = 0; i < t.size() && t[i] <= time + 1e-12; ++i) v = cum[i];
        return v;
    }
    double end_time() const { return t.empty() ? 0.0 : t.back(); }
};

inline CumulativeCurve vw_cumulative(const VwTrace& trace) {
    CumulativeCurve c;
    long long total = 0;
    for (const auto& w : trace.windows) {
        total += w.schedule.ell;
        c.t.push_back(w.schedule.Tprime);
        c.cum.push_back(total);
    }
    return c;
}

/// A priori iteration counts of the fixed-window strategy accumulated over
/// [0, t_end]; pure bound-table arithmetic, no run needed.
inline CumulativeCurve diamond_kth_cumulative(const ObserverDesign& design,
                                              const GridSpec& grid,
                                              const PropagatorConstants& constants,
                                              double gamma_tilde, double t_end) {
    const BoundTable table(constants, grid.N, grid.N);
    CumulativeCurve c;
    long long total = 0;
    const int windows = static_cast<int>(std::ceil(t_end / grid.T));
    for (int ell = 1; ell <= windows; ++ell) {
        total += std::max(1, a_priori_iterations(table, design, grid, ell, gamma_tilde));
        c.t.push_back(grid.T * static_cast<double>(ell));
        c.cum.push_back(total);
    }
    return c;
}

/// Variable-window experiment: the schedule, the assimilation errors, the
/// cumulative-iteration comparison against the fixed-window a priori counts,
/// and both modeled efficiencies.
inline RunReport run_vw(const ExperimentConfig& cfg, const RunOptions& opt) {
    RunReport report;
    report.config = cfg;
    report.options = opt;
    report.clock_resolution = timing::resolution();
    SystemSpec spec = detail::load_system(cfg);
    spec.eigs = cfg.vw_eigs;
    const ObserverDesign design = make_design(spec, cfg.vw_eigs);

    VwConfig vw;
    vw.dT = cfg.vw_dT;
    vw.fine_steps_per_subinterval = 1 << cfg.fine_divisor;
    vw.gamma_tilde = cfg.gamma_tilde.front();
    vw.Tol = cfg.Tol;
    vw.M_windows = cfg.M_windows;
    vw.N_cap = cfg.N_cap;
    vw.workers = opt.workers;
    const VwTrace trace = run_variable_window(spec.sys, design, vw);

    const fs::path dir = opt.out_dir / "vw";
    {
        CsvWriter w(dir / "vw_schedule.csv", {"ell", "N_ell", "Tprime_ell", "cap_hit",
                                              "err_end", "bound_end"});
        for (const auto& run : trace.windows) {
            w.field(run.schedule.ell)
                .field(run.schedule.N_ell)
                .field(run.schedule.Tprime)
                .field(run.schedule.cap_hit)
                .field(run.err_end)
                .field(run.bound_end);
            w.end_row();
        }
        report.add_csv(w.path());
    }

    // Fixed-window comparator on the same subinterval length: T = N dT.
    const GridSpec dgrid(cfg.vw_dT * cfg.N, cfg.N, 1 << cfg.fine_divisor);
    const CumulativeCurve vw_curve = vw_cumulative(trace);
    const CumulativeCurve th_curve = diamond_kth_cumulative(
        design, dgrid, trace.constants, vw.gamma_tilde, vw_curve.end_time());
    {
        CsvWriter w(dir / "vw_cumulative.csv", {"t", "cum_k_vw", "cum_k_th"});
        std::vector<double> ts;
        ts.insert(ts.end(), vw_curve.t.begin(), vw_curve.t.end());
        ts.insert(ts.end(), th_curve.t.begin(), th_curve.t.end());
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        const double t_max = std::min(vw_curve.end_time(), th_curve.end_time());
        for (double t : ts) {
            if (t > t_max + 1e-12) break;
            w.field(t).field(vw_curve.value_at(t)).field(th_curve.value_at(t));
            w.end_row();
        }
        report.add_csv(w.path());
    }

    // Efficiencies: the variable-window model and the fixed-window comparator
    // over the same horizon.
    const VwEfficiency evw = vw_efficiency(trace);
    double e_th = 0.0;
    {
        const double tau_F_win = trace.tau_F_sub_cal * static_cast<double>(cfg.N);
        const double tau_G_win = trace.tau_G_step_cal * static_cast<double>(cfg.N);
        const double per_iter = tau_F_win / static_cast<double>(cfg.N) + tau_G_win;
        const double tau_p =
            static_cast<double>(th_curve.cum.back()) * per_iter;
        e_th = evw.tau_s / (static_cast<double>(cfg.N) * tau_p);
    }
    {
        CsvWriter w(dir / "efficiency.csv", {"mode", "E_obs", "E_lower_bound", "E0_th",
                                             "ell_tol", "ell_par_tol"});
        const Horizons h = horizon_windows(design.gamma, design.mu, dgrid.T,
                                           (spec.sys.x0_true - design.xhat0).norm(),
                                           vw.gamma_tilde, vw.Tol);
        w.field(std::string("modeled_kvw")).field(evw.E_vw).field(0.0).field(0.0)
            .field(h.ell_tol).field(h.ell_par_tol);
        w.end_row();
        w.field(std::string("modeled_kth")).field(e_th).field(0.0).field(0.0)
            .field(h.ell_tol).field(h.ell_par_tol);
        w.end_row();
        report.add_csv(w.path());
    }
    detail::write_gnuplot(dir / "fig_vw_cumulative.gp",
                          "set xlabel \"t\"\nset ylabel \"cumulative iterations\"\n"
                          "plot \"vw_cumulative.csv\" using 1:2 with steps, \\\n"
                          "     \"\" using 1:3 with steps\n",
                          report);
    detail::write_gnuplot(dir / "fig_vw_schedule.gp",
                          "set xlabel \"window\"\nset ylabel \"N_ell\"\n"
                          "plot \"vw_schedule.csv\" using 1:2 with steps\n",
                          report);
    report.write(dir);
    return report;
}

inline RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    switch (cfg.experiment) {
        case Experiment::exp1_kcurves: return run_exp1(cfg, opt);
        case Experiment::exp2_efficiency: return run_exp2(cfg, opt);
        case Experiment::vw_compare: return run_vw(cfg, opt);
    }
    throw Error("unreachable experiment kind");
}

}  // namespace parobs
