#pragma once

#include <chrono>
#include <functional>
#include <utility>
#include <vector>

#include "parobs/data.hpp"
#include "parobs/errors.hpp"
#include "parobs/grid.hpp"
#include "parobs/lti.hpp"
#include "parobs/propagators.hpp"
#include "parobs/threads.hpp"

namespace parobs {

/// One window of the time axis: [t0, t0 + grid.T] cut into grid.N subintervals.
struct Window {
    double t0 = 0.0;
    GridSpec grid;

    double node(int n) const { return t0 + grid.dT * static_cast<double>(n); }
};

/// Jump norms per iteration: entry k holds ||J_n^k|| for n = 1..N, where
/// J_n^k = U_n^k - F(t_n, t_{n-1}, U_{n-1}^k). Norms are kept both in the
/// diagonalized variables (bound checks) and mapped through V (stop rule).
struct JumpHistory {
    std::vector<std::vector<double>> z_norms;
    std::vector<std::vector<double>> x_norms;

    int iterations() const { return static_cast<int>(z_norms.size()) - 1; }
    const std::vector<double>& latest_x() const { return x_norms.back(); }
};

/// Stop rule consulted after each recorded iteration k >= 1; receives the
/// whole history so replay-style rules can inspect earlier iterations.
using StopRule = std::function<bool(const JumpHistory&)>;

/// Parareal iterates over one window. U[k] is an m x (N+1) matrix of the
/// interface values U_n^k; G_of_U[k] caches the coarse propagations of U^k
/// so each correction sweep costs one coarse pass.
struct PararealState {
    std::vector<Matrix> U;
    std::vector<Matrix> G_of_U;
    int k_current = 0;
};

/// Sequential coarse sweep U_n^0 = G(t_n, t_{n-1}, U_{n-1}^0) from z0.
inline Matrix coarse_init(const ObserverDesign& design, const ForcingGrid& g,
                          const Window& w, const Vector& z0) {
    const int n_sub = w.grid.N;
    Matrix u(z0.size(), n_sub + 1);
    u.col(0) = z0;
    for (int n = 1; n <= n_sub; ++n)
        u.col(n) = be_coarse(design, g, w.grid, w.node(n - 1), w.node(n), u.col(n - 1));
    return u;
}

inline PararealState make_parareal_state(const ObserverDesign& design,
                                         const ForcingGrid& g, const Window& w,
                                         const Vector& z0) {
    PararealState st;
    st.U.push_back(coarse_init(design, g, w, z0));
    // The init sweep is its own coarse image: G(U^0_{n-1}) = U^0_n.
    st.G_of_U.push_back(st.U[0]);
    return st;
}

namespace detail {

inline Matrix fine_sweep(const ObserverDesign& design, const ForcingGrid& g,
                         const Window& w, const Matrix& u, int workers,
                         double* seq_cost_seconds) {
    const int n_sub = w.grid.N;
    Matrix f(u.rows(), n_sub + 1);
    f.col(0) = u.col(0);
    std::vector<double> costs(n_sub, 0.0);
    parallel_for(n_sub, workers, [&](int i) {
        const int n = i + 1;
        const auto start = std::chrono::steady_clock::now();
        f.col(n) = be_fine(design, g, w.grid, w.node(n - 1), w.node(n), u.col(n - 1));
        costs[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                       .count();
    });
    if (seq_cost_seconds) {
        double total = 0.0;
        for (double c : costs) total += c;
        *seq_cost_seconds = total;
    }
    return f;
}

}  // namespace detail

/// One Parareal update: the fine sweep of the current iterate (parallel over
/// subintervals), its jumps, then the sequential coarse correction producing
/// U^{k+1}. Returns the fine sweep so callers can reuse it.
inline Matrix parareal_iteration(PararealState& st, const ObserverDesign& design,
                                 const ForcingGrid& g, const Window& w,
                                 int workers = 1) {
    const int n_sub = w.grid.N;
    const Matrix& uk = st.U[st.k_current];
    Matrix f = detail::fine_sweep(design, g, w, uk, workers, nullptr);

    Matrix next(uk.rows(), n_sub + 1);
    Matrix g_next(uk.rows(), n_sub + 1);
    next.col(0) = uk.col(0);
    for (int n = 1; n <= n_sub; ++n) {
        g_next.col(n) =
            be_coarse(design, g, w.grid, w.node(n - 1), w.node(n), next.col(n - 1));
        next.col(n) = f.col(n) + g_next.col(n) - st.G_of_U[st.k_current].col(n);
    }
    st.U.push_back(std::move(next));
    st.G_of_U.push_back(std::move(g_next));
    ++st.k_current;
    return f;
}

/// Result of one window solve: the accepted iterate, the end state handed to
/// the next window (the incoming fine value at t_N), the jump history, and
/// raw timing samples.
struct WindowResult {
    Matrix iterates;          // accepted U^{k_obs}
    Vector end_state;         // fine trajectory value at the right window edge
    JumpHistory jumps;
    int k_obs = 0;
    double fine_seq_seconds = 0.0;    // summed per-subinterval fine costs
    double coarse_seconds = 0.0;      // coarse sweeps, including the init sweep
    double wall_seconds = 0.0;
    int fine_sweeps = 0;
    int coarse_sweeps = 0;
};

/// Alg. of record: coarse init, then per iteration a parallel fine sweep,
/// jump extraction, the stop test, and a coarse correction. Iteration N
/// reproduces the sequential fine solution exactly, so the loop always
/// terminates with k_obs <= N. The stop rule is consulted from k = 1 on;
/// every window performs at least one correction.
inline WindowResult solve_window(const ObserverDesign& design, const ForcingGrid& g,
                                 const Window& w, const Vector& z0,
                                 const StopRule& stop, int workers = 1) {
    const auto wall_start = std::chrono::steady_clock::now();
    const int n_sub = w.grid.N;

    WindowResult res;
    const auto init_start = std::chrono::steady_clock::now();
    PararealState st = make_parareal_state(design, g, w, z0);
    res.coarse_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - init_start)
            .count();
    res.coarse_sweeps = 1;

    for (int k = 0; k <= n_sub; ++k) {
        double sweep_cost = 0.0;
        const Matrix fine = detail::fine_sweep(design, g, w, st.U[k], workers, &sweep_cost);
        res.fine_seq_seconds += sweep_cost;
        ++res.fine_sweeps;

        std::vector<double> zn(n_sub), xn(n_sub);
        for (int n = 1; n <= n_sub; ++n) {
            const Vector jump = st.U[k].col(n) - fine.col(n);
            zn[n - 1] = jump.norm();
            xn[n - 1] = (design.V * jump).norm();
        }
        res.jumps.z_norms.push_back(std::move(zn));
        res.jumps.x_norms.push_back(std::move(xn));

        const bool accept = (k >= 1 && stop(res.jumps)) || k == n_sub;
        if (accept) {
            res.k_obs = k;
            res.iterates = st.U[k];
            res.end_state = fine.col(n_sub);
            break;
        }

        const auto corr_start = std::chrono::steady_clock::now();
        Matrix next(z0.size(), n_sub + 1);
        Matrix g_next(z0.size(), n_sub + 1);
        next.col(0) = z0;
        for (int n = 1; n <= n_sub; ++n) {
            g_next.col(n) =
                be_coarse(design, g, w.grid, w.node(n - 1), w.node(n), next.col(n - 1));
            next.col(n) = fine.col(n) + g_next.col(n) - st.G_of_U[k].col(n);
        }
        st.U.push_back(std::move(next));
        st.G_of_U.push_back(std::move(g_next));
        ++st.k_current;
        res.coarse_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - corr_start)
                .count();
        ++res.coarse_sweeps;
    }

    if (res.iterates.size() == 0)
        throw NoConvergence("window loop exited without an accepted iterate");
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
            .count();
    return res;
}

/// Sequential fine solve across the whole window; the referent for
/// finite-termination and bound checks.
inline Matrix sequential_fine(const ObserverDesign& design, const ForcingGrid& g,
                              const Window& w, const Vector& z0) {
    const int n_sub = w.grid.N;
    Matrix u(z0.size(), n_sub + 1);
    u.col(0) = z0;
    for (int n = 1; n <= n_sub; ++n)
        u.col(n) = be_fine(design, g, w.grid, w.node(n - 1), w.node(n), u.col(n - 1));
    return u;
}

}  // namespace parobs
