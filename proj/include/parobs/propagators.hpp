#pragma once

#include <cmath>

#include "parobs/data.hpp"
#include "parobs/errors.hpp"
#include "parobs/grid.hpp"
#include "parobs/lti.hpp"

namespace parobs {

namespace detail {

/// Implicit Euler steps of z' = D z + g(t) on the diagonalized observer;
/// the linear solve is a componentwise divide. Forcing is evaluated at the
/// right endpoint of each step.
inline Vector be_steps(const ObserverDesign& design, const ForcingGrid& g,
                       double t_start, int steps, double dt, Vector z) {
    const int m = static_cast<int>(z.size());
    Vector denom(m);
    for (int i = 0; i < m; ++i) {
        denom(i) = 1.0 - dt * design.D(i);
        if (denom(i) == 0.0) throw SingularStep("1 - dt*eig vanished");
    }
    const int j0 = g.index_of(t_start);
    const int stride = static_cast<int>(std::llround(dt / g.dt()));
    for (int s = 1; s <= steps; ++s) {
        z += dt * g.col(j0 + s * stride);
        z.array() /= denom.array();
    }
    return z;
}

}  // namespace detail

/// Fine propagator: implicit Euler at step dt_fine across one subinterval.
inline Vector be_fine(const ObserverDesign& design, const ForcingGrid& g,
                      const GridSpec& grid, double t_start, double t_end,
                      const Vector& z) {
    const int steps = static_cast<int>(std::llround((t_end - t_start) / grid.dt_fine));
    return detail::be_steps(design, g, t_start, steps, grid.dt_fine, z);
}

/// Coarse propagator: a single implicit Euler step over the subinterval.
inline Vector be_coarse(const ObserverDesign& design, const ForcingGrid& g,
                        const GridSpec& grid, double t_start, double t_end,
                        const Vector& z) {
    (void)t_end;
    return detail::be_steps(design, g, t_start, 1, grid.dt_coarse, z);
}

/// Constants of the a priori Parareal bound for the implicit Euler pair:
/// alpha bounds the local truncation gap, beta its Lipschitz defect, eta is
/// the common contraction factor, and M_sup / K_sup are the sampled suprema
/// of the diagonalized right-hand side and its time derivative.
struct PropagatorConstants {
    double alpha = 0.0;
    double beta = 0.0;
    double eta = 0.0;
    double M_sup = 0.0;
    double K_sup = 0.0;
};

namespace detail {

inline double fine_power_factor(double eig, double dt, double dT) {
    // (1 + dt*|eig|)^(-dT/dt), evaluated in log space.
    const double ratio = std::llround(dT / dt);
    return std::exp(-ratio * std::log1p(dt * std::abs(eig)));
}

inline double coarse_factor(double eig, double dT) {
    return 1.0 / (1.0 + dT * std::abs(eig));
}

}  // namespace detail

/// Estimates the bound constants over the given horizon. The suprema are
/// sampled: M over the whole horizon with the diagonalized state ranging in
/// a ball of twice the observed observer-trajectory radius, K over the
/// second half of the horizon, past the assimilation transient, since one
/// table of constants has to describe the recurring per-window behaviour.
/// Both sampled suprema carry a 1.1 safety factor.
inline PropagatorConstants compute_constants(const ObserverDesign& design,
                                             const LtiSystem& sys, const GridSpec& grid,
                                             double horizon, const PlantData& plant) {
    if (horizon <= 0.0 || horizon > plant.t_end() + 1e-12)
        throw Error("constants horizon not covered by the plant data");
    if (!sys.input.has_derivative())
        throw Error("input derivative required for the constant K");

    PropagatorConstants c;
    const int m = sys.m();
    double norm_d = 0.0;
    for (int i = 0; i < m; ++i) norm_d = std::max(norm_d, std::abs(design.D(i)));

    // Observer trajectory envelope: sequential fine solve over the horizon.
    const ForcingGrid g = ForcingGrid::from_plant(design, sys, plant);
    const int total_steps = static_cast<int>(std::llround(horizon / grid.dt_fine));
    double z_max = design.zhat0().norm();
    {
        Vector z = design.zhat0();
        Vector denom(m);
        for (int i = 0; i < m; ++i) denom(i) = 1.0 - grid.dt_fine * design.D(i);
        for (int s = 1; s <= total_steps; ++s) {
            z += grid.dt_fine * g.col(s);
            z.array() /= denom.array();
            z_max = std::max(z_max, z.norm());
        }
    }
    const double radius = 2.0 * z_max;

    const Matrix vb = design.Vinv * sys.B;
    const Matrix vl = design.Vinv * design.L;
    const int samples = 1000;
    double g_sup = 0.0;
    for (int s = 0; s < samples; ++s) {
        const int j = static_cast<int>((static_cast<long long>(s) * total_steps) / (samples - 1));
        const double t = grid.dt_fine * static_cast<double>(j);
        g_sup = std::max(g_sup, (vb * sys.input(t) + vl * plant.output_col(j)).norm());
    }
    c.M_sup = 1.1 * (norm_d * radius + g_sup);

    double dg_sup = 0.0;
    for (int s = 0; s < samples; ++s) {
        const int j = total_steps / 2 +
                      static_cast<int>((static_cast<long long>(s) * (total_steps / 2)) / (samples - 1));
        const double t = grid.dt_fine * static_cast<double>(j);
        // y' = C x' = C (A x + B u), exact on the data trajectory.
        const Vector ydot = sys.C * (sys.A * plant.state_col(j) + sys.B * sys.input(t));
        dg_sup = std::max(dg_sup, (vb * sys.input.derivative(t) + vl * ydot).norm());
    }
    c.K_sup = std::max(norm_d, 1.1 * dg_sup);

    if (grid.dT * c.K_sup >= 1.0)
        throw StabilityViolation("dT * K = " + std::to_string(grid.dT * c.K_sup) +
                                 " >= 1");
    c.alpha = grid.dT * grid.dT * c.K_sup * (c.M_sup + 1.0) /
              (2.0 * (1.0 - grid.dT * c.K_sup));

    c.beta = 0.0;
    c.eta = 0.0;
    for (int i = 0; i < m; ++i) {
        const double f = detail::fine_power_factor(design.D(i), grid.dt_fine, grid.dT);
        const double gf = detail::coarse_factor(design.D(i), grid.dT);
        c.beta = std::max(c.beta, std::abs(f - gf));
        c.eta = std::max(c.eta, std::max(f, gf));
    }
    if (c.eta >= 1.0) throw DivergentCoarse("contraction factor eta >= 1");
    return c;
}

/// Accumulated fine-solver error estimate over one subinterval; the additive
/// allowance used when measured quantities are compared against bounds that
/// treat the fine propagator as exact.
inline double fine_error_allowance(const PropagatorConstants& c, const GridSpec& grid) {
    return grid.dT * grid.dt_fine * c.K_sup * (c.M_sup + 1.0) /
           (2.0 * (1.0 - grid.dt_fine * c.K_sup));
}

}  // namespace parobs
