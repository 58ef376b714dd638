#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "parobs/errors.hpp"
#include "parobs/lti.hpp"

namespace parobs {

/// Plant trajectory generated with implicit Euler on the fine grid. The
/// observer propagators consume measurements from exactly this grid, so the
/// data source and the solvers share one discretization and the discrete
/// error recursion of the observer is exact.
class PlantData {
public:
    PlantData() = default;

    static PlantData backward_euler(const LtiSystem& sys, double dt, double t_end) {
        PlantData pd;
        pd.dt_ = dt;
        const int steps = static_cast<int>(std::llround(t_end / dt));
        pd.x_.resize(sys.m(), steps + 1);
        pd.x_.col(0) = sys.x0_true;
        Matrix lhs = Matrix::Identity(sys.m(), sys.m()) - dt * sys.A;
        Eigen::PartialPivLU<Matrix> lu(lhs);
        for (int j = 0; j < steps; ++j) {
            const double tj1 = dt * static_cast<double>(j + 1);
            pd.x_.col(j + 1) = lu.solve(pd.x_.col(j) + dt * (sys.B * sys.input(tj1)));
        }
        pd.y_ = sys.C * pd.x_;
        return pd;
    }

    double dt() const { return dt_; }
    double t_end() const { return dt_ * static_cast<double>(x_.cols() - 1); }
    int samples() const { return static_cast<int>(x_.cols()); }

    int index_of(double t) const {
        const long long j = std::llround(t / dt_);
        if (j < 0 || j >= x_.cols())
            throw Error("time outside the generated data horizon");
        return static_cast<int>(j);
    }

    Vector state_at(double t) const { return x_.col(index_of(t)); }
    auto state_col(int j) const { return x_.col(j); }
    auto output_col(int j) const { return y_.col(j); }

private:
    double dt_ = 0.0;
    Matrix x_;
    Matrix y_;
};

/// Observer forcing g(t) = V^-1 (B u(t) + L y(t)) tabulated on the fine grid.
/// Both propagators read it by grid index, never by interpolation.
class ForcingGrid {
public:
    ForcingGrid() = default;

    static ForcingGrid from_plant(const ObserverDesign& design, const LtiSystem& sys,
                                  const PlantData& plant) {
        ForcingGrid fg;
        fg.dt_ = plant.dt();
        const int n = plant.samples();
        fg.g_.resize(design.D.size(), n);
        const Matrix vb = design.Vinv * sys.B;
        const Matrix vl = design.Vinv * design.L;
        for (int j = 0; j < n; ++j) {
            const double t = fg.dt_ * static_cast<double>(j);
            fg.g_.col(j) = vb * sys.input(t) + vl * plant.output_col(j);
        }
        return fg;
    }

    /// Tabulates an arbitrary closed-form forcing; test helper.
    static ForcingGrid tabulate(const std::function<Vector(double)>& g, int dim,
                                double dt, double t_end) {
        ForcingGrid fg;
        fg.dt_ = dt;
        const int steps = static_cast<int>(std::llround(t_end / dt));
        fg.g_.resize(dim, steps + 1);
        for (int j = 0; j <= steps; ++j) fg.g_.col(j) = g(dt * static_cast<double>(j));
        return fg;
    }

    static ForcingGrid zero(int dim, double dt, double t_end) {
        return tabulate([dim](double) { return Vector::Zero(dim); }, dim, dt, t_end);
    }

    double dt() const { return dt_; }

    int index_of(double t) const {
        const long long j = std::llround(t / dt_);
        if (j < 0 || j >= g_.cols())
            throw Error("time outside the tabulated forcing horizon");
        return static_cast<int>(j);
    }

    auto col(int j) const { return g_.col(j); }

private:
    double dt_ = 0.0;
    Matrix g_;
};

}  // namespace parobs
