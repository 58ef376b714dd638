#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "parobs/errors.hpp"
#include "parobs/linalg.hpp"
#include "parobs/signal.hpp"

namespace parobs {

/// Continuous LTI plant  x' = A x + B u(t),  y = C x.
struct LtiSystem {
    Matrix A;  // m x m
    Matrix B;  // m x p
    Matrix C;  // q x m
    Signal input;
    Vector x0_true;  // ground truth initial state, used only by the harness

    int m() const { return static_cast<int>(A.rows()); }
    int p() const { return static_cast<int>(B.cols()); }
    int q() const { return static_cast<int>(C.rows()); }

    void validate() const {
        if (A.rows() != A.cols()) throw UnsupportedShape("A must be square");
        if (B.rows() != A.rows()) throw UnsupportedShape("B row count != m");
        if (C.cols() != A.rows()) throw UnsupportedShape("C column count != m");
        if (p() >= m() || q() >= m())
            throw UnsupportedShape("expected p, q < m");
        if (x0_true.size() != A.rows())
            throw UnsupportedShape("x0_true length != m");
    }
};

/// Stacked observability matrix [C; CA; ...; CA^{m-1}], (q*m) x m.
inline Matrix observability_matrix(const LtiSystem& sys) {
    const int m = sys.m();
    const int q = sys.q();
    Matrix obs(q * m, m);
    Matrix block = sys.C;
    for (int i = 0; i < m; ++i) {
        obs.middleRows(i * q, q) = block;
        block = block * sys.A;
    }
    return obs;
}

/// Rank test on the observability matrix; singular values below
/// 1e-10 * sigma_max count as zero.
inline bool is_observable(const LtiSystem& sys) {
    return rank2(observability_matrix(sys), 1e-10) == sys.m();
}

/// Single-output observer gain placing the spectrum of A - L C at the given
/// (real, distinct, negative) values:  L = phi(A) * Obs^{-1} * e_m.
inline Vector ackermann_gain(const LtiSystem& sys, const std::vector<double>& eigs) {
    if (sys.q() != 1)
        throw UnsupportedShape("gain placement implemented for q = 1 only");
    const int m = sys.m();
    if (static_cast<int>(eigs.size()) != m)
        throw UnsupportedShape("need exactly m target eigenvalues");
    for (std::size_t i = 0; i < eigs.size(); ++i) {
        if (eigs[i] >= 0.0)
            throw UnsupportedShape("target eigenvalues must be negative");
        for (std::size_t j = i + 1; j < eigs.size(); ++j)
            if (eigs[i] == eigs[j])
                throw UnsupportedShape("target eigenvalues must be distinct");
    }
    Matrix obs = observability_matrix(sys);
    if (rank2(obs, 1e-10) != m)
        throw NotObservable("observability matrix is rank deficient");

    Matrix phi = Matrix::Identity(m, m);
    for (double mu : eigs) phi = phi * (sys.A - mu * Matrix::Identity(m, m));

    Vector em = Vector::Zero(m);
    em(m - 1) = 1.0;
    Vector w = obs.partialPivLu().solve(em);
    return phi * w;
}

/// Observer gain plus everything the decay estimate of the error needs:
/// the eigenbasis V of A - L C, its conditioning gamma, and the slowest
/// decay rate mu.
struct ObserverDesign {
    Matrix L;                   // m x q
    std::vector<double> eigs;   // placed spectrum, real negative distinct
    double mu = 0.0;            // min |eig|
    double gamma = 1.0;         // ||V|| * ||V^-1||
    Matrix V;                   // unit-norm eigenvector columns
    Matrix Vinv;
    Vector D;                   // diagonal of V^-1 (A - L C) V
    Vector xhat0;               // observer initial guess

    Matrix closed_loop() const { return V * D.asDiagonal() * Vinv; }
    Vector zhat0() const { return Vinv * xhat0; }
};

/// Builds the ObserverDesign for a placed gain. Eigenvectors come from
/// null-space solves of (A - L C - eig_i I); the spectrum is prescribed, so
/// no general eigensolver is involved. Columns are unit 2-norm with first
/// nonzero component positive, which pins gamma across platforms.
inline ObserverDesign decay_constants(const LtiSystem& sys, const Matrix& L,
                                      const std::vector<double>& eigs,
                                      Vector xhat0 = Vector()) {
    const int m = sys.m();
    ObserverDesign d;
    d.L = L;
    d.eigs = eigs;
    d.xhat0 = xhat0.size() ? std::move(xhat0) : Vector::Zero(m);

    Matrix closed = sys.A - L * sys.C;
    const double scale = std::max(norm2(closed), 1e-300);
    d.V.resize(m, m);
    d.D.resize(m);
    d.mu = std::abs(eigs[0]);
    for (int i = 0; i < m; ++i) {
        if (eigs[i] >= 0.0)
            throw DegenerateEigenvector("eigenvalues must be negative");
        d.D(i) = eigs[i];
        d.mu = std::min(d.mu, std::abs(eigs[i]));
        Matrix shifted = closed - eigs[i] * Matrix::Identity(m, m);
        Vector v = unit_kernel_vector(shifted);
        if ((shifted * v).norm() > 1e-8 * scale)
            throw DegenerateEigenvector("eigenvector residual too large");
        d.V.col(i) = v;
    }
    Eigen::FullPivLU<Matrix> lu(d.V);
    if (!lu.isInvertible())
        throw DegenerateEigenvector("eigenvector matrix is singular");
    d.Vinv = lu.inverse();
    d.gamma = norm2(d.V) * norm2(d.Vinv);

    if ((d.V * d.D.asDiagonal() * d.Vinv - closed).norm() > 1e-10 * std::max(1.0, scale))
        throw DegenerateEigenvector("diagonalization residual too large");
    return d;
}

/// e^{(A - L C) t} evaluated through the eigenbasis.
inline Matrix transition_factor(const ObserverDesign& d, double t) {
    Vector e(d.D.size());
    for (int i = 0; i < d.D.size(); ++i) e(i) = std::exp(d.D(i) * t);
    return d.V * e.asDiagonal() * d.Vinv;
}

/// Right-hand side of the diagonalized observer z' = D z + V^-1 (B u + L y);
/// the measurement y comes from the caller.
inline Vector diagonalized_observer_rhs(const ObserverDesign& d, const LtiSystem& sys,
                                        double t, const Vector& z, const Vector& y) {
    return d.D.asDiagonal() * z + d.Vinv * (sys.B * sys.input(t) + d.L * y);
}

/// Dense trajectory samples with local cubic interpolation between them.
class SampledTrajectory {
public:
    SampledTrajectory() = default;
    SampledTrajectory(double dt, Matrix states, const Matrix& output_map)
        : dt_(dt), x_(std::move(states)), y_(output_map * x_) {}

    double dt() const { return dt_; }
    double t_end() const { return dt_ * static_cast<double>(x_.cols() - 1); }
    int samples() const { return static_cast<int>(x_.cols()); }

    Vector state_at(int j) const { return x_.col(j); }
    Vector output_at(int j) const { return y_.col(j); }

    Vector state(double t) const { return interpolate(x_, t); }
    Vector output(double t) const { return interpolate(y_, t); }

private:
    Vector interpolate(const Matrix& table, double t) const {
        const int n = static_cast<int>(table.cols());
        double s = t / dt_;
        int j = static_cast<int>(std::floor(s));
        j = std::clamp(j, 1, n - 3);
        const double u = s - j;
        // 4-point Lagrange cubic on the uniform grid.
        const double c0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
        const double c1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        const double c2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        const double c3 = (u + 1.0) * u * (u - 1.0) / 6.0;
        return c0 * table.col(j - 1) + c1 * table.col(j) + c2 * table.col(j + 1) +
               c3 * table.col(j + 2);
    }

    double dt_ = 0.0;
    Matrix x_;
    Matrix y_;
};

/// High-accuracy reference solve of the plant with the classical 4th-order
/// one-step method; the input is evaluated in closed form at the stage times.
inline SampledTrajectory reference_trajectory(const LtiSystem& sys, double t_end,
                                              double dt_sample) {
    const int steps = static_cast<int>(std::llround(t_end / dt_sample));
    Matrix x(sys.m(), steps + 1);
    x.col(0) = sys.x0_true;
    auto f = [&](double t, const Vector& v) -> Vector {
        return sys.A * v + sys.B * sys.input(t);
    };
    for (int j = 0; j < steps; ++j) {
        const double t = dt_sample * static_cast<double>(j);
        const double h = dt_sample;
        Vector k1 = f(t, x.col(j));
        Vector k2 = f(t + h / 2, x.col(j) + (h / 2) * k1);
        Vector k3 = f(t + h / 2, x.col(j) + (h / 2) * k2);
        Vector k4 = f(t + h, x.col(j) + h * k3);
        x.col(j + 1) = x.col(j) + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return SampledTrajectory(dt_sample, std::move(x), sys.C);
}

}  // namespace parobs
