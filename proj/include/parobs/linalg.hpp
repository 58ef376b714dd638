#pragma once

#include <Eigen/Dense>
#include <vector>

#include "parobs/errors.hpp"

namespace parobs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Induced 2-norm (largest singular value).
inline double norm2(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

/// 2-norm condition number sigma_max / sigma_min.
inline double cond2(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) <= 0.0)
        throw DegenerateEigenvector("condition number of a singular matrix");
    return s(0) / (s(s.size() - 1));
}

/// Numerical rank: count of singular values above tol * sigma_max.
inline int rank2(const Matrix& m, double rel_tol = 1e-10) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++r;
    return r;
}

/// One-dimensional null-space vector of a square matrix, normalized to unit
/// 2-norm with its first nonzero component positive. Throws
/// DegenerateEigenvector when the kernel is empty or has dimension > 1.
inline Vector unit_kernel_vector(const Matrix& m, double rel_tol = 1e-8) {
    Eigen::FullPivLU<Matrix> lu(m);
    lu.setThreshold(rel_tol);
    if (lu.dimensionOfKernel() != 1)
        throw DegenerateEigenvector(
            "kernel dimension " + std::to_string(lu.dimensionOfKernel()) +
            ", expected 1");
    Vector v = lu.kernel().col(0);
    v.normalize();
    for (int i = 0; i < v.size(); ++i) {
        if (v(i) != 0.0) {
            if (v(i) < 0.0) v = -v;
            break;
        }
    }
    return v;
}

/// Coefficients c_1..c_m of det(sI - A) = s^m + c_1 s^{m-1} + ... + c_m,
/// by the Faddeev-LeVerrier recurrence.
inline std::vector<double> characteristic_polynomial(const Matrix& a) {
    const int m = static_cast<int>(a.rows());
    std::vector<double> c(m);
    Matrix n = Matrix::Identity(m, m);
    for (int k = 1; k <= m; ++k) {
        n = a * n;
        c[k - 1] = -n.trace() / k;
        n += c[k - 1] * Matrix::Identity(m, m);
    }
    return c;
}

/// Coefficients of the monic polynomial with the given roots, same layout as
/// characteristic_polynomial.
inline std::vector<double> polynomial_from_roots(const std::vector<double>& roots) {
    std::vector<double> c{1.0};
    for (double r : roots) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= r * c[i];
        }
        c = std::move(next);
    }
    return {c.begin() + 1, c.end()};
}

}  // namespace parobs
