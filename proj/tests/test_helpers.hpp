#pragma once

#include <cmath>
#include <random>

#include "parobs/lti.hpp"
#include "parobs/sysfile.hpp"

namespace testutil {

using parobs::Matrix;
using parobs::Vector;

/// Scaling-and-squaring Taylor exponential; independent oracle for the
/// eigenbasis-based transition factor.
inline Matrix expm_oracle(Matrix a) {
    int squarings = 0;
    double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();
    while (nrm > 0.5) {
        nrm /= 2.0;
        ++squarings;
    }
    a /= std::pow(2.0, squarings);
    const int m = static_cast<int>(a.rows());
    Matrix result = Matrix::Identity(m, m);
    Matrix term = Matrix::Identity(m, m);
    for (int k = 1; k <= 30; ++k) {
        term = term * a / static_cast<double>(k);
        result += term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

/// The benchmark plant with a chosen spectrum for A - L C.
inline parobs::SystemSpec bench(std::vector<double> eigs = {-2.0, -4.0}) {
    return parobs::default_system_spec(std::move(eigs));
}

inline parobs::ObserverDesign bench_design(std::vector<double> eigs = {-2.0, -4.0}) {
    auto spec = bench(std::move(eigs));
    const Vector gain = parobs::ackermann_gain(spec.sys, spec.eigs);
    Matrix L(gain.size(), 1);
    L.col(0) = gain;
    return parobs::decay_constants(spec.sys, L, spec.eigs, spec.xhat0);
}

/// Hand-built diagonal design for propagator-level tests: A - L C = diag(d).
inline parobs::ObserverDesign diagonal_design(const Vector& d) {
    parobs::ObserverDesign de;
    const int m = static_cast<int>(d.size());
    de.L = Matrix::Zero(m, 1);
    de.eigs.assign(d.data(), d.data() + m);
    de.mu = d.cwiseAbs().minCoeff();
    de.gamma = 1.0;
    de.V = Matrix::Identity(m, m);
    de.Vinv = Matrix::Identity(m, m);
    de.D = d;
    de.xhat0 = Vector::Zero(m);
    return de;
}

inline std::mt19937& rng() {
    static std::mt19937 gen(0x5eed1234u);
    return gen;
}

inline double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng());
}

}  // namespace testutil
