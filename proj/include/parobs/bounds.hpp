#pragma once

#include <cmath>
#include <vector>

#include "parobs/errors.hpp"
#include "parobs/grid.hpp"
#include "parobs/lti.hpp"
#include "parobs/propagators.hpp"

namespace parobs {

/// A priori Parareal error bounds B_n^k for a contractive coarse propagator,
/// evaluated by the recurrence
///   B_n^0 = alpha + eta B_{n-1}^0,   B_n^k = beta B_{n-1}^{k-1} + eta B_{n-1}^k,
/// with B_0^k = 0. The closed form exists but its binomials overflow, so it
/// is kept as a test oracle only.
class BoundTable {
public:
    BoundTable() = default;
    BoundTable(const PropagatorConstants& c, int n_max, int k_max) : c_(c) {
        if (c.eta >= 1.0) throw DivergentCoarse("bound table requires eta < 1");
        b_.assign(k_max + 1, std::vector<double>(n_max + 1, 0.0));
        for (int n = 1; n <= n_max; ++n) b_[0][n] = c.alpha + c.eta * b_[0][n - 1];
        for (int k = 1; k <= k_max; ++k)
            for (int n = 1; n <= n_max; ++n)
                b_[k][n] = c.beta * b_[k - 1][n - 1] + c.eta * b_[k][n - 1];
    }

    double at(int k, int n) const { return b_[k][n]; }
    int n_max() const { return static_cast<int>(b_.empty() ? 0 : b_[0].size() - 1); }
    int k_max() const { return static_cast<int>(b_.size()) - 1; }
    const PropagatorConstants& constants() const { return c_; }

    /// Jump bound of the contractive-coarse estimate: 2 B_n^k.
    double jump_bound(int k, int n) const { return 2.0 * b_[k][n]; }

private:
    PropagatorConstants c_;
    std::vector<std::vector<double>> b_;
};

/// Closed form alpha beta^k sum_{i=0}^{n-k-1} C(k+i, k) eta^i (0 for n <= k);
/// binomials through lgamma, suitable only for the moderate (n, k) ranges the
/// tests exercise.
inline double bound_closed_form(const PropagatorConstants& c, int k, int n) {
    if (n <= k) return 0.0;
    double sum = 0.0;
    for (int i = 0; i <= n - k - 1; ++i) {
        const double log_binom =
            std::lgamma(k + i + 1.0) - std::lgamma(k + 1.0) - std::lgamma(i + 1.0);
        sum += std::exp(log_binom) * std::pow(c.eta, i);
    }
    return c.alpha * std::pow(c.beta, k) * sum;
}

}  // namespace parobs
