#pragma once

#include <cmath>

#include "parobs/errors.hpp"

namespace parobs {

/// Time discretization of one window: N subintervals of length dT = T / N,
/// fine step dt_fine tiling each subinterval, coarse step dt_coarse = dT
/// (the coarse solver is a one-step method per subinterval).
struct GridSpec {
    double T = 1.0;
    int N = 1;
    double dT = 1.0;
    double dt_fine = 1.0;
    double dt_coarse = 1.0;

    GridSpec() = default;
    GridSpec(double window_length, int subintervals, int fine_steps_per_subinterval) {
        if (window_length <= 0.0 || subintervals < 1 || fine_steps_per_subinterval < 1)
            throw Error("invalid grid parameters");
        T = window_length;
        N = subintervals;
        dT = T / static_cast<double>(N);
        dt_fine = dT / static_cast<double>(fine_steps_per_subinterval);
        dt_coarse = dT;
    }

    int fine_steps_per_subinterval() const {
        return static_cast<int>(std::llround(dT / dt_fine));
    }
};

}  // namespace parobs
