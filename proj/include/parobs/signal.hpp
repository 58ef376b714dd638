#pragma once

#include <cmath>
#include <functional>

#include "parobs/linalg.hpp"

namespace parobs {

/// Closed-form vector signal with an optional derivative evaluator.
struct Signal {
    std::function<Vector(double)> value;
    std::function<Vector(double)> derivative;  // may be empty

    bool has_derivative() const { return static_cast<bool>(derivative); }
    Vector operator()(double t) const { return value(t); }
};

/// Scalar signal c + a * sin(w * t), the input family used by the experiment
/// harness.
inline Signal sine_signal(double offset, double amplitude, double frequency) {
    Signal s;
    s.value = [=](double t) {
        Vector v(1);
        v(0) = offset + amplitude * std::sin(frequency * t);
        return v;
    };
    s.derivative = [=](double t) {
        Vector v(1);
        v(0) = amplitude * frequency * std::cos(frequency * t);
        return v;
    };
    return s;
}

inline Signal zero_signal(int dim) {
    Signal s;
    s.value = [dim](double) { return Vector::Zero(dim); };
    s.derivative = [dim](double) { return Vector::Zero(dim); };
    return s;
}

}  // namespace parobs
