#pragma once

#include <cmath>
#include <stdexcept>

namespace tdnc {

// Uniform evaluation grid on [0, horizon]. The horizon must be an integer
// multiple of the step.
struct grid_spec {
    double step = 1.0;
    double horizon = 64.0;

    grid_spec() = default;
    grid_spec(double s, double h) : step(s), horizon(h) { validate(); }

    void validate() const {
        if (!(step > 0.0)) throw std::invalid_argument("grid_spec: step must be > 0");
        if (!(horizon > 0.0)) throw std::invalid_argument("grid_spec: horizon must be > 0");
        double q = horizon / step;
        if (std::fabs(q - std::round(q)) > 1e-9 * std::max(1.0, q))
            throw std::invalid_argument("grid_spec: horizon must be a multiple of step");
    }

    // number of grid points, horizon included
    int npoints() const { return static_cast<int>(std::llround(horizon / step)) + 1; }
    double x(int i) const { return static_cast<double>(i) * step; }
};

}  // namespace tdnc
