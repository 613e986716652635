#pragma once

#include <functional>

#include "poly.hpp"

namespace sg {

struct QuadResult {
    cx value{0.0};
    double est_error = 0.0;
    long evals = 0;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        est_error += o.est_error;
        evals += o.evals;
        return *this;
    }
};

// adaptive Gauss-Kronrod 15(7) on [t0, t1]; throws QuadratureFailure when the
// requested tolerance is unreachable within the bisection depth cap
QuadResult integrate(const std::function<cx(double)>& f, double t0, double t1,
                     double rel_tol = 1e-10, double abs_tol = 0.0);

} // namespace sg
