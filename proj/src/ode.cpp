#include "ode.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace sg {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

} // namespace

void dp_step(const OdeFun& f, double t, const std::vector<double>& y, double h,
             std::vector<double>& y5, double& err_norm) {
    std::vector<double> err_vec;
    dp_step(f, t, y, h, y5, err_vec);
    err_norm = 0.0;
    for (double e : err_vec) err_norm = std::max(err_norm, std::abs(e));
}

void dp_step(const OdeFun& f, double t, const std::vector<double>& y, double h,
             std::vector<double>& y5, std::vector<double>& err_vec) {
    const size_t n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n);

    f(t, y, k1);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    f(t + c2 * h, tmp, k2);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, tmp, k3);
    for (size_t i = 0; i < n; ++i)
        tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, tmp, k4);
    for (size_t i = 0; i < n; ++i)
        tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * h, tmp, k5);
    for (size_t i = 0; i < n; ++i)
        tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                             a65 * k5[i]);
    f(t + h, tmp, k6);

    y5.resize(n);
    for (size_t i = 0; i < n; ++i)
        y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(t + h, y5, k7);

    err_vec.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const double y4 = y[i] + h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                      e6 * k6[i] + e7 * k7[i]);
        err_vec[i] = y5[i] - y4;
    }
}

double ode_drive(const OdeFun& f, double t0, double t1, std::vector<double>& y,
                 const OdeOptions& opt, const OdeCallback& on_step, const OdeVeto& veto) {
    double t = t0;
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    double h = std::min(opt.h_init, std::abs(t1 - t0)) * dir;
    if (h == 0.0) return t;

    std::vector<double> ynew;
    double err = 0.0;

    for (long steps = 0; steps < opt.max_steps; ++steps) {
        if ((t - t1) * dir >= 0.0) return t;
        if (std::abs(h) > std::abs(t1 - t)) h = (t1 - t);
        dp_step(f, t, y, h, ynew, err);

        const bool accept_err = err <= opt.abs_tol;
        const bool accept_veto = !accept_err || !veto || veto(t + h, ynew);
        if (accept_err && accept_veto) {
            t += h;
            y = ynew;
            const double used = h;
            double fac = err > 0.0 ? 0.9 * std::pow(opt.abs_tol / err, 0.2) : 5.0;
            fac = std::clamp(fac, 0.2, 5.0);
            h = dir * std::min(std::abs(h) * fac, opt.h_max);
            if (on_step(t, y, used) == OdeSignal::stop) return t;
        } else {
            const double fac = accept_err
                                   ? 0.5
                                   : std::clamp(0.9 * std::pow(opt.abs_tol / err, 0.2), 0.1, 0.7);
            h *= fac;
            if (std::abs(h) < opt.h_min)
                fail(errc::boundary_hit, "step size collapsed");
        }
    }
    fail(errc::quadrature_failure, "ODE step budget exhausted");
}

} // namespace sg
