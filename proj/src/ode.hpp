#pragma once

#include <functional>
#include <vector>

namespace sg {

using OdeFun = std::function<void(double t, const std::vector<double>& y,
                                  std::vector<double>& dy)>;

// what an accepted-step callback tells the driver to do next
enum class OdeSignal { proceed, stop };

// callback invoked after every accepted step; may modify the state in place
// (renormalisation, re-projection) before integration continues
using OdeCallback = std::function<OdeSignal(double t, std::vector<double>& y,
                                            double step_used)>;

// pre-step veto: given a proposed accepted step, reject it and force a
// smaller one instead (returns false to veto); nullptr accepts everything
using OdeVeto = std::function<bool(double t_new, const std::vector<double>& y_new)>;

struct OdeOptions {
    double abs_tol = 1e-9;
    double h_init = 1e-3;
    double h_min = 1e-14;
    double h_max = 0.1;
    long max_steps = 2000000;
};

// single Dormand-Prince 5(4) step: fills 5th-order solution and the
// embedded error estimate (max-norm of the 5th/4th order difference)
void dp_step(const OdeFun& f, double t, const std::vector<double>& y, double h,
             std::vector<double>& y5, double& err_norm);

// variant exposing the per-component error vector, for drivers that weigh
// components through a problem-specific norm (e.g. root positions)
void dp_step(const OdeFun& f, double t, const std::vector<double>& y, double h,
             std::vector<double>& y5, std::vector<double>& err_vec);

// adaptive drive from t0 to t1 (t1 may be +inf-like; callback stops);
// returns final time reached
double ode_drive(const OdeFun& f, double t0, double t1, std::vector<double>& y,
                 const OdeOptions& opt, const OdeCallback& on_step,
                 const OdeVeto& veto = nullptr);

} // namespace sg
