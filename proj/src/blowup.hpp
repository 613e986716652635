#pragma once

#include "poly.hpp"

namespace sg {

/* NLS-limit curve nu^2 = k^4 + alpha k^2 + 1 with differential (k^2+beta)/nu dk */

struct NlsCurve {
    double alpha;
    double beta;
};

// unique beta making the periods of (k^2+beta)/nu dk real; bisection until the
// vanishing period is below period_tol
double beta_of_alpha(double alpha, double period_tol = 1e-10);

// root of beta_of_alpha in (0,2), bisected to 1e-8 and cached
double alpha0();

struct AbDeriv {
    double dalpha, dbeta, dgamma;
};
AbDeriv ab_flow_field(double alpha, double beta, double gamma);

/* reduced Whitham fields on monic quartics k^4 + a1 k^3 + a2 k^2 + a4 */

struct SCirclePoint {
    double a1, a2, a4;
};
struct SCircleDeriv {
    double da1, da2, da4;
};

enum class LocalVariant { Full, FixA4, FixA2 };

SCircleDeriv field_local(const SCirclePoint& p, LocalVariant variant);

// lower bound h1(a1) = (3a1^2-4)(a1^2-4) / (8(8-a1^2)) under the exceptional fibre
double g_lower_bound(double a1);

// exceptional-fibre profile: a4 on the FixA2 separatrix through (0, alpha0^-2)
double g_curve(double a1);

// boundary angle for the doubly-degenerate family k^4 + s k^3 + k^2 + g(s)
double phi_A(double s);

} // namespace sg
