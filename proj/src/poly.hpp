#pragma once

#include <array>
#include <complex>
#include <vector>

#include "errors.hpp"

namespace sg {

using cx = std::complex<double>;

// Dense polynomial, coefficients lowest degree first.  Trailing zeros are
// meaningful only through the declared degree bound passed alongside.
using Poly = std::vector<cx>;

/* ------------------------------------------------------------------ */
/* basic arithmetic                                                    */
/* ------------------------------------------------------------------ */

cx   peval(const Poly& p, cx z);
Poly pderiv(const Poly& p);
Poly pmul(const Poly& p, const Poly& q);
Poly padd(const Poly& p, const Poly& q);
Poly psub(const Poly& p, const Poly& q);
Poly pscale(const Poly& p, cx s);
Poly from_roots(const std::vector<cx>& roots, cx lead = 1.0);
int  pdegree(const Poly& p, double tol = 0.0);
double pnorm(const Poly& p); // max |coeff|

// quotient of num/den; remainder written to *rem when non-null
Poly pdivmod(const Poly& num, const Poly& den, Poly* rem = nullptr);

// synthetic division by (z - r); remainder = p(r) discarded
Poly deflate(const Poly& p, cx r);

/* ------------------------------------------------------------------ */
/* self-inversive structure: P^d_R = { p : z^d conj(p(1/conj z)) = p } */
/* ------------------------------------------------------------------ */

bool is_self_inversive(const Poly& p, int d, double tol = 1e-12);
Poly si_reflect(const Poly& p, int d);

// real basis of P^d_R (dimension d+1) and coordinates in it
std::vector<Poly> si_real_basis(int d);
Poly si_from_coords(const std::vector<double>& x, int d);
std::vector<double> si_coords(const Poly& p, int d);

/* ------------------------------------------------------------------ */
/* admissible quartics a(lambda) with unit-circle root symmetry        */
/* ------------------------------------------------------------------ */

struct AdmissibleA {
    Poly a;          // degree 4, self-inversive, |a4| = 1
    cx alpha1;       // labelled roots in B(0,1)\{0}
    cx alpha2;
};

// a(l) = prod_l (l - a_l)(1 - conj(a_l) l)/|a_l|
AdmissibleA from_disk_roots(cx alpha1, cx alpha2, double degeneracy_tol = 1e-9);

// membership checks used by validation paths
bool unit_circle_positive(const Poly& a, int n_samples = 1024);

/* ------------------------------------------------------------------ */
/* Cayley chart  kappa = (lambda-1)/(i(lambda+1))                      */
/* ------------------------------------------------------------------ */

cx cayley(cx lambda);      // pole at lambda = -1
cx cayley_inv(cx kappa);   // pole at kappa  = -i

struct RealQuartic {       // monic k^4 + a1 k^3 + a2 k^2 + a3 k + a4
    double a1 = 0, a2 = 0, a3 = 0, a4 = 0;

    double eval(double k) const {
        return (((k + a1) * k + a2) * k + a3) * k + a4;
    }
    Poly poly() const { return Poly{a4, a3, a2, a1, 1.0}; }
};

// 12th-root norm from the sphere chart; |C.a| = C |a|
double rq_norm(const RealQuartic& a);
RealQuartic scale_action(double C, const RealQuartic& a);
RealQuartic s3_normalize(const RealQuartic& a);

struct HatPair {
    RealQuartic a_hat;
    std::array<double, 4> b_hat; // real cubic, lowest degree first
};

// (a,b) -> (a_hat, b_hat) with a_hat = (i+k)^4 a((i-k)/(i+k)) / a(-1),
// b_hat = 2i (i+k)^3 b((i-k)/(i+k)) / sqrt(a(-1)).
HatPair hat_transform(const Poly& a, const Poly& b);
RealQuartic hat_transform_a(const Poly& a);

// inverse chart, re-normalised to |top coefficient| = 1
Poly hat_inverse_a(const RealQuartic& a_hat);

} // namespace sg
