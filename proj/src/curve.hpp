#pragma once
// The hyperelliptic curve ν² = λ a(λ): branch tracking along contours, the
// symmetric homology cycles, and integration of Θ(b) = b(λ)/ν · dλ/λ.
#include "poly.hpp"
#include "quad.hpp"
#include <vector>

namespace sg {

// Piecewise-linear contour in the λ-plane. A loop repeats its first node.
struct Contour {
    std::vector<cx> nodes;
    bool closed() const;
    double length() const;
};

Contour reversed(Contour c);

// Stadium loop around the segment [p, q]: two parallel sides at distance
// `offset` plus semicircular caps, counterclockwise. Cap nodes sit on the
// circumscribed arc so the polyline never dips inside the stated offset.
Contour stadium(cx p, cx q, double offset, int arc_nodes = 24, int side_nodes = 12);

// Plain winding number of a closed polyline around p (λ-plane, no sheets).
int winding_around(const Contour& c, cx p);

// Branch points of ν² = λ a(λ): {0, α₁, α₂, 1/conj(α₁), 1/conj(α₂)}.
std::vector<cx> branch_points(const AdmissibleA& a);

struct SpectralCurve {
    AdmissibleA a;
    cx sym_nu;  // ν at the Sym point y(a): +√a(1)
};
SpectralCurve make_curve(const AdmissibleA& a);

// ν continued along a contour from a seed value at its start. Stores a dense
// per-segment sign grid so the branch can be evaluated at any parameter.
struct BranchPath {
    Contour contour;
    Poly w;                             // λ·a(λ)
    std::vector<std::vector<cx>> grid;  // per segment, ν at uniform t in [0,1]
    cx seed;

    cx point_at(size_t seg, double t) const;
    // principal √w(λ(t)) matched to the sheet of the nearest grid value
    cx nu_at(size_t seg, double t) const;
    cx end_nu() const;
};

BranchPath continue_nu(const AdmissibleA& a, const Contour& path, cx seed);

// Same continuation for a general ν² = w(λ); `bps` are the finite points the
// contour must stay clear of (the roots of w). Used for the genus-1 boundary
// families where w = λ(λ−α)(1−conj(α)λ)/|α|.
BranchPath continue_nu_w(const Poly& w, const std::vector<cx>& bps,
                         const Contour& path, cx seed);

// ∫ b(λ)/ν · dλ/λ along an already-continued path, one result per b.
std::vector<QuadResult> path_integrals(const BranchPath& path,
                                       const std::vector<Poly>& bs,
                                       double rel_tol = 1e-10);

// ν at the start of `path`, continued from the Sym point (λ=1, ν=+√a(1))
// along a straight probe, with polygonal detours if the straight probe passes
// too close to a branch point.
cx seed_from_sym(const AdmissibleA& a, cx target);

// Intersection number of two lifted cycles: signed transversal crossings of the
// λ-projections, counted only where the ν-sheets agree. Both lifts are seeded
// from the Sym point.
int intersection_number(const AdmissibleA& a, const Contour& c1, const Contour& c2);

// The symmetric cycles: A_l around the segment [α_l, 1/conj(α_l)]; B₁ around
// {0, α₁}; B₂ around {1/conj(α₂), ∞}, realised as a stadium around [0, conj(α₂)]
// in the z = 1/λ chart and mapped back (equivalently: all finite branch points
// except 1/conj(α₂), reversed). Orientations are normalised so A_k·B_l = δ_kl.
struct CycleSet {
    Contour A1, A2, B1, B2;
    Contour sigmaR;     // the loop over λ ∈ S¹ starting at λ=1
    double offset_a;    // stadium radius of the A-contours (λ chart)
    double offset_b;    // stadium radius of B₁ (λ chart) and B₂ (z chart)
};

// `guard` scales the clearance (relative to the closest branch-point pair)
// that every foreign branch point must keep from the cycle tubes. Callers that
// merely evaluate periods near a degeneration may relax it below the default.
CycleSet build_cycles(const AdmissibleA& a, double guard = 0.1);

// Worst clearance ratio over the four cycle tubes: build_cycles(a, g) succeeds
// exactly when cycle_margin(a) > g. Cheap (no contours are built).
double cycle_margin(const AdmissibleA& a);

// ∫ Θ(b) along the branch-continued cycle, adaptive to rel_tol per segment.
QuadResult period(const AdmissibleA& a, const Poly& b, const Contour& cycle,
                  double rel_tol = 1e-10);
// Same contour, several integrands: the branch continuation is shared.
std::vector<QuadResult> period_multi(const AdmissibleA& a, const std::vector<Poly>& bs,
                                     const Contour& cycle, double rel_tol = 1e-10);

// q(y(a)) = ½ ∫_{σy}^{y} Θ(b) along the arc λ = e^{iθ}, θ ∈ (0, 2π).
// Requires b ∈ 𝓑ₐ (A-periods below 1e−6). reverse_arc uses θ ∈ (0, −2π); the
// two differ by a period-lattice element.
cx q_at_sym(const AdmissibleA& a, const Poly& b, bool reverse_arc = false,
            double rel_tol = 1e-10);

// The raw arc integral of q_at_sym without the 𝓑ₐ membership check, for
// callers that already monitor the A-periods of b themselves.
cx sym_arc_integral(const AdmissibleA& a, const Poly& b, bool reverse_arc = false,
                    double rel_tol = 1e-10);

}  // namespace sg
