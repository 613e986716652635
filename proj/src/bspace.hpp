#pragma once
// The two-dimensional space 𝓑ₐ = {b ∈ P³_ℝ : both A-periods of Θ(b) vanish},
// its canonical bases, the winding number n(a), orientation of frames, and
// the genus-1 boundary families.
#include "curve.hpp"

#include <array>
#include <utility>

namespace sg {

enum class BaNorm { normalised, period_map };

struct BaBasis {
    Poly b1, b2;     // self-inversive, degree 3
    BaNorm norm;
    CycleSet cycles; // the cycles the period_map basis is dual to
};

// Raw kernel of the A-period map P³_ℝ → ℝ², orthonormal in basis coordinates.
struct BaKernel {
    Poly g1, g2;
    std::array<double, 2> singular_values; // of the 2×4 A-period matrix
};

BaKernel solve_Ba(const AdmissibleA& a);
BaKernel solve_Ba(const AdmissibleA& a, const CycleSet& cs);

// b1(0) = 1, b2(0) = i.
BaBasis normalised_basis(const AdmissibleA& a);
BaBasis normalised_basis(const AdmissibleA& a, const CycleSet& cs);

// (1/2πi) ∫_{B_k} Θ(b_l) = δ_kl.
BaBasis period_map_basis(const AdmissibleA& a);
BaBasis period_map_basis(const AdmissibleA& a, const CycleSet& cs);

// Winding of f̃ = (b1+ib2)/(b1−ib2) along λ = e^{iθ}, θ: 0 → 2π, by argument
// accumulation (≥ 2¹² samples, refined where the argument jumps). f̃ is
// unimodular on S¹ whenever (b1, b2) are both self-inversive of one degree,
// so the routine is degree-agnostic and serves the genus-0/1 analogues too.
int winding_of_pair(const Poly& b1, const Poly& b2);

// n(a) for the normalised basis. A common root of the basis at λ=1 (within
// 1e−7, i.e. a ∈ 𝓢²₁ to working accuracy) is deflated first; any other
// near-common root on S¹ raises OnS2Locus.
int winding_number(const AdmissibleA& a);

// A frame (a, b1, b2) with the period-map basis and the unique orientation
// signs of (A₁, A₂) making both Sym-point components positive. The labelling
// (α₁, α₂) is the one carried by `a`; swapping it swaps the components.
struct Frame {
    AdmissibleA a;
    BaBasis basis;             // period_map, orientation signs applied
    int s1 = 1, s2 = 1;        // orientations of A₁, A₂
    std::array<double, 2> phi; // (−i q₁, −i q₂) at orient time, both > 0
};

Frame orient_frame(const AdmissibleA& a);

/* genus-1 boundary families  ν² = λ(λ−α)(1−conj(α)λ)/|α| */

// (λ−α)(1−conj(α)λ)/|α| for 0 < |α| < 1.
Poly genus1_a(cx alpha);

// The A-cycle stadium around [α, 1/conj(α)] with its branch continuation.
BranchPath genus1_a_path(cx alpha);

// A-period of Θ(b) = b/ν · dλ/λ for b ∈ P²_ℝ (real by the reality structure).
double genus1_a_period(const BranchPath& path, const Poly& b);

// Basis of the genus-1 𝓑 space (one A-period constraint on P²_ℝ) with
// b1(0) = 1, b2(0) = i.
std::pair<Poly, Poly> genus1_normalised_basis(cx alpha);

// The boundary-family root α(k) ∈ I_B, |α(k)| = k: on ν² = λ(λ−k)(λ−1/k) the
// differential with roots {r, 1/r} has vanishing A-period at a critical
// r ∈ (k, 1); then α(k) = k·((2r+i(r²−1))/(r²+1))⁻¹, so that the boundary
// quartic (λ−1)²(λ−α)(conj(α)λ−1)/|α| satisfies df(1) = 0.
cx boundary_critical_root(double k);

} // namespace sg
