#pragma once
// The Wente family 𝓦: the closed-form curve family through the Sym-point
// centre, the reduced flow on (a₊, a₋, β₁, β₂, β₃), and the Abresch
// component classification.
#include "poly.hpp"

namespace sg {

struct WenteState {
    double a_plus = 0;  // a(1)
    double a_minus = 0; // a(−1)
    double beta1 = 0, beta2 = 0, beta3 = 0;
};

// λ⁴ − (4+α₀α₊)(λ³+λ) + (6+2α₀α₊+α₊²)λ² + 1; keeps the closed-form
// coefficients so a(±1) cancel algebraically.
AdmissibleA wente_a(double alpha_plus);

// (ȧ₊, ȧ₋, β̇₁, β̇₂, β̇₃) =
// (4a₊a₋, 2(a₊+a₋−16)a₋, −a₋β₁, −(a₋+4β₃)β₂, 4β₃²+2a₋β₃+4a₋)
WenteState wente_field(const WenteState& s);

// 𝓐₊: four distinct real roots; 𝓐₋: a quadruple α, conj α, 1/α, 1/conj α
// off ℝ ∪ S¹. Requires real coefficients.
enum class AbreschComponent { A_plus, A_minus, Neither };
AbreschComponent abresch_component(const AdmissibleA& a);

} // namespace sg
