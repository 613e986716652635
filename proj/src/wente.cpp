#include "wente.hpp"

#include "blowup.hpp"
#include "roots.hpp"

#include <algorithm>
#include <cmath>

namespace sg {

AdmissibleA wente_a(double alpha_plus) {
    if (!(alpha_plus > 0.0)) fail(errc::bad_argument, "alpha_plus must be positive");
    const double a0 = alpha0();
    const double t = 4.0 + a0 * alpha_plus;
    const Poly p{1.0, -t, 6.0 + 2.0 * a0 * alpha_plus + alpha_plus * alpha_plus, -t, 1.0};

    std::vector<cx> in;
    for (cx r : poly_roots(p))
        if (std::abs(r) < 1.0) in.push_back(r);
    if (in.size() != 2)
        fail(errc::root_out_of_domain, "family roots do not split across the circle");
    // deterministic labelling: α₁ is the root in the upper half plane
    if (in[0].imag() < in[1].imag() ||
        (in[0].imag() == in[1].imag() && in[0].real() > in[1].real()))
        std::swap(in[0], in[1]);

    AdmissibleA a = from_disk_roots(in[0], in[1]);
    a.a = p;
    return a;
}

WenteState wente_field(const WenteState& s) {
    WenteState d;
    d.a_plus = 4.0 * s.a_plus * s.a_minus;
    d.a_minus = 2.0 * (s.a_plus + s.a_minus - 16.0) * s.a_minus;
    d.beta1 = -s.a_minus * s.beta1;
    d.beta2 = -(s.a_minus + 4.0 * s.beta3) * s.beta2;
    d.beta3 = 4.0 * s.beta3 * s.beta3 + 2.0 * s.a_minus * s.beta3 + 4.0 * s.a_minus;
    return d;
}

AbreschComponent abresch_component(const AdmissibleA& a) {
    for (cx c : a.a)
        if (std::abs(c.imag()) > 1e-10 * std::max(1.0, pnorm(a.a)))
            fail(errc::domain_error, "coefficients must be real");

    const auto rts = poly_roots(a.a);

    // repeated roots scatter the root finder by ~|eps|^{1/m}, so detect them
    // through the relative discriminant rather than pairwise distances
    double drel = 1.0;
    for (size_t i = 0; i < rts.size(); ++i)
        for (size_t j = i + 1; j < rts.size(); ++j)
            drel *= std::norm(rts[i] - rts[j]) /
                    ((1.0 + std::abs(rts[i])) * (1.0 + std::abs(rts[j])));
    if (drel < 1e-24) return AbreschComponent::Neither;

    size_t n_real = 0, n_circle = 0;
    for (cx r : rts) {
        if (std::abs(r.imag()) < 1e-8) ++n_real;
        if (std::abs(std::abs(r) - 1.0) < 1e-8) ++n_circle;
    }
    if (n_real == rts.size() && rts.size() == 4) return AbreschComponent::A_plus;
    // real coefficients and self-inversivity close the root set under both
    // conjugation and reflection, so no real and no unimodular root forces
    // the quadruple α, conj α, 1/α, 1/conj α
    if (n_real == 0 && n_circle == 0) return AbreschComponent::A_minus;
    return AbreschComponent::Neither;
}

} // namespace sg
