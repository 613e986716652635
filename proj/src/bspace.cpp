#include "bspace.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>

namespace sg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 2x2 real solve used for the b(0) normalisations.
std::array<double, 2> solve2(const std::array<std::array<double, 2>, 2>& m,
                             const std::array<double, 2>& rhs, const char* what) {
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const double scale = std::max({std::abs(m[0][0]), std::abs(m[0][1]),
                                   std::abs(m[1][0]), std::abs(m[1][1]), 1e-300});
    if (std::abs(det) < 1e-12 * scale * scale) fail(errc::rank_deficiency, what);
    return {(rhs[0] * m[1][1] - rhs[1] * m[0][1]) / det,
            (rhs[1] * m[0][0] - rhs[0] * m[1][0]) / det};
}

Poly combine(const Poly& g1, const Poly& g2, double x1, double x2) {
    return padd(pscale(g1, x1), pscale(g2, x2));
}

// b1 + i·b2 and b1 − i·b2
std::pair<Poly, Poly> pm_pair(const Poly& b1, const Poly& b2) {
    const Poly ib2 = pscale(b2, cx(0.0, 1.0));
    return {padd(b1, ib2), psub(b1, ib2)};
}

BaBasis normalise_from(const BaKernel& kern, const CycleSet& cs) {
    const cx g10 = peval(kern.g1, cx(0.0)), g20 = peval(kern.g2, cx(0.0));
    const std::array<std::array<double, 2>, 2> m{
        {{g10.real(), g20.real()}, {g10.imag(), g20.imag()}}};
    const auto x1 = solve2(m, {1.0, 0.0}, "b -> b(0) is degenerate on the kernel");
    const auto x2 = solve2(m, {0.0, 1.0}, "b -> b(0) is degenerate on the kernel");
    BaBasis out;
    out.b1 = combine(kern.g1, kern.g2, x1[0], x1[1]);
    out.b2 = combine(kern.g1, kern.g2, x2[0], x2[1]);
    out.norm = BaNorm::normalised;
    out.cycles = cs;
    return out;
}

BaBasis period_map_from(const AdmissibleA& a, const BaKernel& kern, const CycleSet& cs) {
    const std::vector<Poly> gs{kern.g1, kern.g2};
    const auto q1 = period_multi(a, gs, cs.B1);
    const auto q2 = period_multi(a, gs, cs.B2);

    // B-periods on the kernel are purely imaginary: the circle inversion
    // ρ(λ,ν) = (1/conj λ, conj ν / conj λ³) sends each B-cycle to itself
    // modulo A-cycles, whose periods vanish here.
    Eigen::Matrix2d M;
    double scale = 1.0, reres = 0.0;
    for (int l = 0; l < 2; ++l) {
        const cx v1 = q1[l].value, v2 = q2[l].value;
        M(0, l) = v1.imag();
        M(1, l) = v2.imag();
        scale = std::max({scale, std::abs(v1), std::abs(v2)});
        reres = std::max({reres, std::abs(v1.real()), std::abs(v2.real())});
    }
    if (reres > 1e-7 * scale)
        fail(errc::quadrature_failure, "B-periods have real contamination");
    if (std::abs(M.determinant()) < 1e-10 * scale * scale)
        fail(errc::rank_deficiency, "degenerate B-period matrix");

    // Im ∫_{B_k} Θ(b_l) = 2π δ_kl
    const Eigen::Matrix2d X = M.inverse() * (2.0 * kPi * Eigen::Matrix2d::Identity());
    BaBasis out;
    out.b1 = combine(kern.g1, kern.g2, X(0, 0), X(1, 0));
    out.b2 = combine(kern.g1, kern.g2, X(0, 1), X(1, 1));
    out.norm = BaNorm::period_map;
    out.cycles = cs;
    return out;
}

// argument increment of f̃ between two circle parameters, bisecting until the
// step is below π/2
double arg_step(const std::function<cx(double)>& f, double ta, cx fa, double tb, cx fb,
                int depth) {
    const double d = std::arg(fb / fa);
    if (std::abs(d) <= 0.5 * kPi) return d;
    if (depth >= 40)
        fail(errc::on_s2_locus, "unresolvable argument jump of f~ on the circle");
    const double tm = 0.5 * (ta + tb);
    const cx fm = f(tm);
    return arg_step(f, ta, fa, tm, fm, depth + 1) + arg_step(f, tm, fm, tb, fb, depth + 1);
}

} // namespace

BaKernel solve_Ba(const AdmissibleA& a) { return solve_Ba(a, build_cycles(a)); }

BaKernel solve_Ba(const AdmissibleA& a, const CycleSet& cs) {
    const auto basis = si_real_basis(3); // real dimension 4
    const auto p1 = period_multi(a, basis, cs.A1);
    const auto p2 = period_multi(a, basis, cs.A2);

    Eigen::Matrix<double, 2, 4> M;
    double scale = 1.0, imres = 0.0;
    for (int k = 0; k < 4; ++k) {
        M(0, k) = p1[k].value.real();
        M(1, k) = p2[k].value.real();
        scale = std::max({scale, std::abs(M(0, k)), std::abs(M(1, k))});
        imres = std::max({imres, std::abs(p1[k].value.imag()), std::abs(p2[k].value.imag())});
    }
    // A-periods of P³_ℝ differentials are real (ρ reverses the A-cycles), so
    // the imaginary parts measure quadrature noise.
    if (imres > 1e-8 * scale)
        fail(errc::quadrature_failure, "A-periods have non-real contamination");

    Eigen::JacobiSVD<Eigen::Matrix<double, 2, 4>> svd(M, Eigen::ComputeFullV);
    const double s0 = svd.singularValues()(0);
    const double s1 = svd.singularValues()(1);
    if (s1 <= 1e-6 * s0)
        fail(errc::rank_deficiency, "A-period matrix is rank deficient");

    BaKernel out;
    out.singular_values = {s0, s1};
    Poly* gs[2] = {&out.g1, &out.g2};
    for (int j = 0; j < 2; ++j) {
        std::vector<double> x(4);
        for (int k = 0; k < 4; ++k) x[k] = svd.matrixV()(k, 2 + j);
        *gs[j] = si_from_coords(x, 3);
        cx r1(0.0), r2(0.0);
        for (int k = 0; k < 4; ++k) {
            r1 += x[k] * p1[k].value;
            r2 += x[k] * p2[k].value;
        }
        if (std::max(std::abs(r1), std::abs(r2)) > 1e-8 * scale)
            fail(errc::quadrature_failure, "kernel residual periods too large");
    }
    return out;
}

BaBasis normalised_basis(const AdmissibleA& a) { return normalised_basis(a, build_cycles(a)); }

BaBasis normalised_basis(const AdmissibleA& a, const CycleSet& cs) {
    return normalise_from(solve_Ba(a, cs), cs);
}

BaBasis period_map_basis(const AdmissibleA& a) { return period_map_basis(a, build_cycles(a)); }

BaBasis period_map_basis(const AdmissibleA& a, const CycleSet& cs) {
    return period_map_from(a, solve_Ba(a, cs), cs);
}

int winding_of_pair(const Poly& b1, const Poly& b2) {
    const auto [u, v] = pm_pair(b1, b2);
    const std::function<cx(double)> ftil = [&](double th) {
        const cx lam = std::polar(1.0, th);
        const cx uu = peval(u, lam), vv = peval(v, lam);
        if (std::abs(uu) * std::abs(vv) < 1e-10)
            fail(errc::on_s2_locus, "basis pair nearly degenerate on the circle");
        return uu / vv;
    };

    const int n_samples = 1 << 12;
    double total = 0.0;
    double t_prev = 0.0;
    cx f_prev = ftil(0.0);
    for (int j = 1; j <= n_samples; ++j) {
        const double t = 2.0 * kPi * j / n_samples;
        const cx fj = ftil(t);
        total += arg_step(ftil, t_prev, f_prev, t, fj, 0);
        t_prev = t;
        f_prev = fj;
    }
    const long n = std::lround(total / (2.0 * kPi));
    if (std::abs(total - 2.0 * kPi * double(n)) > 0.02 * 2.0 * kPi)
        fail(errc::quadrature_failure, "winding accumulation did not close up");
    return int(n);
}

int winding_number(const AdmissibleA& a) {
    const BaBasis nb = normalised_basis(a);
    Poly b1 = nb.b1, b2 = nb.b2;
    // a on the S²₁ locus to working accuracy: remove the common root at λ=1;
    // the quotient pair determines the winding of the normalised curve.
    if (std::abs(peval(b1, cx(1.0))) < 1e-7 * std::max(pnorm(b1), 1e-300) &&
        std::abs(peval(b2, cx(1.0))) < 1e-7 * std::max(pnorm(b2), 1e-300)) {
        b1 = deflate(b1, cx(1.0));
        b2 = deflate(b2, cx(1.0));
    }
    const int n = winding_of_pair(b1, b2);
    if (n < -1 || n > 1) fail(errc::quadrature_failure, "winding outside {-1,0,1}");
    return n;
}

Frame orient_frame(const AdmissibleA& a) {
    const CycleSet cs = build_cycles(a);
    const BaKernel kern = solve_Ba(a, cs);
    for (const Poly* g : {&kern.g1, &kern.g2})
        if (std::abs(peval(*g, cx(1.0))) > 1e-7 * std::max(pnorm(*g), 1e-300))
            fail(errc::no_positive_orient,
                 "kernel has no common root at lambda=1 (a is not on the S2_1 locus)");

    Frame fr;
    fr.a = a;
    fr.basis = period_map_from(a, kern, cs);

    // Reorienting A_l reorients its dual B_l and negates the period-map basis
    // element b_l, so the four sign pairs act by b_l ↦ s_l b_l and the
    // Sym-point components scale accordingly.
    const cx q[2] = {q_at_sym(a, fr.basis.b1), q_at_sym(a, fr.basis.b2)};
    int* sgn[2] = {&fr.s1, &fr.s2};
    Poly* bb[2] = {&fr.basis.b1, &fr.basis.b2};
    for (int l = 0; l < 2; ++l) {
        if (std::abs(q[l].real()) > 1e-6 * (1.0 + std::abs(q[l])))
            fail(errc::no_positive_orient, "Sym-point component is not imaginary");
        const double phi = q[l].imag(); // −i q for the unflipped basis
        if (std::abs(phi) < 1e-10)
            fail(errc::no_positive_orient, "Sym-point component vanishes");
        *sgn[l] = phi > 0.0 ? 1 : -1;
        if (phi < 0.0) *bb[l] = pscale(*bb[l], -1.0);
        fr.phi[l] = std::abs(phi);
    }
    return fr;
}

/* ---------------------- genus-1 boundary families ---------------------- */

Poly genus1_a(cx alpha) {
    const double m = std::abs(alpha);
    if (m <= 1e-9 || m >= 1.0 - 1e-9)
        fail(errc::root_out_of_domain, "alpha must lie in the punctured open unit disk");
    return pscale(pmul(Poly{-alpha, 1.0}, Poly{1.0, -std::conj(alpha)}), 1.0 / m);
}

BranchPath genus1_a_path(cx alpha) {
    const Poly atil = genus1_a(alpha);
    const cx r2 = 1.0 / std::conj(alpha);
    const std::vector<cx> bps{cx(0.0), alpha, r2};
    const double dmin = std::min(std::abs(alpha), std::abs(r2 - alpha));
    const Contour c = stadium(alpha, r2, 0.10 * dmin);
    const Poly w = pmul(atil, Poly{cx(0.0), cx(1.0)});
    return continue_nu_w(w, bps, c, std::sqrt(peval(w, c.nodes.front())));
}

double genus1_a_period(const BranchPath& path, const Poly& b) {
    const QuadResult q = path_integrals(path, {b}, 1e-10)[0];
    if (std::abs(q.value.imag()) > 1e-6 * (1.0 + std::abs(q.value)))
        fail(errc::quadrature_failure, "genus-1 A-period has non-real contamination");
    return q.value.real();
}

std::pair<Poly, Poly> genus1_normalised_basis(cx alpha) {
    const BranchPath path = genus1_a_path(alpha);
    const auto basis = si_real_basis(2); // real dimension 3
    const auto per = path_integrals(path, basis, 1e-10);

    Eigen::Matrix<double, 1, 3> M;
    double scale = 1.0;
    for (int k = 0; k < 3; ++k) {
        M(0, k) = per[k].value.real();
        scale = std::max(scale, std::abs(M(0, k)));
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 1, 3>> svd(M, Eigen::ComputeFullV);
    if (svd.singularValues()(0) <= 1e-12 * scale)
        fail(errc::rank_deficiency, "genus-1 period row is degenerate");

    Poly g[2];
    for (int j = 0; j < 2; ++j) {
        std::vector<double> x(3);
        for (int k = 0; k < 3; ++k) x[k] = svd.matrixV()(k, 1 + j);
        g[j] = si_from_coords(x, 2);
        cx r(0.0);
        for (int k = 0; k < 3; ++k) r += x[k] * per[k].value;
        if (std::abs(r) > 1e-8 * scale)
            fail(errc::quadrature_failure, "genus-1 kernel residual period too large");
    }

    const cx g10 = peval(g[0], cx(0.0)), g20 = peval(g[1], cx(0.0));
    const std::array<std::array<double, 2>, 2> m{
        {{g10.real(), g20.real()}, {g10.imag(), g20.imag()}}};
    const auto x1 = solve2(m, {1.0, 0.0}, "b -> b(0) is degenerate on the genus-1 kernel");
    const auto x2 = solve2(m, {0.0, 1.0}, "b -> b(0) is degenerate on the genus-1 kernel");
    return {combine(g[0], g[1], x1[0], x1[1]), combine(g[0], g[1], x2[0], x2[1])};
}

cx boundary_critical_root(double k) {
    if (!(k > 0.0 && k < 1.0)) fail(errc::bad_argument, "k must lie in (0,1)");

    // critical r: the differential with roots {r, 1/r} has zero A-period on
    // ν² = λ(λ−k)(λ−1/k); the path is independent of r and reused.
    const BranchPath path = genus1_a_path(cx(k));
    const auto F = [&](double r) {
        return genus1_a_period(path, Poly{1.0, -(r + 1.0 / r), 1.0});
    };
    double lo = k + 1e-10 * (1.0 - k), hi = 1.0 - 1e-10 * (1.0 - k);
    double flo = F(lo);
    if (!(flo * F(hi) < 0.0))
        fail(errc::root_bracket, "period condition does not change sign in (k,1)");
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = F(mid);
        if (fm == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    const double r = 0.5 * (lo + hi);
    const cx lam_c = cx(2.0 * r, r * r - 1.0) / (r * r + 1.0);
    const cx alpha = k / lam_c;

    // the boundary quartic (λ−1)²(λ−α)(conj(α)λ−1)/|α| must satisfy df(1)=0
    // for f = b₂/b₁ of its genus-1 normalisation; checked in the unimodular
    // chart f̃ = (b₁+ib₂)/(b₁−ib₂), whose θ-derivative is scale-free.
    const auto [b1, b2] = genus1_normalised_basis(alpha);
    const auto [u, v] = pm_pair(b1, b2);
    const cx u1 = peval(u, cx(1.0)), v1 = peval(v, cx(1.0));
    const cx dft = cx(0.0, 1.0) * (peval(pderiv(u), cx(1.0)) * v1 - u1 * peval(pderiv(v), cx(1.0))) /
                   (v1 * v1);
    if (std::abs(dft) > 1e-7)
        fail(errc::quadrature_failure, "boundary root fails the df(1)=0 condition");
    return alpha;
}

} // namespace sg
