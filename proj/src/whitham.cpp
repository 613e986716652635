#include "whitham.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "blowup.hpp"
#include "ode.hpp"
#include "roots.hpp"

namespace sg {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::array<cx, 4> four_roots(const AdmissibleA& a) {
    return {a.alpha1, a.alpha2, 1.0 / std::conj(a.alpha1), 1.0 / std::conj(a.alpha2)};
}

// Rows of the determining system for (c₁, c₂, Q): the si-coordinates of
// b₂c₁ − b₁c₂ − Qa (seven real rows), then real and imaginary parts of the
// first and second λ=1 derivatives of that identity, written with the common
// root of (b₁, b₂, Q) at λ=1 divided out of the evaluation itself.
Eigen::VectorXd system_rows(const AdmissibleA& a, const Poly& b1, const Poly& b2,
                            const Poly& c1, const Poly& c2, const Poly& Q) {
    const Poly prod = psub(psub(pmul(b2, c1), pmul(b1, c2)), pmul(Q, a.a));
    const std::vector<double> co = si_coords(prod, 6);

    const cx one(1.0);
    const Poly ap = pderiv(a.a);
    const Poly b1p = pderiv(b1), b2p = pderiv(b2);
    const Poly b1pp = pderiv(b1p), b2pp = pderiv(b2p);
    const Poly c1p = pderiv(c1), c2p = pderiv(c2);
    const Poly Qp = pderiv(Q), Qpp = pderiv(Qp);

    const cx a1 = peval(a.a, one), a1p = peval(ap, one);
    const cx r1 = peval(Qp, one) * a1 - peval(b2p, one) * peval(c1, one) +
                  peval(b1p, one) * peval(c2, one);
    const cx r2 = peval(Qpp, one) * a1 + 2.0 * peval(Qp, one) * a1p -
                  peval(b2pp, one) * peval(c1, one) -
                  2.0 * peval(b2p, one) * peval(c1p, one) +
                  peval(b1pp, one) * peval(c2, one) +
                  2.0 * peval(b1p, one) * peval(c2p, one);

    Eigen::VectorXd r(11);
    for (int i = 0; i < 7; ++i) r[i] = co[size_t(i)];
    r[7] = r1.real();
    r[8] = r1.imag();
    r[9] = r2.real();
    r[10] = r2.imag();
    return r;
}

} // namespace

WhithamTangent tangent_pair(const AdmissibleA& a, const Poly& b1, const Poly& b2,
                            double c1_at_1, double c2_at_1) {
    const Poly ap = pderiv(a.a);
    const double a1v = peval(a.a, cx(1.0)).real();
    if (!(a1v > 0.0)) fail(errc::domain_error, "a(1) is not positive");
    const double kappa = peval(ap, cx(1.0)).imag() / (2.0 * a1v);

    // Hard constraints on each c_l: the value at λ=1 and the imaginary part
    // of c_l′(1) = c_l(1)(½ + a′(1)/(2a(1))) — the real part of that identity
    // holds automatically for self-inversive cubics. Eliminate them first.
    const std::vector<Poly> cb = si_real_basis(3);
    Eigen::Matrix<double, 2, 4> E;
    for (int j = 0; j < 4; ++j) {
        E(0, j) = peval(cb[size_t(j)], cx(1.0)).real();
        E(1, j) = peval(pderiv(cb[size_t(j)]), cx(1.0)).imag();
    }
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> Edec(E);
    const Eigen::FullPivLU<Eigen::MatrixXd> Elu(E);
    const Eigen::MatrixXd N = Elu.kernel(); // 4×2
    if (N.cols() != 2) fail(errc::singular_system, "constraint kernel has wrong rank");

    auto particular = [&](double cv) {
        Eigen::Vector2d rhs(cv, cv * kappa);
        return Eigen::VectorXd(Edec.solve(rhs));
    };
    const Eigen::VectorXd x1p = particular(c1_at_1);
    const Eigen::VectorXd x2p = particular(c2_at_1);

    auto make_c = [&](const Eigen::VectorXd& x) {
        std::vector<double> v(4);
        for (int j = 0; j < 4; ++j) v[size_t(j)] = x[j];
        return si_from_coords(v, 3);
    };
    const Poly zero3{0.0, 0.0, 0.0, 0.0};
    const Poly zero2{0.0, 0.0, 0.0};

    // Affine residual in the seven remaining unknowns y = (y₁, y₂, q).
    const Eigen::VectorXd r0 =
        system_rows(a, b1, b2, make_c(x1p), make_c(x2p), zero2);
    Eigen::MatrixXd M(11, 7);
    for (int k = 0; k < 2; ++k) {
        M.col(k) = system_rows(a, b1, b2, make_c(Eigen::VectorXd(N.col(k))), zero3,
                               zero2);
        M.col(2 + k) = system_rows(a, b1, b2, zero3,
                                   make_c(Eigen::VectorXd(N.col(k))), zero2);
    }
    for (int k = 0; k < 3; ++k) {
        std::vector<double> e(3, 0.0);
        e[size_t(k)] = 1.0;
        M.col(4 + k) = system_rows(a, b1, b2, zero3, zero3, si_from_coords(e, 2));
    }

    // row equilibration keeps the λ=1 derivative rows from dominating
    Eigen::VectorXd r0s = r0;
    Eigen::MatrixXd Ms = M;
    for (int i = 0; i < 11; ++i) {
        const double w = std::max(M.row(i).cwiseAbs().maxCoeff(), std::abs(r0[i]));
        if (w > 0.0) {
            Ms.row(i) /= w;
            r0s[i] /= w;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ms,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv[0] > 0.0) || sv[6] < 1e-10 * sv[0])
        fail(errc::singular_system, "determining system is rank deficient");
    Eigen::VectorXd y = svd.solve(-r0s);
    y += svd.solve(-(r0s + Ms * y)); // refinement pass: the system is consistent
    if ((Ms * y + r0s).lpNorm<Eigen::Infinity>() > 1e-9 * (1.0 + y.lpNorm<Eigen::Infinity>()))
        fail(errc::singular_system, "determining system is inconsistent");

    WhithamTangent tg;
    tg.c1 = make_c(x1p + N * y.segment<2>(0));
    tg.c2 = make_c(x2p + N * y.segment<2>(2));
    {
        std::vector<double> qv(3);
        for (int k = 0; k < 3; ++k) qv[size_t(k)] = y[4 + k];
        tg.Q = si_from_coords(qv, 2);
    }

    // ȧ from its prescribed values iα a′(α) c_l(α)/b_l(α) at the two interior
    // roots: self-inversiveness supplies the reflected-root values, so with
    // the leading-coefficient phase gauge the 5×5 interpolation is exactly
    // determined (its kernel before gauging is ℝ·a itself).
    const std::array<cx, 2> roots{a.alpha1, a.alpha2};
    std::array<cx, 2> vals;
    const double bnorm = std::max(pnorm(b1), pnorm(b2));
    for (int j = 0; j < 2; ++j) {
        const cx r = roots[size_t(j)];
        const cx v1 = peval(b1, r), v2 = peval(b2, r);
        const bool use1 = std::abs(v1) >= std::abs(v2);
        const cx bv = use1 ? v1 : v2;
        if (std::abs(bv) < 1e-12 * std::max(bnorm, 1e-300))
            fail(errc::singular_system, "basis pair vanishes at a root of a");
        const cx cv = peval(use1 ? tg.c1 : tg.c2, r);
        vals[size_t(j)] = cx(0.0, 1.0) * r * peval(ap, r) * cv / bv;
    }
    const std::vector<Poly> ab = si_real_basis(4);
    Eigen::Matrix<double, 5, 5> Aa;
    Eigen::Matrix<double, 5, 1> ra;
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 5; ++k) {
            const cx e = peval(ab[size_t(k)], roots[size_t(j)]);
            Aa(2 * j, k) = e.real();
            Aa(2 * j + 1, k) = e.imag();
        }
        ra[2 * j] = vals[size_t(j)].real();
        ra[2 * j + 1] = vals[size_t(j)].imag();
    }
    const cx lead_a = a.a.size() > 4 ? a.a[4] : cx(0.0);
    for (int k = 0; k < 5; ++k) {
        const cx lead_e = ab[size_t(k)].size() > 4 ? ab[size_t(k)][4] : cx(0.0);
        Aa(4, k) = (std::conj(lead_a) * lead_e).real();
    }
    ra[4] = 0.0;
    const Eigen::FullPivLU<Eigen::MatrixXd> lua(Aa);
    if (lua.rcond() < 1e-13)
        fail(errc::singular_system, "root-value system for the quartic is degenerate");
    Eigen::VectorXd u = lua.solve(ra);
    u += lua.solve(ra - Aa * u);
    {
        std::vector<double> uv(5);
        for (int k = 0; k < 5; ++k) uv[size_t(k)] = u[k];
        tg.adot = si_from_coords(uv, 4);
    }

    // ḃ_l by exact division: 2aḃ_l = 2iλac_l′ − ic_l(a + λa′) + ȧb_l.
    const Poly lam{0.0, 1.0};
    const Poly lam_ap = pmul(lam, ap);
    const Poly two_i_lam_a = pmul(Poly{0.0, cx(0.0, 2.0)}, a.a);
    const Poly den = pscale(a.a, 2.0);
    auto bdot = [&](const Poly& b, const Poly& c) {
        const Poly num = padd(
            psub(pmul(two_i_lam_a, pderiv(c)),
                 pscale(pmul(c, padd(a.a, lam_ap)), cx(0.0, 1.0))),
            pmul(tg.adot, b));
        Poly rem;
        Poly q = pdivmod(num, den, &rem);
        // tolerance against the magnitudes entering `num`, which cancel
        const double term_scale =
            pnorm(tg.adot) * pnorm(b) +
            pnorm(a.a) * (2.0 * pnorm(pderiv(c)) + pnorm(c)) +
            pnorm(lam_ap) * pnorm(c);
        if (pnorm(rem) > 2e-6 * std::max(term_scale, 1e-300)) {
            if (getenv("WHITHAM_DEBUG"))
                fprintf(stderr, "[dbg] rem=%.3e num=%.3e scale=%.3e a=%.3e c=%.3e adot=%.3e\n",
                        pnorm(rem), pnorm(num), term_scale, pnorm(a.a), pnorm(c),
                        pnorm(tg.adot));
            fail(errc::division_residual, "2a does not divide the flow numerator");
        }
        return si_from_coords(si_coords(q, 3), 3);
    };
    tg.b1dot = bdot(b1, tg.c1);
    tg.b2dot = bdot(b2, tg.c2);
    return tg;
}

WhithamTangent tangent(const Frame& fr, double c1_at_1, double c2_at_1) {
    return tangent_pair(fr.a, fr.basis.b1, fr.basis.b2, c1_at_1, c2_at_1);
}

std::array<double, 2> phi(const Frame& fr) {
    std::array<double, 2> out{};
    const Poly* bs[2] = {&fr.basis.b1, &fr.basis.b2};
    for (int l = 0; l < 2; ++l) {
        const cx q = q_at_sym(fr.a, *bs[l]);
        if (std::abs(q.real()) > 1e-6 * (1.0 + std::abs(q)))
            fail(errc::quadrature_failure, "Sym-point component is not imaginary");
        out[size_t(l)] = q.imag();
    }
    return out;
}

/* ------------------------------ the flow ------------------------------ */

namespace {

struct PackedState {
    std::vector<double> y; // si-coords: a (5) ⧺ b1 (4) ⧺ b2 (4)
};

std::vector<double> pack(const Poly& a, const Poly& b1, const Poly& b2) {
    std::vector<double> y;
    y.reserve(13);
    for (double v : si_coords(a, 4)) y.push_back(v);
    for (double v : si_coords(b1, 3)) y.push_back(v);
    for (double v : si_coords(b2, 3)) y.push_back(v);
    return y;
}

void unpack(const std::vector<double>& y, Poly& a, Poly& b1, Poly& b2) {
    a = si_from_coords({y.begin(), y.begin() + 5}, 4);
    b1 = si_from_coords({y.begin() + 5, y.begin() + 9}, 3);
    b2 = si_from_coords({y.begin() + 9, y.begin() + 13}, 3);
}

// the two roots strictly inside the unit disk; errors out otherwise
std::array<cx, 2> disk_roots(const Poly& a) {
    std::array<cx, 2> in;
    int n = 0;
    for (cx r : poly_roots(a)) {
        if (std::abs(r) < 1.0 - 1e-12) {
            if (n < 2) in[size_t(n)] = r;
            ++n;
        }
    }
    if (n != 2) fail(errc::root_out_of_domain, "root count inside the disk is not two");
    return in;
}

double min_separation(const Poly& a) {
    const auto rs = poly_roots(a);
    double s = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < rs.size(); ++i) {
        if (std::abs(rs[i]) < 1.0) s = std::min(s, std::abs(rs[i]));
        for (size_t j = i + 1; j < rs.size(); ++j)
            s = std::min(s, std::abs(rs[i] - rs[j]));
    }
    return s;
}

struct StepContext {
    AdmissibleA a;
    CycleSet cycles;
    Poly b1, b2;
    std::array<double, 2> phi;
    double drift = 0.0;
};

// per-step validation: labelled cycles, A-period drift with re-projection,
// and the recomputed angles
StepContext validate_state(const Poly& apoly, const Poly& b1in, const Poly& b2in,
                           const std::array<cx, 2>& labels, double guard) {
    StepContext ctx;
    ctx.a = AdmissibleA{apoly, labels[0], labels[1]};
    ctx.b1 = b1in;
    ctx.b2 = b2in;
    ctx.cycles = build_cycles(ctx.a, guard);

    auto drift_of = [&](const Poly& u, const Poly& v) {
        const auto p1 = period_multi(ctx.a, {u, v}, ctx.cycles.A1);
        const auto p2 = period_multi(ctx.a, {u, v}, ctx.cycles.A2);
        double d = 0.0;
        for (const auto& p : {p1[0], p1[1], p2[0], p2[1]})
            d = std::max(d, std::abs(p.value));
        return d / (2.0 * kPi);
    };
    ctx.drift = drift_of(ctx.b1, ctx.b2);
    if (ctx.drift > 1e-9) {
        const BaKernel kern = solve_Ba(ctx.a, ctx.cycles);
        const std::vector<double> g1 = si_coords(kern.g1, 3);
        const std::vector<double> g2 = si_coords(kern.g2, 3);
        auto project = [&](const Poly& b) {
            const std::vector<double> x = si_coords(b, 3);
            double t1 = 0.0, t2 = 0.0;
            for (int j = 0; j < 4; ++j) {
                t1 += g1[size_t(j)] * x[size_t(j)];
                t2 += g2[size_t(j)] * x[size_t(j)];
            }
            std::vector<double> p(4);
            for (int j = 0; j < 4; ++j)
                p[size_t(j)] = t1 * g1[size_t(j)] + t2 * g2[size_t(j)];
            return si_from_coords(p, 3);
        };
        ctx.b1 = project(ctx.b1);
        ctx.b2 = project(ctx.b2);
        if (drift_of(ctx.b1, ctx.b2) > 1e-6)
            fail(errc::period_drift, "A-periods drifted beyond recovery");
    }

    const Poly* bs[2] = {&ctx.b1, &ctx.b2};
    for (int l = 0; l < 2; ++l) {
        const cx q = sym_arc_integral(ctx.a, *bs[l]);
        if (std::abs(q.real()) > 1e-6 * (1.0 + std::abs(q)))
            fail(errc::quadrature_failure, "Sym-point component is not imaginary");
        ctx.phi[size_t(l)] = q.imag();
    }
    return ctx;
}

} // namespace

namespace {

// scale-invariant fibre coordinate a₁/√a₂ of the rescaled quartic with roots
// (α_l − 1)/(iM), M = max modulus
double fibre_coordinate(const std::array<cx, 2>& al) {
    const double M = std::max(std::abs(al[0] - 1.0), std::abs(al[1] - 1.0));
    if (!(M > 0.0)) fail(errc::unclassifiable, "sample already at the corner");
    const cx k1 = (al[0] - 1.0) / cx(0.0, M);
    const cx k2 = (al[1] - 1.0) / cx(0.0, M);
    const double a1 = -2.0 * (k1.real() + k2.real());
    const double a2 = std::norm(k1) + std::norm(k2) + 4.0 * k1.real() * k2.real();
    if (!(a2 > 0.0)) fail(errc::unclassifiable, "degenerate rescaled quartic");
    return a1 / std::sqrt(a2);
}

// case dispatch on the extrapolated limit pair; `sA` and `last` feed the
// doubly-degenerate case (fibre coordinate and component ordering)
LimitClassification dispatch_limit(const std::array<cx, 2>& lim, double sA,
                                   const std::array<cx, 2>& last) {
    if (getenv("WHITHAM_DEBUG"))
        fprintf(stderr, "[dbg] lim = (%.6f%+.6fi, %.6f%+.6fi)  sA=%.6f\n",
                lim[0].real(), lim[0].imag(), lim[1].real(), lim[1].imag(), sA);
    constexpr double delta = 1e-3;
    const bool to0[2] = {std::abs(lim[0]) < delta, std::abs(lim[1]) < delta};
    const bool to1[2] = {std::abs(lim[0] - 1.0) < delta,
                         std::abs(lim[1] - 1.0) < delta};

    LimitClassification out;
    out.limit_alpha = lim;

    if (to0[0] && to0[1]) {
        out.limit_case = LimitCase::E;
        out.limit_phi = {0.0, 0.0};
        return out;
    }
    if (to1[0] && to1[1]) {
        out.limit_case = LimitCase::A;
        constexpr double smax = 1.1547005383792515;
        const double v = phi_A(std::clamp(sA, -smax, smax));
        // the component whose rescaled root has the smaller real part carries
        // the boundary angle itself
        const cx k1 = (last[0] - 1.0) / cx(0.0, 1.0);
        const cx k2 = (last[1] - 1.0) / cx(0.0, 1.0);
        if (k1.real() < k2.real())
            out.limit_phi = {v, kPi - v};
        else
            out.limit_phi = {kPi - v, v};
        return out;
    }
    for (int l = 0; l < 2; ++l) {
        const int k = 1 - l;
        if (to0[l] && to1[k]) {
            out.limit_case = LimitCase::C;
            out.limit_phi[size_t(l)] = kPi;
            out.limit_phi[size_t(k)] = 0.0;
            return out;
        }
        if (to0[l] && !to1[k]) {
            const double x = lim[size_t(k)].real();
            if (std::abs(lim[size_t(k)].imag()) > delta || !(x > delta) ||
                !(x < 1.0 - delta))
                fail(errc::unclassifiable, "vanishing root with a non-real partner");
            out.limit_case = LimitCase::D;
            out.limit_phi[size_t(l)] =
                kPi + 2.0 * (std::atan(std::sqrt(x)) - std::atan(1.0 / std::sqrt(x)));
            out.limit_phi[size_t(k)] = 0.0;
            return out;
        }
        if (to1[l] && !to0[k]) {
            if (std::abs(lim[size_t(k)]) > 1.0 - delta)
                fail(errc::unclassifiable, "partner root is not interior");
            out.limit_case = LimitCase::B;
            out.limit_phi[size_t(l)] = 0.0;
            out.limit_phi[size_t(k)] = kPi;
            return out;
        }
    }
    fail(errc::unclassifiable, "root limits match no boundary case");
}

// Neville evaluation at x = 0 of the interpolant through (x_i, v_i)
cx neville_at_zero(std::vector<double> xs, std::vector<cx> vs) {
    const size_t n = xs.size();
    for (size_t level = 1; level < n; ++level)
        for (size_t i = 0; i + level < n; ++i)
            vs[i] = (xs[i + level] * vs[i] - xs[i] * vs[i + 1]) /
                    (xs[i + level] - xs[i]);
    return vs[0];
}

// classification along an integrated trajectory: the leg's angles are affine
// in t, so the exit time is known and the roots extrapolate polynomially in
// the remaining time
LimitClassification classify_records(const std::vector<TrajectoryRecord>& traj,
                                     double t_exit) {
    if (traj.empty()) fail(errc::unclassifiable, "no accepted steps to classify");
    // geometric subsample of the remaining-time values, newest first
    std::vector<const TrajectoryRecord*> picks;
    const double tau_end = t_exit - traj.back().t;
    if (std::isfinite(t_exit) && tau_end > 0.0) {
        double want = tau_end;
        for (size_t j = traj.size(); j-- > 0;) {
            const double tau = t_exit - traj[j].t;
            if (tau >= want) {
                picks.push_back(&traj[j]);
                want = std::max(tau, want) * 2.0;
                if (picks.size() >= 6) break;
            }
        }
    } else {
        for (size_t j = traj.size(); j-- > 0 && picks.size() < 4;)
            picks.push_back(&traj[j]);
    }
    std::vector<double> xs;
    std::vector<cx> v0, v1;
    std::vector<cx> sv;
    for (const auto* r : picks) {
        xs.push_back(std::isfinite(t_exit) ? t_exit - r->t : traj.back().t - r->t);
        v0.push_back(r->alpha[0]);
        v1.push_back(r->alpha[1]);
    }
    const std::array<cx, 2> lim{neville_at_zero(xs, v0), neville_at_zero(xs, v1)};
    double sA = 0.0;
    try {
        for (const auto* r : picks) sv.push_back(fibre_coordinate(r->alpha));
        sA = neville_at_zero(xs, sv).real();
    } catch (const error&) {
        // only needed for the doubly-degenerate case; harmless otherwise
    }
    return dispatch_limit(lim, sA, traj.back().alpha);
}

} // namespace

LimitClassification classify_limit(const std::vector<std::array<cx, 2>>& trail) {
    if (trail.empty()) fail(errc::bad_argument, "empty root trail");

    auto aitken = [&](int l) {
        const size_t n = trail.size();
        const cx x2 = trail[n - 1][size_t(l)];
        if (n < 3) return x2;
        const cx x0 = trail[n - 3][size_t(l)], x1 = trail[n - 2][size_t(l)];
        const cx d1 = x1 - x0, d2 = x2 - x1;
        const cx den = d2 - d1;
        if (std::abs(den) < 1e-12 * (std::abs(d1) + std::abs(d2) + 1e-300)) return x2;
        return x2 - d2 * d2 / den;
    };
    const std::array<cx, 2> lim{aitken(0), aitken(1)};

    double sA = 0.0;
    try {
        const size_t n = trail.size();
        if (n >= 3) {
            const double s0 = fibre_coordinate(trail[n - 3]);
            const double s1 = fibre_coordinate(trail[n - 2]);
            const double s2 = fibre_coordinate(trail[n - 1]);
            const double d1 = s1 - s0, d2 = s2 - s1, den = d2 - d1;
            sA = std::abs(den) < 1e-12 * (std::abs(d1) + std::abs(d2) + 1e-300)
                     ? s2
                     : s2 - d2 * d2 / den;
        } else {
            sA = fibre_coordinate(trail[n - 1]);
        }
    } catch (const error&) {
    }
    return dispatch_limit(lim, sA, trail.back());
}

FlowState flow(const Frame& fr, std::array<double, 2> delta, const FlowOptions& opt) {
    const std::array<double, 2> phi0 = fr.phi;
    FlowState st;
    if (delta[0] == 0.0 && delta[1] == 0.0) {
        st.frame = fr;
        st.t = phi0;
        st.phi = phi0;
        return st;
    }

    OdeFun rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        Poly a, b1, b2;
        unpack(y, a, b1, b2);
        const auto in = disk_roots(a);
        const double a1v = peval(a, cx(1.0)).real();
        if (!(a1v > 0.0)) fail(errc::domain_error, "a(1) is not positive");
        const double root = std::sqrt(a1v);
        const WhithamTangent tg = tangent_pair(AdmissibleA{a, in[0], in[1]}, b1, b2,
                                               root * delta[0], root * delta[1]);
        dy = pack(tg.adot, tg.b1dot, tg.b2dot);
    };

    // the leg is affine in the angles, so the time at which it would leave the
    // open triangle is known exactly; used to pace the classification samples
    double t_exit = std::numeric_limits<double>::infinity();
    if (delta[0] < 0.0) t_exit = std::min(t_exit, -phi0[0] / delta[0]);
    if (delta[1] < 0.0) t_exit = std::min(t_exit, -phi0[1] / delta[1]);
    if (delta[0] + delta[1] > 0.0)
        t_exit = std::min(t_exit, (kPi - phi0[0] - phi0[1]) / (delta[0] + delta[1]));

    std::vector<double> y = pack(fr.a.a, fr.basis.b1, fr.basis.b2);
    std::array<cx, 2> labels{fr.a.alpha1, fr.a.alpha2};
    std::vector<TrajectoryRecord> traj;
    StepContext ctx;
    bool have_ctx = false;

    double t = 0.0, h = opt.h_init;
    long steps = 0;
    bool boundary = false;
    std::string boundary_reason;

    while (t < 1.0 && !boundary) {
        if (++steps > opt.max_steps)
            fail(errc::quadrature_failure, "flow step budget exhausted");
        const double hh = std::min(h, 1.0 - t);
        std::vector<double> y5, ev;
        bool rejected = false;
        double err = 0.0;
        try {
            dp_step(rhs, t, y, hh, y5, ev);
        } catch (const error& e) {
            if (getenv("WHITHAM_DEBUG"))
                fprintf(stderr, "[dbg] t=%.9f h=%.2e stage threw %s: %s\n", t, hh,
                        errc_name(e.code), e.what());
            rejected = true; // stage left the admissible set: shrink and retry
        }
        if (!rejected) {
            Poly a, b1, b2;
            unpack(y, a, b1, b2);
            const Poly apd = pderiv(a);
            const Poly da = si_from_coords({ev.begin(), ev.begin() + 5}, 4);
            for (cx r : poly_roots(a)) {
                const double dn = std::max(std::abs(peval(apd, r)), 1e-12);
                err = std::max(err, std::abs(peval(da, r)) / dn);
            }
            for (size_t k = 5; k < 13; ++k) err = std::max(err, std::abs(ev[k]));
            rejected = err > opt.root_tol;
        }
        if (rejected) {
            if (hh <= opt.h_min * 1.0001) {
                boundary = true;
                boundary_reason = "step size collapsed";
                break;
            }
            h = std::max(opt.h_min,
                         hh * std::clamp(err > 0.0 ? 0.9 * std::pow(opt.root_tol / err, 0.2)
                                                   : 0.5,
                                         0.1, 0.5));
            continue;
        }

        // candidate admissibility short of acceptance
        Poly a5, b15, b25;
        unpack(y5, a5, b15, b25);
        std::array<cx, 2> in5;
        double sep = 0.0, margin = 0.0;
        bool admissible = true;
        try {
            in5 = disk_roots(a5);
            sep = min_separation(a5);
            margin = cycle_margin(AdmissibleA{a5, in5[0], in5[1]});
        } catch (const error& e) {
            if (getenv("WHITHAM_DEBUG"))
                fprintf(stderr, "[dbg] t=%.9f h=%.2e candidate threw %s\n", t, hh,
                        errc_name(e.code));
            admissible = false;
        }
        if (getenv("WHITHAM_DEBUG") && admissible &&
            (sep < opt.sep_stop || margin < opt.margin_min))
            fprintf(stderr, "[dbg] t=%.9f h=%.2e veto sep=%.3e margin=%.4f\n", t, hh,
                    sep, margin);
        if (!admissible || sep < opt.sep_stop || margin < opt.margin_min) {
            if (hh <= opt.h_min * 1.0001) {
                boundary = true;
                boundary_reason = "degeneration ahead";
                break;
            }
            h = std::max(opt.h_min, 0.5 * hh);
            continue;
        }

        // accept
        t += hh;
        y = y5;
        {
            // keep the leading-coefficient gauge |a₄| = 1 exactly; rescaling
            // (a, b) ↦ (a/s, b/√s) leaves every period and angle unchanged
            const double s = std::abs(a5.size() > 4 ? a5[4] : cx(1.0));
            if (std::abs(s - 1.0) > 1e-15) {
                a5 = pscale(a5, 1.0 / s);
                b15 = pscale(b15, 1.0 / std::sqrt(s));
                b25 = pscale(b25, 1.0 / std::sqrt(s));
            }
        }
        const std::vector<cx> matched =
            match_roots({labels[0], labels[1]}, {in5[0], in5[1]});
        labels = {matched[0], matched[1]};

        ctx = validate_state(a5, b15, b25, labels, 0.5 * opt.margin_min);
        have_ctx = true;
        y = pack(ctx.a.a, ctx.b1, ctx.b2);

        if (ctx.phi[0] < -1e-7 || ctx.phi[1] < -1e-7 ||
            ctx.phi[0] + ctx.phi[1] > kPi + 1e-7) {
            boundary = true;
            boundary_reason = "angles left the open triangle";
        }

        const TrajectoryRecord rec{t, ctx.phi, labels, ctx.drift, hh};
        traj.push_back(rec);
        if (opt.log) opt.log->push_back(rec);

        h = std::min(opt.h_max,
                     hh * std::clamp(err > 0.0 ? 0.9 * std::pow(opt.root_tol / err, 0.2)
                                               : 5.0,
                                     1.0, 5.0));
    }

    if (boundary)
        throw boundary_error(classify_records(traj, t_exit), std::move(traj),
                             "boundary hit: " + boundary_reason);

    if (!have_ctx) fail(errc::quadrature_failure, "leg finished without a step");

    st.frame.a = ctx.a;
    st.frame.basis = BaBasis{ctx.b1, ctx.b2, BaNorm::period_map, ctx.cycles};
    st.frame.s1 = fr.s1;
    st.frame.s2 = fr.s2;
    st.frame.phi = ctx.phi;
    st.t = {phi0[0] + delta[0], phi0[1] + delta[1]};
    st.phi = ctx.phi;

    const double scale = 1.0 + std::max(std::abs(delta[0]), std::abs(delta[1]));
    if (std::max(std::abs(st.phi[0] - st.t[0]), std::abs(st.phi[1] - st.t[1])) >
        1e-5 * scale)
        fail(errc::period_drift, "translation property violated along the leg");
    return st;
}

BoundaryResult flow_to_boundary(const Frame& fr, std::array<double, 2> direction,
                                const FlowOptions& opt) {
    const double n = std::max(std::abs(direction[0]), std::abs(direction[1]));
    if (!(n > 0.0)) fail(errc::bad_argument, "zero flow direction");
    const std::array<double, 2> delta{2.0 * kPi * direction[0] / n,
                                      2.0 * kPi * direction[1] / n};
    try {
        flow(fr, delta, opt);
    } catch (const boundary_error& e) {
        return BoundaryResult{e.limit, e.trajectory};
    }
    // a leg longer than the triangle diameter cannot stay interior
    fail(errc::unclassifiable, "flow crossed the triangle without degenerating");
}

AdmissibleA locate_torus(double p1, double p2, const Frame& seed,
                         const FlowOptions& opt) {
    const std::array<double, 2> target{kPi * p1, kPi * p2};
    if (!(p1 > 0.0 && p2 > 0.0 && p1 + p2 < 1.0))
        fail(errc::bad_argument, "target is not strictly inside the triangle");

    Frame cur = seed;
    bool detoured = false;
    double res_prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 10; ++it) {
        const std::array<double, 2> delta{target[0] - cur.phi[0],
                                          target[1] - cur.phi[1]};
        const double res = std::max(std::abs(delta[0]), std::abs(delta[1]));
        if (res < 1e-7) return cur.a;
        if (res > 0.5 * res_prev && it > 1)
            fail(errc::quadrature_failure, "angle correction stalled");
        res_prev = res;
        try {
            cur = flow(cur, delta, opt).frame;
        } catch (const boundary_error&) {
            if (detoured) throw;
            detoured = true; // retry through the centroid, far from all edges
            const std::array<double, 2> mid{kPi / 3.0 - cur.phi[0],
                                            kPi / 3.0 - cur.phi[1]};
            cur = flow(cur, mid, opt).frame;
            res_prev = std::numeric_limits<double>::infinity();
        }
    }
    fail(errc::quadrature_failure, "angle correction did not converge");
}

} // namespace sg
