#include "blowup.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "curve.hpp"
#include "ode.hpp"
#include "quad.hpp"
#include "roots.hpp"

namespace sg {

namespace {

constexpr double k_a1_max = 1.1547005383792515; // 2/sqrt(3)

// Period functionals of (k^2+beta)/nu dk are affine in beta: P(beta) =
// base + beta * unit.  Both coefficients are real integrals made smooth by a
// cos(theta) substitution along the relevant cut, so no endpoint singularity
// ever reaches the quadrature.
struct AffinePeriod {
    double base, unit;
    double eval(double beta) const { return base + beta * unit; }
};

// alpha in (-2,2): branch points sit on the unit circle, one per quadrant.
// The vanishing cycle surrounds the right-half-plane pair c +- i h; along the
// straight cut between them a(kappa) = h^2 sin^2(theta) * ((2c+ih cos t)^2+h^2),
// and the second factor has positive real part throughout, so the principal
// square root is the correct continuation.
AffinePeriod period_inner(double alpha) {
    const double psi = std::atan2(std::sqrt(4.0 - alpha * alpha), -alpha);
    const double c = std::cos(0.5 * psi);
    const double h = std::sin(0.5 * psi);
    auto f = [&](double th) {
        const cx kappa(c, h * std::cos(th));
        const cx w = cx(2.0 * c, h * std::cos(th));
        const cx W = std::sqrt(w * w + h * h);
        return cx((kappa * kappa / W).real(), (1.0 / W).real());
    };
    QuadResult r = integrate(f, 0.0, M_PI, 1e-12);
    return AffinePeriod{2.0 * r.value.real(), 2.0 * r.value.imag()};
}

// alpha > 2: branch points +-i y1, +-i y2 with y1 y2 = 1; the condition is
// that (beta - y^2)/sqrt(|a(iy)|) integrates to zero over y in (y1, y2).
// y = m - hh cos(theta) absorbs both 1/sqrt endpoint factors.
AffinePeriod period_outer(double alpha) {
    const double s = std::sqrt(alpha * alpha - 4.0);
    const double y1 = std::sqrt(0.5 * (alpha - s));
    const double y2 = std::sqrt(0.5 * (alpha + s));
    const double m = 0.5 * (y1 + y2), hh = 0.5 * (y2 - y1);
    auto f = [&](double th) {
        const double y = m - hh * std::cos(th);
        const double u = 1.0 / std::sqrt((y + y1) * (y2 + y));
        return cx(-y * y * u, u);
    };
    QuadResult r = integrate(f, 0.0, M_PI, 1e-12);
    return AffinePeriod{2.0 * r.value.real(), 2.0 * r.value.imag()};
}

} // namespace

double beta_of_alpha(double alpha, double period_tol) {
    if (!(alpha > -2.0 && alpha < 2.0) && !(alpha > 2.0))
        fail(errc::domain_error, "alpha outside (-2,2) u (2,inf)");

    const AffinePeriod P = (alpha < 2.0) ? period_inner(alpha) : period_outer(alpha);
    if (P.unit == 0.0) fail(errc::singular_system, "degenerate period functional");

    // linear seed, then honest bisection on the period value
    const double seed = -P.base / P.unit;
    double lo = seed - 1e-6, hi = seed + 1e-6;
    for (int k = 0; k < 80 && P.eval(lo) * P.eval(hi) > 0.0; ++k) {
        const double w = hi - lo;
        lo -= w;
        hi += w;
    }
    if (P.eval(lo) * P.eval(hi) > 0.0)
        fail(errc::root_bracket, "no sign change for beta");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = P.eval(mid);
        if (std::abs(v) < 0.5 * period_tol) return mid;
        if (v * P.eval(lo) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double alpha0() {
    static std::once_flag flag;
    static double value = 0.0;
    std::call_once(flag, [] {
        double lo = 1.0, hi = 1.6;
        if (!(beta_of_alpha(lo) < 0.0 && beta_of_alpha(hi) > 0.0))
            fail(errc::root_bracket, "beta does not change sign on (1.0, 1.6)");
        // tighter than the 1e-8 contract so that |beta(alpha0)| stays under 1e-9
        while (hi - lo > 2e-9) {
            const double mid = 0.5 * (lo + hi);
            (beta_of_alpha(mid) < 0.0 ? lo : hi) = mid;
        }
        value = 0.5 * (lo + hi);
    });
    return value;
}

AbDeriv ab_flow_field(double alpha, double beta, double gamma) {
    return AbDeriv{4.0 - alpha * alpha, 1.0 - alpha * beta + beta * beta,
                   0.5 * (alpha - 2.0 * beta) * gamma};
}

SCircleDeriv field_local(const SCirclePoint& p, LocalVariant variant) {
    const double a1 = p.a1, a2 = p.a2, a4 = p.a4;
    const double disc = a2 - 0.25 * a1 * a1;
    switch (variant) {
    case LocalVariant::Full:
        return SCircleDeriv{(4.0 * a2 - 3.0 * a1 * a1) * disc - 16.0 * a4,
                            -4.0 * a1 * a4, 6.0 * a1 * disc * a4};
    case LocalVariant::FixA4:
        return SCircleDeriv{disc * (4.0 * a2 - 4.5 * a1 * a1) - 16.0 * a4,
                            -a1 * (3.0 * a2 * disc + 4.0 * a4), 0.0};
    case LocalVariant::FixA2:
        if (std::abs(a2 - 1.0) > 1e-9)
            fail(errc::bad_argument, "FixA2 field requires a2 = 1");
        return SCircleDeriv{
            2.0 * a4 * (8.0 - a1 * a1) - (4.0 - 3.0 * a1 * a1) * (1.0 - 0.25 * a1 * a1),
            0.0, a1 * a4 * (1.5 * a1 * a1 - 6.0 - 8.0 * a4)};
    }
    fail(errc::bad_argument, "unknown field variant");
}

double g_lower_bound(double a1) {
    const double s = a1 * a1;
    return (3.0 * s - 4.0) * (s - 4.0) / (8.0 * (8.0 - s));
}

namespace {

struct GCurveData {
    // merged, a1-sorted samples (a1, a4, da4/da1) covering both branches
    std::vector<double> x, y, slope;
    double shoot_a4 = 0.0;
};

enum class Fate { high, low, undecided };

// forward fate of the FixA2 trajectory started at (0, v): does it pass the
// saddle at (2/sqrt(3), 0) (high) or turn back left (low)?
Fate classify_shot(double v) {
    std::vector<double> y{0.0, v};
    Fate fate = Fate::undecided;
    OdeFun f = [](double, const std::vector<double>& s, std::vector<double>& d) {
        const SCircleDeriv dv = field_local(SCirclePoint{s[0], 1.0, s[1]}, LocalVariant::FixA2);
        d = {dv.da1, dv.da4};
    };
    OdeOptions opt;
    opt.abs_tol = 1e-12;
    opt.h_max = 0.05;
    ode_drive(f, 0.0, 80.0, y, opt, [&](double, std::vector<double>& s, double) {
        if (s[0] > k_a1_max + 0.2) {
            fate = Fate::high;
            return OdeSignal::stop;
        }
        const SCircleDeriv dv =
            field_local(SCirclePoint{s[0], 1.0, s[1]}, LocalVariant::FixA2);
        if (dv.da1 <= 0.0 || s[1] <= 0.0) {
            fate = Fate::low;
            return OdeSignal::stop;
        }
        return OdeSignal::proceed;
    });
    return fate;
}

void trace_branch(double v, double direction, GCurveData& out) {
    std::vector<double> y{0.0, v};
    OdeFun f = [](double, const std::vector<double>& s, std::vector<double>& d) {
        const SCircleDeriv dv = field_local(SCirclePoint{s[0], 1.0, s[1]}, LocalVariant::FixA2);
        d = {dv.da1, dv.da4};
    };
    OdeOptions opt;
    opt.abs_tol = 1e-12;
    opt.h_max = 0.02;
    auto record = [&](const std::vector<double>& s) {
        const SCircleDeriv dv =
            field_local(SCirclePoint{s[0], 1.0, s[1]}, LocalVariant::FixA2);
        if (dv.da1 == 0.0) return;
        out.x.push_back(s[0]);
        out.y.push_back(s[1]);
        out.slope.push_back(dv.da4 / dv.da1);
    };
    record(y);
    try {
        ode_drive(f, 0.0, direction * 80.0, y, opt,
                  [&](double, std::vector<double>& s, double) {
                      const SCircleDeriv dv = field_local(SCirclePoint{s[0], 1.0, s[1]},
                                                          LocalVariant::FixA2);
                      if (dv.da1 <= 0.0 || s[1] <= 0.0 || std::abs(s[0]) > k_a1_max)
                          return OdeSignal::stop;
                      record(s);
                      return OdeSignal::proceed;
                  });
    } catch (const error&) {
        // a collapsed step near the saddle just ends the usable coverage
    }
}

const GCurveData& g_curve_data() {
    static std::once_flag flag;
    static GCurveData data;
    std::call_once(flag, [] {
        double lo = 0.30, hi = 0.90;
        if (classify_shot(lo) != Fate::low || classify_shot(hi) != Fate::high)
            fail(errc::root_bracket, "separatrix bracket invalid");
        for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            const Fate fate = classify_shot(mid);
            if (fate == Fate::low)
                lo = mid;
            else if (fate == Fate::high)
                hi = mid;
            else
                break; // stayed near the saddle beyond the time budget: converged
        }
        data.shoot_a4 = 0.5 * (lo + hi);
        trace_branch(data.shoot_a4, +1.0, data);
        trace_branch(data.shoot_a4, -1.0, data);

        std::vector<size_t> idx(data.x.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](size_t i, size_t j) { return data.x[i] < data.x[j]; });
        GCurveData sorted;
        sorted.shoot_a4 = data.shoot_a4;
        for (size_t i : idx) {
            if (!sorted.x.empty() && data.x[i] <= sorted.x.back()) continue;
            sorted.x.push_back(data.x[i]);
            sorted.y.push_back(data.y[i]);
            sorted.slope.push_back(data.slope[i]);
        }
        data = sorted;
        if (data.x.size() < 16) fail(errc::manifold_escape, "separatrix trace too short");
    });
    return data;
}

} // namespace

namespace {

// principal sqrt of A(kappa) flipped onto the sheet of ref
cx nu_matched(const Poly& A, cx kappa, cx ref) {
    const cx v = std::sqrt(peval(A, kappa));
    return (std::abs(v - ref) <= std::abs(v + ref)) ? v : -v;
}

// ∫ b/ν dκ along the straight segment [p, q] by 7-point Gauss, the sheet
// carried node to node from ν(p); segments stay short against the branch
// clearance, so nearest-value matching cannot skip a sheet.
struct SegQ {
    cx integral;
    cx nu_end;
};

constexpr double gauss_x[7] = {-0.9491079123427585, -0.7415311855993945,
                               -0.4058451513773972, 0.0,
                               0.4058451513773972,  0.7415311855993945,
                               0.9491079123427585};
constexpr double gauss_w[7] = {0.1294849661688697, 0.2797053914892766,
                               0.3818300505051189, 0.4179591836734694,
                               0.3818300505051189, 0.2797053914892766,
                               0.1294849661688697};

SegQ segment_q(const Poly& A, const Poly& b, cx p, cx q, cx nu_p) {
    cx acc = 0.0, ref = nu_p;
    for (int i = 0; i < 7; ++i) {
        const cx k = p + 0.5 * (gauss_x[i] + 1.0) * (q - p);
        ref = nu_matched(A, k, ref);
        acc += 0.5 * gauss_w[i] * peval(b, k) / ref;
    }
    return SegQ{acc * (q - p), nu_matched(A, q, ref)};
}

} // namespace

double phi_A(double s) {
    if (!(std::abs(s) <= k_a1_max + 1e-12))
        fail(errc::bad_argument, "s outside [-2/sqrt(3), 2/sqrt(3)]");
    if (std::abs(s) >= k_a1_max - 1e-9) return s < 0.0 ? 0.0 : M_PI;
    if (s == 0.0) return 0.5 * M_PI; // symmetric middle point of the fibre

    const double g = g_curve(s);
    const Poly A{cx(g), 0.0, 1.0, cx(s), 1.0};
    const Poly braw{0.0, cx(0.0, 0.5 * s), cx(0.0, 1.0)}; // i·κ(κ + s/2): the
    // unique monic quadratic whose 1/κ tail cancels at κ=∞, so b/ν dκ is
    // residue free there
    const std::vector<cx> roots = poly_roots(A);
    std::vector<cx> up;
    for (cx r : roots)
        if (r.imag() > 0.0) up.push_back(r);
    if (up.size() != 2) fail(errc::degenerate_roots, "quartic roots not in conjugate pairs");

    // normalise b so the period around both upper roots is 2πi.  The
    // integrator divides by the coordinate, so feed it κ·b.
    const double off = 0.5 * std::min(up[0].imag(), up[1].imag());
    const Contour B = stadium(up[0], up[1], off);
    for (cx r : roots)
        if (winding_around(B, r) != (r.imag() > 0.0 ? 1 : 0))
            fail(errc::cycle_collision, "normalising cycle entangled with far roots");
    const BranchPath bpath =
        continue_nu_w(A, roots, B, std::sqrt(peval(A, B.nodes.front())));
    const QuadResult PB = path_integrals(bpath, {pmul(Poly{0.0, 1.0}, braw)})[0];
    if (!(std::abs(PB.value.imag()) > 1e3 * std::abs(PB.value.real())))
        fail(errc::quadrature_failure, "normalising period not imaginary");
    const Poly b = pscale(braw, cx(2.0 * M_PI / std::abs(PB.value.imag())));

    // Trace the level component of {Re q = 0} leaving κ=0 vertically: q is
    // the antiderivative of b/ν anchored (odd under ν ↦ −ν) so it vanishes
    // at every branch point and has zero real part on the real locus.
    double sep = 1e300;
    for (size_t i = 0; i < roots.size(); ++i)
        for (size_t j = i + 1; j < roots.size(); ++j)
            sep = std::min(sep, std::abs(roots[i] - roots[j]));
    const double rho = 0.25 * sep;
    const double step = std::min(1e-3, rho / 3.0);

    cx kcur(0.0, step);
    SegQ sq = segment_q(A, b, 0.0, kcur, std::sqrt(cx(g)));
    cx q = sq.integral;
    cx nucur = sq.nu_end;
    cx dir(0.0, 1.0);
    int hit = -1;
    for (long it = 0; hit < 0; ++it) {
        if (it > 200000) fail(errc::quadrature_failure, "level-set trace stalled");
        for (int j = 0; j < 2 && hit < 0; ++j)
            if (std::abs(kcur - up[j]) < rho) hit = j;
        if (hit >= 0) break;
        if (std::abs(kcur) > 5.0) fail(errc::quadrature_failure, "level-set trace escaped");
        const cx f = peval(b, kcur) / nucur;
        if (!(std::abs(f) > 0.0)) fail(errc::quadrature_failure, "stationary trace point");
        cx t = cx(0.0, 1.0) * std::conj(f) / std::abs(f);
        if (t.real() * dir.real() + t.imag() * dir.imag() < 0.0) t = -t;
        const cx n = std::conj(f) / std::abs(f);
        cx kp = kcur + step * t;
        for (int c = 0; c < 3; ++c) {
            sq = segment_q(A, b, kcur, kp, nucur);
            const cx fp = peval(b, kp) / sq.nu_end;
            const double dF = (fp * n).real();
            if (std::abs(dF) < 1e-30) fail(errc::quadrature_failure, "degenerate corrector");
            kp -= n * ((q + sq.integral).real() / dF);
        }
        sq = segment_q(A, b, kcur, kp, nucur);
        q += sq.integral;
        nucur = sq.nu_end;
        dir = t;
        kcur = kp;
    }
    const cx alpha = up[hit];
    if (alpha.real() * s < 0.0)
        fail(errc::quadrature_failure, "level set landed on unexpected root");

    // finish into the branch point in the w = √(κ−α) chart, where with
    // ν = w·ĝ(w), ĝ = ±√(A/(κ−α)), the pullback 2·b(α+w²)/ĝ(w) is smooth
    // and the integral is path independent: a straight w-segment suffices.
    const Poly R = deflate(A, alpha);
    const cx w_s = std::sqrt(kcur - alpha);
    cx ghat = nucur / w_s;
    cx tail = 0.0;
    const int m = 16;
    for (int seg = 0; seg < m; ++seg) {
        const cx p = w_s * (1.0 - double(seg) / m);
        const cx e = w_s * (1.0 - double(seg + 1) / m);
        cx acc = 0.0;
        for (int i = 0; i < 7; ++i) {
            const cx w = p + 0.5 * (gauss_x[i] + 1.0) * (e - p);
            const cx v = std::sqrt(peval(R, alpha + w * w));
            ghat = (std::abs(v - ghat) <= std::abs(v + ghat)) ? v : -v;
            acc += 0.5 * gauss_w[i] * 2.0 * peval(b, alpha + w * w) / ghat;
        }
        tail += acc * (e - p);
    }
    q += tail;

    // q vanishes exactly at the branch point, so the whole run must return a
    // purely imaginary value; its residual real part measures the trace error
    if (std::abs(q.real()) > 1e-5 * (1.0 + std::abs(q.imag())))
        fail(errc::quadrature_failure, "level-set trace lost the zero level");
    const double h = std::abs(q.imag());
    return std::clamp(s < 0.0 ? h : M_PI - h, 0.0, M_PI);
}

double g_curve(double a1) {
    if (!(std::abs(a1) < k_a1_max - 1e-6))
        fail(errc::bad_argument, "a1 outside the open fibre interval");
    const GCurveData& d = g_curve_data();
    if (a1 < d.x.front() || a1 > d.x.back())
        fail(errc::manifold_escape, "query outside traced separatrix coverage");
    const auto it = std::upper_bound(d.x.begin(), d.x.end(), a1);
    size_t j = size_t(it - d.x.begin());
    if (j == 0) j = 1;
    if (j >= d.x.size()) j = d.x.size() - 1;
    const size_t i = j - 1;
    const double h = d.x[j] - d.x[i];
    const double t = (a1 - d.x[i]) / h;
    // cubic Hermite in a1 with slopes from the vector field itself
    const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    const double h10 = t * (1.0 - t) * (1.0 - t);
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);
    return h00 * d.y[i] + h10 * h * d.slope[i] + h01 * d.y[j] + h11 * h * d.slope[j];
}

} // namespace sg
