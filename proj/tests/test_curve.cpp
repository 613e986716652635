#include "doctest.h"
#include "curve.hpp"
#include "errors.hpp"
#include "quad.hpp"
#include <Eigen/Dense>
#include <cmath>

using namespace sg;

namespace {

errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const error& e) {
        return e.code;
    }
    return errc::ok;
}

// Independent dense-grid oracle: per-segment trapezoid sums (kinks are always
// node points), ν continued by naive sign tracking from the given seed.
cx trapezoid_period(const AdmissibleA& a, const Poly& b, const Contour& c, cx seed,
                    int N = 100000) {
    const Poly w = pmul(a.a, Poly{cx(0.0), cx(1.0)});
    const double L = c.length();
    cx nu = seed, sum = 0.0;
    for (size_t i = 0; i + 1 < c.nodes.size(); ++i) {
        const cx d = c.nodes[i + 1] - c.nodes[i];
        const int n = std::max(8, (int)std::ceil(N * std::abs(d) / L));
        cx f_prev;
        for (int j = 0; j <= n; ++j) {
            const cx lam = c.nodes[i] + d * (double(j) / n);
            cx s = std::sqrt(peval(w, lam));
            if (std::abs(s - nu) > std::abs(s + nu)) s = -s;
            nu = s;
            const cx f = peval(b, lam) / s / lam * d;
            if (j > 0) sum += 0.5 * (f + f_prev) / double(n);
            f_prev = f;
        }
    }
    return sum;
}

const AdmissibleA kConj = from_disk_roots(cx(0.53, 0.53), cx(0.53, -0.53));

}  // namespace

TEST_CASE("stadium geometry") {
    const cx p(0.2, 0.1), q(1.4, -0.3);
    const Contour c = stadium(p, q, 0.25);
    CHECK(c.closed());
    for (cx z : c.nodes) {
        const cx d = q - p;
        double t = ((z - p) * std::conj(d)).real() / std::norm(d);
        t = std::clamp(t, 0.0, 1.0);
        CHECK(std::abs(z - (p + t * d)) >= 0.25 * (1.0 - 1e-12));
    }
    CHECK(winding_around(c, 0.5 * (p + q)) == 1);
    CHECK(winding_around(c, p) == 1);
    CHECK(winding_around(c, cx(5.0, 5.0)) == 0);
    CHECK(winding_around(reversed(c), p) == -1);
}

TEST_CASE("continue_nu monodromy") {
    const auto bps = branch_points(kConj);
    const cx alpha1 = kConj.alpha1;

    // constant path
    Contour pt;
    pt.nodes = {cx(2.0, 1.0)};
    const cx s0 = std::sqrt(peval(pmul(kConj.a, Poly{cx(0.0), cx(1.0)}), cx(2.0, 1.0)));
    const BranchPath bp0 = continue_nu(kConj, pt, s0);
    CHECK(std::abs(bp0.end_nu() - s0) < 1e-12);

    // loop around exactly one branch point: endpoint = -seed
    double rad = 1e9;
    for (cx b : bps)
        if (std::abs(b - alpha1) > 1e-12) rad = std::min(rad, 0.3 * std::abs(b - alpha1));
    Contour loop1;
    for (int j = 0; j <= 256; ++j)
        loop1.nodes.push_back(alpha1 + std::polar(rad, 2.0 * M_PI * j / 256));
    loop1.nodes.back() = loop1.nodes.front();
    const cx s1 = std::sqrt(peval(pmul(kConj.a, Poly{cx(0.0), cx(1.0)}), loop1.nodes[0]));
    CHECK(std::abs(continue_nu(kConj, loop1, s1).end_nu() + s1) < 1e-9 * std::abs(s1));

    // loop around two branch points: endpoint = +seed
    const CycleSet cs = build_cycles(kConj);
    const cx sA = seed_from_sym(kConj, cs.A1.nodes.front());
    CHECK(std::abs(continue_nu(kConj, cs.A1, sA).end_nu() - sA) < 1e-9 * std::abs(sA));

    // invalid seed
    CHECK(code_of([&] { continue_nu(kConj, loop1, 2.0 * s1); }) == errc::bad_argument);

    // path through a branch point
    Contour hit;
    hit.nodes = {alpha1 - cx(0.5, 0.0), alpha1 + cx(0.5, 0.0)};
    CHECK(code_of([&] { continue_nu(kConj, hit, std::sqrt(peval(pmul(kConj.a, Poly{cx(0.0), cx(1.0)}), hit.nodes[0]))); }) ==
          errc::branch_collision);
}

TEST_CASE("build_cycles geometry and intersection pattern") {
    const CycleSet cs = build_cycles(kConj);
    const cx r1 = 1.0 / std::conj(kConj.alpha1);
    CHECK(std::abs(winding_around(cs.A1, kConj.alpha1)) == 1);
    CHECK(std::abs(winding_around(cs.A1, r1)) == 1);
    CHECK(winding_around(cs.A1, kConj.alpha2) == 0);
    CHECK(winding_around(cs.B1, cx(0.0)) == winding_around(cs.B1, kConj.alpha1));

    CHECK(intersection_number(kConj, cs.A1, cs.B1) == 1);
    CHECK(intersection_number(kConj, cs.A2, cs.B2) == 1);
    CHECK(intersection_number(kConj, cs.A1, cs.B2) == 0);
    CHECK(intersection_number(kConj, cs.A2, cs.B1) == 0);
    // antisymmetry of the pairing
    CHECK(intersection_number(kConj, cs.B1, cs.A1) == -1);

    // vertical-root example: disjoint stadiums, canonical pairing
    const AdmissibleA av = from_disk_roots(cx(0.0, 0.5), cx(0.0, -0.5));
    const CycleSet cv = build_cycles(av);
    CHECK(intersection_number(av, cv.A1, cv.B1) == 1);
    CHECK(intersection_number(av, cv.A2, cv.B2) == 1);
    CHECK(intersection_number(av, cv.A1, cv.B2) == 0);

    // colinear roots: overlapping nested segments
    CHECK(code_of([] { build_cycles(from_disk_roots(cx(0.3, 0.0), cx(0.6, 0.0))); }) ==
          errc::cycle_collision);
}

TEST_CASE("period against dense trapezoid oracle") {
    const Poly b = si_from_coords({0.7, -0.3, 1.1, 0.25}, 3);
    const CycleSet cs = build_cycles(kConj);
    // B₂'s image reaches |λ| ~ 1/offset, where the trapezoid rule needs a denser
    // grid for the same accuracy; the oracle error scales as h².
    const std::pair<const Contour*, int> cases[] = {{&cs.A1, 100000}, {&cs.B2, 1600000}};
    for (auto [c, N] : cases) {
        const QuadResult p = period(kConj, b, *c);
        const cx o = trapezoid_period(kConj, b, *c, seed_from_sym(kConj, c->nodes.front()), N);
        CHECK(std::abs(p.value - o) < 1e-8 * (1.0 + std::abs(o)));
        CHECK(p.est_error < 1e-7 * (1.0 + std::abs(p.value)));
    }
}

TEST_CASE("A-periods of real differentials are real") {
    const AdmissibleA as[] = {kConj, from_disk_roots(cx(0.0, 0.5), cx(0.0, -0.5)),
                              from_disk_roots(cx(0.4, 0.2), cx(-0.3, 0.5))};
    for (const AdmissibleA& a : as) {
        const CycleSet cs = build_cycles(a);
        const std::vector<Poly> basis = si_real_basis(3);
        for (const Contour* A : {&cs.A1, &cs.A2}) {
            const auto ps = period_multi(a, basis, *A);
            for (const QuadResult& p : ps)
                CHECK(std::abs(p.value.imag()) < 1e-8 * (1.0 + std::abs(p.value)));
        }
    }
}

TEST_CASE("contractible cycle integrates to zero") {
    Contour c;
    for (int j = 0; j <= 64; ++j)
        c.nodes.push_back(cx(-0.5, -0.5) + std::polar(0.08, 2.0 * M_PI * j / 64));
    c.nodes.back() = c.nodes.front();
    const Poly b = si_from_coords({1.0, 0.4, -0.2, 0.9}, 3);
    CHECK(std::abs(period(kConj, b, c).value) < 1e-10);
}

TEST_CASE("period additivity under concatenation") {
    const Poly b = si_from_coords({0.7, -0.3, 1.1, 0.25}, 3);
    const CycleSet cs = build_cycles(kConj);
    const Contour& full = cs.A1;
    const size_t m = full.nodes.size() / 2;
    Contour X, Y;
    X.nodes.assign(full.nodes.begin(), full.nodes.begin() + m + 1);
    Y.nodes.assign(full.nodes.begin() + m, full.nodes.end());

    auto integrate_path = [&](const Contour& c, cx seed) {
        const BranchPath path = continue_nu(kConj, c, seed);
        QuadResult total;
        for (size_t i = 0; i + 1 < c.nodes.size(); ++i) {
            const cx d = c.nodes[i + 1] - c.nodes[i];
            auto f = [&](double t) {
                const cx lam = path.point_at(i, t);
                return peval(b, lam) / path.nu_at(i, t) * d / lam;
            };
            total += integrate(f, 0.0, 1.0, 1e-10);
        }
        return total;
    };

    const cx seed = seed_from_sym(kConj, full.nodes.front());
    const BranchPath pathX = continue_nu(kConj, X, seed);
    const QuadResult px = integrate_path(X, seed);
    const QuadResult py = integrate_path(Y, pathX.end_nu());
    const QuadResult pfull = period(kConj, b, full);
    CHECK(std::abs(pfull.value - (px.value + py.value)) <
          2.0 * (px.est_error + py.est_error + pfull.est_error) + 1e-12);
}

TEST_CASE("bilinear nondegeneracy of the A-period pairing") {
    const AdmissibleA as[] = {kConj, from_disk_roots(cx(0.0, 0.5), cx(0.0, -0.5)),
                              from_disk_roots(cx(0.4, 0.2), cx(-0.3, 0.5))};
    for (const AdmissibleA& a : as) {
        const CycleSet cs = build_cycles(a);
        const std::vector<Poly> p1 = si_real_basis(1);
        Eigen::Matrix2d M;
        int l = 0;
        for (const Contour* A : {&cs.A1, &cs.A2}) {
            for (int k = 0; k < 2; ++k) {
                const Poly lp = pmul(Poly{cx(0.0), cx(1.0)}, p1[k]);
                M(l, k) = period(a, lp, *A).value.real();
            }
            ++l;
        }
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(M);
        CHECK(svd.singularValues()(1) > 0.0);
        CHECK(svd.singularValues()(0) / svd.singularValues()(1) < 1e6);
    }
}

TEST_CASE("q_at_sym rejects differentials outside B_a") {
    const Poly b = si_from_coords({1.0, 0.0, 0.0, 0.0}, 3);
    CHECK(code_of([&] { q_at_sym(kConj, b); }) == errc::not_in_ba);
}
