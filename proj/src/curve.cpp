#include "curve.hpp"
#include "errors.hpp"
#include "quad.hpp"
#include <algorithm>
#include <cmath>

namespace sg {

namespace {

constexpr double kBranchClearance = 1e-6;

double dist_point_segment(cx p, cx a, cx b) {
    const cx d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    double t = ((p - a) * std::conj(d)).real() / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

void check_clearance(const std::vector<cx>& bps, const Contour& c) {
    for (size_t i = 0; i + 1 < c.nodes.size(); ++i)
        for (cx bp : bps)
            if (dist_point_segment(bp, c.nodes[i], c.nodes[i + 1]) < kBranchClearance)
                fail(errc::branch_collision,
                     "contour passes within 1e-6 of a branch point");
}

}  // namespace

bool Contour::closed() const {
    return nodes.size() > 2 && std::abs(nodes.front() - nodes.back()) < 1e-13;
}

double Contour::length() const {
    double s = 0.0;
    for (size_t i = 0; i + 1 < nodes.size(); ++i) s += std::abs(nodes[i + 1] - nodes[i]);
    return s;
}

Contour reversed(Contour c) {
    std::reverse(c.nodes.begin(), c.nodes.end());
    return c;
}

Contour stadium(cx p, cx q, double offset, int arc_nodes, int side_nodes) {
    if (!(offset > 0.0) || std::abs(q - p) == 0.0)
        fail(errc::bad_argument, "stadium needs distinct endpoints and offset > 0");
    const cx u = (q - p) / std::abs(q - p);
    const cx n = cx(0.0, 1.0) * u;
    // circumscribed radius: chords of the cap stay at distance >= offset
    const double r = offset / std::cos(M_PI / (2.0 * arc_nodes));
    Contour c;
    auto side = [&](cx from, cx to) {
        for (int j = 0; j < side_nodes; ++j)
            c.nodes.push_back(from + (to - from) * (double(j) / side_nodes));
    };
    auto cap = [&](cx center, double phi0) {
        // half turn from phi0, sweeping −π (counterclockwise traversal)
        for (int j = 0; j < arc_nodes; ++j) {
            const double phi = phi0 - M_PI * j / arc_nodes;
            c.nodes.push_back(center + r * (n * std::cos(phi) + u * std::sin(phi)));
        }
    };
    // bottom side p→q, cap around q through +u, top side q→p, cap around p
    side(p - r * n, q - r * n);
    cap(q, -M_PI);
    side(q + r * n, p + r * n);
    cap(p, 0.0);
    c.nodes.push_back(c.nodes.front());
    return c;
}

int winding_around(const Contour& c, cx p) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < c.nodes.size(); ++i) {
        const cx a = c.nodes[i] - p, b = c.nodes[i + 1] - p;
        total += std::arg(b / a);
    }
    return (int)std::lround(total / (2.0 * M_PI));
}

std::vector<cx> branch_points(const AdmissibleA& a) {
    return {cx(0.0, 0.0), a.alpha1, a.alpha2, 1.0 / std::conj(a.alpha1),
            1.0 / std::conj(a.alpha2)};
}

SpectralCurve make_curve(const AdmissibleA& a) {
    const cx a1 = peval(a.a, cx(1.0, 0.0));
    if (!(a1.real() > 0.0) || std::abs(a1.imag()) > 1e-10 * std::abs(a1))
        fail(errc::domain_error, "a(1) is not positive");
    return {a, std::sqrt(a1.real())};
}

cx BranchPath::point_at(size_t seg, double t) const {
    return contour.nodes[seg] + t * (contour.nodes[seg + 1] - contour.nodes[seg]);
}

cx BranchPath::nu_at(size_t seg, double t) const {
    const std::vector<cx>& g = grid[seg];
    const size_t n = g.size() - 1;
    size_t j = (size_t)std::lround(t * n);
    j = std::min(j, n);
    cx s = std::sqrt(peval(w, point_at(seg, t)));
    if (std::abs(s - g[j]) > std::abs(s + g[j])) s = -s;
    return s;
}

cx BranchPath::end_nu() const { return grid.back().back(); }

BranchPath continue_nu_w(const Poly& w, const std::vector<cx>& bps,
                         const Contour& path, cx seed) {
    if (path.nodes.size() < 1) fail(errc::bad_argument, "empty contour");
    check_clearance(bps, path);

    BranchPath bp;
    bp.contour = path;
    bp.w = w;
    bp.seed = seed;

    const cx w0 = peval(bp.w, path.nodes.front());
    if (std::abs(seed * seed - w0) > 1e-10 * std::max(1.0, std::abs(w0)))
        fail(errc::bad_argument, "seed does not satisfy nu^2 = lambda a(lambda)");

    const double total_len = std::max(path.length(), 1e-300);
    cx prev = seed;
    const size_t nseg = path.nodes.size() - 1;
    bp.grid.resize(std::max<size_t>(nseg, 1));
    if (nseg == 0) {  // single point: constant path
        bp.grid[0] = {seed, seed};
        bp.contour.nodes.push_back(path.nodes.front());
        return bp;
    }
    for (size_t i = 0; i < nseg; ++i) {
        const double seg_len = std::abs(path.nodes[i + 1] - path.nodes[i]);
        size_t n = std::max<size_t>(24, (size_t)std::ceil(4096.0 * seg_len / total_len));
        for (;; n *= 2) {
            std::vector<cx>& g = bp.grid[i];
            g.assign(n + 1, cx());
            cx ref = prev;
            bool ok = true;
            for (size_t j = 0; j <= n; ++j) {
                cx s = std::sqrt(peval(bp.w, bp.point_at(i, double(j) / n)));
                if (std::abs(s - ref) > std::abs(s + ref)) s = -s;
                // ambiguous flip: the argument of w moved by ~π between samples
                if (j > 0 && std::abs(s - ref) > 0.9 * std::abs(s + ref)) ok = false;
                g[j] = s;
                ref = s;
            }
            if (ok) break;
            if (n > (1u << 17))
                fail(errc::branch_collision,
                     "nu continuation ambiguous (branch point too close to contour)");
        }
        prev = bp.grid[i].back();
    }
    return bp;
}

BranchPath continue_nu(const AdmissibleA& a, const Contour& path, cx seed) {
    return continue_nu_w(pmul(a.a, Poly{cx(0.0, 0.0), cx(1.0, 0.0)}),
                         branch_points(a), path, seed);
}

cx seed_from_sym(const AdmissibleA& a, cx target) {
    const SpectralCurve sc = make_curve(a);
    const cx start = cx(1.0, 0.0);
    if (std::abs(target - start) < 1e-14) return sc.sym_nu;
    const auto bps = branch_points(a);
    auto clear = [&](cx u, cx v) {
        for (cx p : bps)
            if (dist_point_segment(p, u, v) < 2.0 * kBranchClearance) return false;
        return true;
    };
    std::vector<std::vector<cx>> candidates;
    candidates.push_back({start, target});
    const cx mid = 0.5 * (start + target);
    const cx perp = cx(0.0, 1.0) * (target - start);
    for (double d : {0.25, -0.25, 0.5, -0.5, 1.0, -1.0})
        candidates.push_back({start, mid + d * perp, target});
    for (const auto& nodes : candidates) {
        bool ok = true;
        for (size_t i = 0; ok && i + 1 < nodes.size(); ++i) ok = clear(nodes[i], nodes[i + 1]);
        if (!ok) continue;
        Contour probe;
        probe.nodes = nodes;
        return continue_nu(a, probe, sc.sym_nu).end_nu();
    }
    fail(errc::branch_collision, "no clear probe path from the Sym point");
}

int intersection_number(const AdmissibleA& a, const Contour& c1, const Contour& c2) {
    const BranchPath p1 = continue_nu(a, c1, seed_from_sym(a, c1.nodes.front()));
    const BranchPath p2 = continue_nu(a, c2, seed_from_sym(a, c2.nodes.front()));
    int total = 0;
    for (size_t i = 0; i + 1 < c1.nodes.size(); ++i) {
        const cx pA = c1.nodes[i], dA = c1.nodes[i + 1] - c1.nodes[i];
        for (size_t j = 0; j + 1 < c2.nodes.size(); ++j) {
            const cx pB = c2.nodes[j], dB = c2.nodes[j + 1] - c2.nodes[j];
            const double det = dA.real() * dB.imag() - dA.imag() * dB.real();
            const double scale = std::abs(dA) * std::abs(dB);
            if (std::abs(det) < 1e-12 * scale) continue;  // parallel: no transversal crossing
            const cx r = pB - pA;
            const double t = (r.real() * dB.imag() - r.imag() * dB.real()) / det;
            const double s = (r.real() * dA.imag() - r.imag() * dA.real()) / det;
            if (t < 0.0 || t >= 1.0 || s < 0.0 || s >= 1.0) continue;
            const cx nu1 = p1.nu_at(i, t);
            const cx nu2 = p2.nu_at(j, s);
            if (std::abs(nu1 - nu2) < std::abs(nu1 + nu2))
                total += det > 0.0 ? 1 : -1;
        }
    }
    return total;
}

namespace {

Contour circle_polyline(cx center, double radius, int n, double theta0 = 0.0,
                        double sweep = 2.0 * M_PI) {
    Contour c;
    for (int j = 0; j <= n; ++j)
        c.nodes.push_back(center + std::polar(radius, theta0 + sweep * j / n));
    return c;
}

// offset factor for the stadium around [p,q]; other branch points must clear
// the tube by `guard` · d_min beyond the tube radius
double cycle_offset(const std::vector<cx>& bps, cx p, cx q, double dmin, double factor,
                    double guard) {
    const double off = factor * dmin;
    for (cx bp : bps) {
        if (std::abs(bp - p) < 1e-14 || std::abs(bp - q) < 1e-14) continue;
        if (dist_point_segment(bp, p, q) < off + guard * dmin)
            fail(errc::cycle_collision,
                 "branch point too close to a cycle segment (near-colinear roots)");
    }
    return off;
}

double min_pairwise(const std::vector<cx>& pts) {
    double m = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) m = std::min(m, std::abs(pts[i] - pts[j]));
    return m;
}

bool contours_cross(const Contour& c1, const Contour& c2) {
    for (size_t i = 0; i + 1 < c1.nodes.size(); ++i)
        for (size_t j = 0; j + 1 < c2.nodes.size(); ++j) {
            const cx pA = c1.nodes[i], dA = c1.nodes[i + 1] - c1.nodes[i];
            const cx pB = c2.nodes[j], dB = c2.nodes[j + 1] - c2.nodes[j];
            const double det = dA.real() * dB.imag() - dA.imag() * dB.real();
            if (std::abs(det) < 1e-14 * std::abs(dA) * std::abs(dB)) continue;
            const cx r = pB - pA;
            const double t = (r.real() * dB.imag() - r.imag() * dB.real()) / det;
            const double s = (r.real() * dA.imag() - r.imag() * dA.real()) / det;
            if (t >= 0.0 && t < 1.0 && s >= 0.0 && s < 1.0) return true;
        }
    return false;
}

void check_windings(const Contour& c, const std::vector<cx>& bps,
                    const std::vector<int>& expect_abs) {
    // expect_abs[k] = 1 if bps[k] must be enclosed (either orientation), 0 if not;
    // all enclosed points must share the same signed winding
    int sign = 0;
    for (size_t k = 0; k < bps.size(); ++k) {
        const int w = winding_around(c, bps[k]);
        if (expect_abs[k] == 0) {
            if (w != 0) fail(errc::cycle_collision, "cycle encloses a foreign branch point");
        } else {
            if (std::abs(w) != 1)
                fail(errc::cycle_collision, "cycle misses one of its branch points");
            if (sign == 0) sign = w;
            else if (w != sign)
                fail(errc::cycle_collision, "cycle winds inconsistently");
        }
    }
}

}  // namespace

CycleSet build_cycles(const AdmissibleA& a, double guard) {
    const auto bps = branch_points(a);  // {0, α₁, α₂, r₁, r₂}
    const cx r1 = bps[3], r2 = bps[4];
    const double dmin = min_pairwise(bps);

    CycleSet cs;
    // Distinct radii for A- and B-tubes: the segments [0,α₁] and [α₁,r₁] are
    // colinear (reflection preserves the ray), so equal radii would make the
    // straight sides of A₁ and B₁ overlap instead of crossing transversally.
    cs.offset_a = cycle_offset(bps, a.alpha1, r1, dmin, 0.10, guard);
    cycle_offset(bps, a.alpha2, r2, dmin, 0.10, guard);
    cs.A1 = stadium(a.alpha1, r1, cs.offset_a);
    cs.A2 = stadium(a.alpha2, r2, cs.offset_a);
    cs.offset_b = cycle_offset(bps, cx(0.0, 0.0), a.alpha1, dmin, 0.15, guard);
    cs.B1 = stadium(cx(0.0, 0.0), a.alpha1, cs.offset_b);

    // B₂ in the z = 1/λ chart: branch points of μ² = z·ã(z) are 0 and the
    // inverted/conjugated roots; the stadium around [0, conj(α₂)] maps to a loop
    // that winds once (reversed) around every finite branch point except r₂ —
    // the homology class of a loop around {r₂, ∞}.
    const std::vector<cx> zbps = {cx(0.0, 0.0), std::conj(a.alpha1), std::conj(a.alpha2),
                                  1.0 / a.alpha1, 1.0 / a.alpha2};
    const double dmin_z = min_pairwise(zbps);
    const double off_z =
        cycle_offset(zbps, cx(0.0, 0.0), std::conj(a.alpha2), dmin_z, 0.15, guard);
    Contour zb2 = stadium(cx(0.0, 0.0), std::conj(a.alpha2), off_z, 32, 48);
    cs.B2.nodes.reserve(zb2.nodes.size());
    for (cx z : zb2.nodes) cs.B2.nodes.push_back(1.0 / z);

    cs.sigmaR = circle_polyline(cx(0.0, 0.0), 1.0, 512);

    // forbidden crossings
    const std::pair<const Contour*, const Contour*> disjoint[] = {
        {&cs.A1, &cs.A2}, {&cs.A1, &cs.B2}, {&cs.A2, &cs.B1}, {&cs.B1, &cs.B2}};
    for (auto [u, v] : disjoint)
        if (contours_cross(*u, *v)) fail(errc::cycle_collision, "cycles intersect");

    // each cycle encloses exactly its own branch-point pair (B₂: the complement)
    check_windings(cs.A1, bps, {0, 1, 0, 1, 0});
    check_windings(cs.A2, bps, {0, 0, 1, 0, 1});
    check_windings(cs.B1, bps, {1, 1, 0, 0, 0});
    check_windings(cs.B2, bps, {1, 1, 1, 1, 0});

    // orientation normalisation: A_k·B_k = +1 (flip B if needed), A_k·B_l = 0
    for (auto [A, B] : {std::pair{&cs.A1, &cs.B1}, std::pair{&cs.A2, &cs.B2}}) {
        const int n = intersection_number(a, *A, *B);
        if (n == -1) *B = reversed(*B);
        else if (n != 1) fail(errc::cycle_collision, "A·B intersection number is not ±1");
    }
    if (intersection_number(a, cs.A1, cs.B2) != 0 ||
        intersection_number(a, cs.A2, cs.B1) != 0)
        fail(errc::cycle_collision, "cross intersection numbers are nonzero");
    return cs;
}

double cycle_margin(const AdmissibleA& a) {
    const auto bps = branch_points(a);
    const cx r1 = bps[3], r2 = bps[4];
    const double dmin = min_pairwise(bps);
    const std::vector<cx> zbps = {cx(0.0, 0.0), std::conj(a.alpha1), std::conj(a.alpha2),
                                  1.0 / a.alpha1, 1.0 / a.alpha2};
    const double dmin_z = min_pairwise(zbps);
    double m = std::numeric_limits<double>::infinity();
    auto tube = [&m](const std::vector<cx>& pts, cx p, cx q, double factor, double dm) {
        for (cx bp : pts) {
            if (std::abs(bp - p) < 1e-14 || std::abs(bp - q) < 1e-14) continue;
            m = std::min(m, (dist_point_segment(bp, p, q) - factor * dm) / dm);
        }
    };
    tube(bps, a.alpha1, r1, 0.10, dmin);
    tube(bps, a.alpha2, r2, 0.10, dmin);
    tube(bps, cx(0.0, 0.0), a.alpha1, 0.15, dmin);
    tube(zbps, cx(0.0, 0.0), std::conj(a.alpha2), 0.15, dmin_z);
    return m;
}

std::vector<QuadResult> path_integrals(const BranchPath& path,
                                       const std::vector<Poly>& bs, double rel_tol) {
    std::vector<QuadResult> out(bs.size());
    for (size_t i = 0; i + 1 < path.contour.nodes.size(); ++i) {
        const cx d = path.contour.nodes[i + 1] - path.contour.nodes[i];
        for (size_t k = 0; k < bs.size(); ++k) {
            const Poly& b = bs[k];
            auto f = [&](double t) {
                const cx lam = path.point_at(i, t);
                return peval(b, lam) / path.nu_at(i, t) * d / lam;
            };
            out[k] += integrate(f, 0.0, 1.0, rel_tol);
        }
    }
    return out;
}

std::vector<QuadResult> period_multi(const AdmissibleA& a, const std::vector<Poly>& bs,
                                     const Contour& cycle, double rel_tol) {
    const BranchPath path = continue_nu(a, cycle, seed_from_sym(a, cycle.nodes.front()));
    return path_integrals(path, bs, rel_tol);
}

QuadResult period(const AdmissibleA& a, const Poly& b, const Contour& cycle,
                  double rel_tol) {
    return period_multi(a, {b}, cycle, rel_tol)[0];
}

cx sym_arc_integral(const AdmissibleA& a, const Poly& b, bool reverse_arc,
                    double rel_tol) {
    const SpectralCurve sc = make_curve(a);
    Contour arc = circle_polyline(cx(0.0, 0.0), 1.0, 1024, 0.0,
                                  reverse_arc ? -2.0 * M_PI : 2.0 * M_PI);
    // start on the σ(y) sheet so the odd monodromy inside S¹ ends the lift at y
    const BranchPath path = continue_nu(a, arc, -sc.sym_nu);
    QuadResult total;
    for (size_t i = 0; i + 1 < arc.nodes.size(); ++i) {
        const cx d = arc.nodes[i + 1] - arc.nodes[i];
        auto f = [&](double t) {
            const cx lam = path.point_at(i, t);
            return peval(b, lam) / path.nu_at(i, t) * d / lam;
        };
        total += integrate(f, 0.0, 1.0, rel_tol);
    }
    return 0.5 * total.value;
}

cx q_at_sym(const AdmissibleA& a, const Poly& b, bool reverse_arc, double rel_tol) {
    const CycleSet cs = build_cycles(a);
    for (const Contour* A : {&cs.A1, &cs.A2}) {
        const QuadResult p = period(a, b, *A, rel_tol);
        if (std::abs(p.value) > 1e-6)
            fail(errc::not_in_ba, "A-period does not vanish: b is not in B_a");
    }
    return sym_arc_integral(a, b, reverse_arc, rel_tol);
}

}  // namespace sg
