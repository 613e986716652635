#include "poly.hpp"

#include <algorithm>
#include <cmath>

namespace sg {

namespace {

Poly padded(const Poly& p, size_t n) {
    Poly q = p;
    if (q.size() < n) q.resize(n, cx(0.0));
    return q;
}

Poly ppow(const Poly& base, int n) {
    Poly r{cx(1.0)};
    for (int i = 0; i < n; ++i) r = pmul(r, base);
    return r;
}

} // namespace

cx peval(const Poly& p, cx z) {
    cx acc = 0.0;
    for (size_t k = p.size(); k-- > 0;) acc = acc * z + p[k];
    return acc;
}

Poly pderiv(const Poly& p) {
    if (p.size() <= 1) return Poly{cx(0.0)};
    Poly d(p.size() - 1);
    for (size_t k = 1; k < p.size(); ++k) d[k - 1] = double(k) * p[k];
    return d;
}

Poly pmul(const Poly& p, const Poly& q) {
    if (p.empty() || q.empty()) return Poly{cx(0.0)};
    Poly r(p.size() + q.size() - 1, cx(0.0));
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = 0; j < q.size(); ++j)
            r[i + j] += p[i] * q[j];
    return r;
}

Poly padd(const Poly& p, const Poly& q) {
    Poly r = padded(p, std::max(p.size(), q.size()));
    for (size_t k = 0; k < q.size(); ++k) r[k] += q[k];
    return r;
}

Poly psub(const Poly& p, const Poly& q) {
    Poly r = padded(p, std::max(p.size(), q.size()));
    for (size_t k = 0; k < q.size(); ++k) r[k] -= q[k];
    return r;
}

Poly pscale(const Poly& p, cx s) {
    Poly r = p;
    for (auto& c : r) c *= s;
    return r;
}

Poly from_roots(const std::vector<cx>& roots, cx lead) {
    Poly p{lead};
    for (cx r : roots) p = pmul(p, Poly{-r, cx(1.0)});
    return p;
}

int pdegree(const Poly& p, double tol) {
    for (size_t k = p.size(); k-- > 0;)
        if (std::abs(p[k]) > tol) return int(k);
    return -1;
}

double pnorm(const Poly& p) {
    double m = 0.0;
    for (const auto& c : p) m = std::max(m, std::abs(c));
    return m;
}

Poly pdivmod(const Poly& num, const Poly& den, Poly* rem) {
    const int dd = pdegree(den, 0.0);
    if (dd < 0) fail(errc::bad_argument, "polynomial division by zero");
    Poly r = num;
    int dn = pdegree(r, 0.0);
    if (dn < dd) {
        if (rem) *rem = r;
        return Poly{cx(0.0)};
    }
    Poly q(size_t(dn - dd) + 1, cx(0.0));
    const cx lead = den[size_t(dd)];
    for (int k = dn; k >= dd; --k) {
        const cx f = r[size_t(k)] / lead;
        q[size_t(k - dd)] = f;
        for (int j = 0; j <= dd; ++j) r[size_t(k - dd + j)] -= f * den[size_t(j)];
        r[size_t(k)] = 0.0; // kill round-off in the eliminated coefficient
    }
    r.resize(size_t(std::max(dd, 1)));
    if (rem) *rem = r;
    return q;
}

Poly deflate(const Poly& p, cx r) {
    const int d = pdegree(p, 0.0);
    if (d < 1) return Poly{cx(0.0)};
    Poly q(size_t(d), cx(0.0));
    cx carry = p[size_t(d)];
    for (int k = d - 1; k >= 0; --k) {
        q[size_t(k)] = carry;
        carry = p[size_t(k)] + r * carry;
    }
    return q;
}

/* ------------------------------------------------------------------ */

bool is_self_inversive(const Poly& p, int d, double tol) {
    const double scale = std::max(1.0, pnorm(p));
    if (pdegree(p, tol * scale) > d) return false;
    Poly q = padded(p, size_t(d) + 1);
    for (int k = 0; k <= d; ++k)
        if (std::abs(q[size_t(k)] - std::conj(q[size_t(d - k)])) > tol * scale)
            return false;
    return true;
}

Poly si_reflect(const Poly& p, int d) {
    Poly q = padded(p, size_t(d) + 1);
    Poly r(size_t(d) + 1);
    for (int k = 0; k <= d; ++k) r[size_t(k)] = std::conj(q[size_t(d - k)]);
    return r;
}

std::vector<Poly> si_real_basis(int d) {
    if (d < 0) fail(errc::bad_argument, "negative degree");
    std::vector<Poly> basis;
    const cx I(0.0, 1.0);
    for (int k = 0; 2 * k < d; ++k) {
        Poly u(size_t(d) + 1, cx(0.0)), v(size_t(d) + 1, cx(0.0));
        u[size_t(k)] = 1.0;
        u[size_t(d - k)] = 1.0;
        v[size_t(k)] = I;
        v[size_t(d - k)] = -I;
        basis.push_back(u);
        basis.push_back(v);
    }
    if (d % 2 == 0) {
        Poly m(size_t(d) + 1, cx(0.0));
        m[size_t(d / 2)] = 1.0;
        basis.push_back(m);
    }
    return basis;
}

Poly si_from_coords(const std::vector<double>& x, int d) {
    const auto basis = si_real_basis(d);
    if (x.size() != basis.size()) fail(errc::bad_argument, "coordinate dimension mismatch");
    Poly p(size_t(d) + 1, cx(0.0));
    for (size_t j = 0; j < basis.size(); ++j) p = padd(p, pscale(basis[j], x[j]));
    return p;
}

std::vector<double> si_coords(const Poly& p, int d) {
    Poly q = padded(p, size_t(d) + 1);
    std::vector<double> x;
    for (int k = 0; 2 * k < d; ++k) {
        x.push_back(q[size_t(k)].real());
        x.push_back(q[size_t(k)].imag());
    }
    if (d % 2 == 0) x.push_back(q[size_t(d / 2)].real());
    return x;
}

/* ------------------------------------------------------------------ */

AdmissibleA from_disk_roots(cx alpha1, cx alpha2, double degeneracy_tol) {
    for (cx al : {alpha1, alpha2}) {
        const double m = std::abs(al);
        if (m <= degeneracy_tol || m >= 1.0 - degeneracy_tol)
            fail(errc::root_out_of_domain, "branch point not in punctured unit disk");
    }
    if (std::abs(alpha1 - alpha2) <= degeneracy_tol)
        fail(errc::degenerate_roots, "coincident branch points");
    Poly a{cx(1.0)};
    for (cx al : {alpha1, alpha2}) {
        Poly f{-al, cx(1.0 + std::norm(al)), -std::conj(al)};
        a = pmul(a, pscale(f, 1.0 / std::abs(al)));
    }
    return AdmissibleA{a, alpha1, alpha2};
}

bool unit_circle_positive(const Poly& a, int n_samples) {
    for (int j = 0; j < n_samples; ++j) {
        const double th = 2.0 * M_PI * double(j) / double(n_samples);
        const cx l = std::polar(1.0, th);
        const cx v = peval(a, l) / (l * l);
        if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v))) return false;
        if (v.real() <= 0.0) return false;
    }
    return true;
}

/* ------------------------------------------------------------------ */

cx cayley(cx lambda) {
    const cx den = cx(0.0, 1.0) * (lambda + 1.0);
    if (std::abs(lambda + 1.0) < 1e-300) fail(errc::pole_input, "cayley pole at lambda = -1");
    return (lambda - 1.0) / den;
}

cx cayley_inv(cx kappa) {
    const cx I(0.0, 1.0);
    if (std::abs(kappa + I) < 1e-300) fail(errc::pole_input, "inverse cayley pole at kappa = -i");
    return (I - kappa) / (I + kappa);
}

double rq_norm(const RealQuartic& a) {
    const double t = std::pow(a.a1, 12) + std::pow(a.a2, 6) + std::pow(a.a3, 4)
                   + std::pow(std::abs(a.a4), 3);
    return std::pow(t, 1.0 / 12.0);
}

RealQuartic scale_action(double C, const RealQuartic& a) {
    return RealQuartic{C * a.a1, C * C * a.a2, C * C * C * a.a3, C * C * C * C * a.a4};
}

RealQuartic s3_normalize(const RealQuartic& a) {
    const double n = rq_norm(a);
    if (!(n > 1e-300)) fail(errc::bad_argument, "cannot normalise kappa^4");
    return scale_action(1.0 / n, a);
}

/* ------------------------------------------------------------------ */

namespace {

// expand sum_k c_k (i-k)^k (i+k)^(m-k) for coefficients c of degree <= m
Poly mobius_expand(const Poly& c, int m) {
    const cx I(0.0, 1.0);
    const Poly plus{I, cx(1.0)};   // i + kappa
    const Poly minus{I, cx(-1.0)}; // i - kappa
    Poly acc(size_t(m) + 1, cx(0.0));
    const Poly cc = padded(c, size_t(m) + 1);
    for (int k = 0; k <= m; ++k) {
        if (cc[size_t(k)] == cx(0.0)) continue;
        acc = padd(acc, pscale(pmul(ppow(minus, k), ppow(plus, m - k)), cc[size_t(k)]));
    }
    return acc;
}

std::array<double, 4> realify3(const Poly& p, const char* what) {
    Poly q = padded(p, 4);
    std::array<double, 4> out{};
    const double scale = std::max(1.0, pnorm(q));
    for (int k = 0; k < 4; ++k) {
        if (std::abs(q[size_t(k)].imag()) > 1e-8 * scale)
            fail(errc::domain_error, what);
        out[size_t(k)] = q[size_t(k)].real();
    }
    return out;
}

} // namespace

HatPair hat_transform(const Poly& a, const Poly& b) {
    const cx am1 = peval(a, -1.0);
    if (std::abs(am1.imag()) > 1e-9 * std::max(1.0, std::abs(am1)))
        fail(errc::domain_error, "a(-1) not real");
    if (am1.real() <= 1e-12)
        fail(errc::sym_point_at_inf, "a(-1) vanishes, branch point at kappa = infinity");

    Poly ah = pscale(mobius_expand(a, 4), 1.0 / am1.real());
    // leading coefficient is a(-1)/a(-1) = 1 exactly in exact arithmetic
    const cx top = ah.size() > 4 ? ah[4] : cx(0.0);
    if (std::abs(top) < 1e-12) fail(errc::domain_error, "hat transform lost degree");
    ah = pscale(ah, 1.0 / top);
    const double scale = std::max(1.0, pnorm(ah));
    for (auto& c : ah)
        if (std::abs(c.imag()) > 1e-8 * scale)
            fail(errc::domain_error, "hat coefficients of a not real");

    RealQuartic aq{ah[3].real(), ah[2].real(), ah[1].real(), ah[0].real()};

    Poly bh = pscale(mobius_expand(b, 3), cx(0.0, 2.0) / std::sqrt(am1.real()));
    return HatPair{aq, realify3(bh, "hat coefficients of b not real")};
}

RealQuartic hat_transform_a(const Poly& a) {
    return hat_transform(a, Poly{cx(0.0)}).a_hat;
}

Poly hat_inverse_a(const RealQuartic& a_hat) {
    const cx I(0.0, 1.0);
    const Poly lm{cx(-1.0), cx(1.0)}; // lambda - 1
    const Poly lp{cx(1.0), cx(1.0)};  // lambda + 1
    const std::array<double, 5> coef{a_hat.a4, a_hat.a3, a_hat.a2, a_hat.a1, 1.0};
    Poly acc(5, cx(0.0));
    cx ik = 1.0; // i^{-k}
    for (int k = 0; k <= 4; ++k) {
        acc = padd(acc, pscale(pmul(ppow(lm, k), ppow(lp, 4 - k)), coef[size_t(k)] * ik));
        ik *= -I;
    }
    acc = pscale(acc, 1.0 / 16.0);
    const double m = std::abs(acc[4]);
    if (m < 1e-14) fail(errc::domain_error, "inverse chart degenerates at infinity");
    return pscale(acc, 1.0 / m);
}

} // namespace sg
