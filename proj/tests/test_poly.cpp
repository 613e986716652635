#include <doctest.h>

#include <random>

#include "poly.hpp"
#include "roots.hpp"

using namespace sg;

namespace {

template <class F>
errc code_of(F&& f) {
    try {
        f();
    } catch (const error& e) {
        return e.code;
    }
    return errc::ok;
}

double dist(const Poly& p, const Poly& q) {
    return pnorm(psub(p, q));
}

} // namespace

TEST_CASE("polynomial arithmetic round-trips") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto rnd = [&](size_t n) {
        Poly p(n);
        for (auto& c : p) c = cx(u(rng), u(rng));
        return p;
    };

    for (int rep = 0; rep < 25; ++rep) {
        Poly a = rnd(5), b = rnd(3);
        b.back() += 2.0; // keep divisor well-conditioned
        Poly rem;
        Poly q = pdivmod(a, b, &rem);
        CHECK(dist(padd(pmul(q, b), rem), a) < 1e-12);
        CHECK(pdegree(rem, 1e-14) < pdegree(b, 1e-14));

        cx z(u(rng), u(rng));
        CHECK(std::abs(peval(pmul(a, b), z) - peval(a, z) * peval(b, z)) < 1e-12);

        cx r(u(rng), u(rng));
        Poly qd = deflate(a, r);
        CHECK(std::abs(peval(a, z) - (peval(qd, z) * (z - r) + peval(a, r))) < 1e-12);
    }

    Poly d = pderiv(Poly{cx(1.0), cx(2.0), cx(3.0)});
    CHECK(dist(d, Poly{cx(2.0), cx(6.0)}) == 0.0);
}

TEST_CASE("companion-matrix roots with polish") {
    std::vector<cx> want{cx(0.5), cx(2.0), cx(0.0, 0.5), cx(0.0, 2.0), cx(-1.3, 0.2)};
    Poly p = from_roots(want, cx(0.7, -0.3));
    auto got = match_roots(want, poly_roots(p));
    for (size_t i = 0; i < want.size(); ++i) {
        CHECK(std::abs(got[i] - want[i]) < 1e-12);
        CHECK(std::abs(peval(p, got[i])) < 1e-12 * pnorm(p));
    }
}

TEST_CASE("self-inversive predicate") {
    CHECK(is_self_inversive(Poly{cx(1.0), cx(0.0), cx(1.0)}, 2));
    // i(l-1)^3 = -i + 3il - 3il^2 + il^3
    Poly b = pscale(from_roots({cx(1.0), cx(1.0), cx(1.0)}), cx(0.0, 1.0));
    CHECK(is_self_inversive(b, 3));
    CHECK_FALSE(is_self_inversive(Poly{cx(2.0), cx(1.0)}, 1));

    CHECK(dist(si_reflect(b, 3), b) < 1e-15);
}

TEST_CASE("self-inversive real basis and coordinates") {
    for (int d : {2, 3, 4}) {
        auto basis = si_real_basis(d);
        CHECK(int(basis.size()) == d + 1);
        for (const auto& e : basis) CHECK(is_self_inversive(e, d));

        std::mt19937 rng(99 + d);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        std::vector<double> x(size_t(d) + 1);
        for (auto& v : x) v = u(rng);
        Poly p = si_from_coords(x, d);
        CHECK(is_self_inversive(p, d));
        auto y = si_coords(p, d);
        REQUIRE(y.size() == x.size());
        for (size_t i = 0; i < x.size(); ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-14));
    }
}

TEST_CASE("from_disk_roots constructs admissible quartics") {
    AdmissibleA A = from_disk_roots(cx(0.5), cx(0.0, 0.5));
    CHECK(std::abs(std::abs(peval(A.a, 0.0)) - 1.0) < 1e-14);
    CHECK(is_self_inversive(A.a, 4, 1e-13));
    CHECK(unit_circle_positive(A.a));

    std::vector<cx> want{cx(0.5), cx(2.0), cx(0.0, 0.5), cx(0.0, 2.0)};
    auto got = match_roots(want, poly_roots(A.a));
    for (size_t i = 0; i < 4; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-12);

    AdmissibleA R = from_disk_roots(cx(0.53, 0.53), cx(0.53, -0.53));
    for (const auto& c : R.a) CHECK(std::abs(c.imag()) < 1e-14);
    CHECK(unit_circle_positive(R.a));

    CHECK(code_of([] { from_disk_roots(cx(0.5), cx(0.5)); }) == errc::degenerate_roots);
    CHECK(code_of([] { from_disk_roots(cx(1.2), cx(0.0, 0.5)); }) == errc::root_out_of_domain);
    CHECK(code_of([] { from_disk_roots(cx(0.0), cx(0.0, 0.5)); }) == errc::root_out_of_domain);
}

TEST_CASE("cayley chart") {
    CHECK(std::abs(cayley(cx(1.0))) < 1e-15);
    CHECK(std::abs(cayley(cx(0.0, 1.0)) - cx(1.0)) < 1e-15);
    CHECK(std::abs(cayley(cx(0.0)) - cx(0.0, 1.0)) < 1e-15);
    CHECK(std::abs(cayley_inv(cx(0.0)) - cx(1.0)) < 1e-15);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        cx l(u(rng), u(rng));
        if (std::abs(l + 1.0) < 0.1) continue;
        CHECK(std::abs(cayley_inv(cayley(l)) - l) < 1e-14 * std::max(1.0, std::abs(l)));
    }
    for (int j = 0; j < 1000; ++j) {
        cx l = std::polar(1.0, 2.0 * M_PI * (j + 0.5) / 1000.0);
        // polar() rounds l off the circle by ~1 ulp; Im kappa = -(r^2-1)/|l+1|^2
        // amplifies that quantisation without bound near the pole, so keep a
        // small exclusion zone around -1
        if (std::abs(l + 1.0) < 0.05) continue;
        CHECK(std::abs(cayley(l).imag()) < 1e-12);
    }
    CHECK(code_of([] { cayley(cx(-1.0)); }) == errc::pole_input);
    CHECK(code_of([] { cayley_inv(cx(0.0, -1.0)); }) == errc::pole_input);
}

TEST_CASE("scale action and sphere normalisation") {
    RealQuartic a{0.0, 0.0, 0.0, 1.0}; // k^4 + 1
    RealQuartic s = scale_action(2.0, a);
    CHECK(s.a1 == 0.0);
    CHECK(s.a2 == 0.0);
    CHECK(s.a3 == 0.0);
    CHECK(s.a4 == doctest::Approx(16.0));

    RealQuartic b{0.3, -1.2, 0.05, 0.7};
    RealQuartic c1 = scale_action(1.7, scale_action(0.6, b));
    RealQuartic c2 = scale_action(1.7 * 0.6, b);
    CHECK(std::abs(c1.a1 - c2.a1) < 1e-12);
    CHECK(std::abs(c1.a2 - c2.a2) < 1e-12);
    CHECK(std::abs(c1.a3 - c2.a3) < 1e-12);
    CHECK(std::abs(c1.a4 - c2.a4) < 1e-12);

    CHECK(rq_norm(scale_action(2.5, b)) == doctest::Approx(2.5 * rq_norm(b)).epsilon(1e-12));
    CHECK(rq_norm(s3_normalize(b)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(code_of([] { s3_normalize(RealQuartic{0, 0, 0, 0}); }) == errc::bad_argument);

    CHECK(scale_action(1.0, b).a2 == b.a2);
}

TEST_CASE("hat transform of (lambda-1)^4 is kappa^4") {
    Poly a = from_roots({cx(1.0), cx(1.0), cx(1.0), cx(1.0)});
    RealQuartic ah = hat_transform_a(a);
    CHECK(std::abs(ah.a1) < 1e-13);
    CHECK(std::abs(ah.a2) < 1e-13);
    CHECK(std::abs(ah.a3) < 1e-13);
    CHECK(std::abs(ah.a4) < 1e-13);
}

TEST_CASE("hat transform matches direct Moebius substitution") {
    AdmissibleA A = from_disk_roots(cx(0.4, 0.2), cx(-0.1, 0.55));
    Poly b = si_from_coords({0.7, -0.3, 1.1, 0.25}, 3);
    HatPair H = hat_transform(A.a, b);

    const cx am1 = peval(A.a, -1.0);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 8; ++i) {
        cx k(u(rng), u(rng));
        cx l = cayley_inv(k);
        cx ipk = cx(0.0, 1.0) + k;
        cx want_a = ipk * ipk * ipk * ipk * peval(A.a, l) / am1;
        cx got_a = peval(H.a_hat.poly(), k);
        CHECK(std::abs(got_a - want_a) < 1e-10 * std::max(1.0, std::abs(want_a)));

        cx want_b = cx(0.0, 2.0) * ipk * ipk * ipk * peval(b, l) / std::sqrt(am1);
        Poly bh(H.b_hat.begin(), H.b_hat.end());
        CHECK(std::abs(peval(bh, k) - want_b) < 1e-10 * std::max(1.0, std::abs(want_b)));
    }

    // positivity of a_hat on the real line for admissible input
    for (int j = 0; j <= 1000; ++j) {
        double k = -10.0 + 0.02 * j;
        CHECK(H.a_hat.eval(k) > 0.0);
    }
}

TEST_CASE("hat transform round trip") {
    AdmissibleA A = from_disk_roots(cx(0.35, -0.4), cx(0.2, 0.6));
    Poly back = hat_inverse_a(hat_transform_a(A.a));
    CHECK(dist(back, A.a) < 1e-10);

    Poly degenerate = from_roots({cx(-1.0), cx(0.5), cx(2.0), cx(0.1)});
    CHECK(code_of([&] { hat_transform_a(degenerate); }) == errc::sym_point_at_inf);
}
