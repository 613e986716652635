#include <doctest.h>

#include <cmath>

#include "quad.hpp"

using namespace sg;

TEST_CASE("smooth integrands hit closed forms") {
    auto r1 = integrate([](double t) { return cx(t * t); }, 0.0, 1.0);
    CHECK(std::abs(r1.value - cx(1.0 / 3.0)) < 1e-14);
    CHECK(std::abs(r1.value - cx(1.0 / 3.0)) <= r1.est_error + 1e-15);

    auto r2 = integrate([](double t) { return std::exp(cx(0.0, t)); }, 0.0, 2.0 * M_PI);
    CHECK(std::abs(r2.value) < 1e-12);

    auto r3 = integrate([](double t) { return cx(std::cos(40.0 * t)); }, 0.0, M_PI);
    CHECK(std::abs(r3.value) < 1e-12);
}

TEST_CASE("adaptive refinement resolves a sharp peak") {
    const double eps = 1e-4;
    auto f = [eps](double t) { return cx(1.0 / (t + eps)); };
    auto r = integrate(f, 0.0, 1.0, 1e-10);
    const double want = std::log((1.0 + eps) / eps);
    CHECK(std::abs(r.value.real() - want) < 1e-9 * want);
    CHECK(r.evals > 15);
}

TEST_CASE("orientation flips the sign") {
    auto f = [](double t) { return cx(std::sin(t), t); };
    auto a = integrate(f, 0.0, 2.0);
    auto b = integrate(f, 2.0, 0.0);
    CHECK(std::abs(a.value + b.value) < 1e-13);
}

TEST_CASE("endpoint singularity exhausts the depth cap") {
    auto f = [](double t) { return cx(1.0 / std::sqrt(t)); };
    bool threw = false;
    try {
        integrate(f, 0.0, 1.0, 1e-10);
    } catch (const error& e) {
        threw = (e.code == errc::quadrature_failure);
    }
    CHECK(threw);
}

TEST_CASE("deterministic results") {
    auto f = [](double t) { return std::exp(cx(-t, 3.0 * t)); };
    auto a = integrate(f, 0.0, 5.0);
    auto b = integrate(f, 0.0, 5.0);
    CHECK(a.value.real() == b.value.real());
    CHECK(a.value.imag() == b.value.imag());
    CHECK(a.est_error == b.est_error);
}
