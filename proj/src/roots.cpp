#include "roots.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>

namespace sg {

cx newton_polish(const Poly& p, cx z, int max_iter, double tol) {
    const Poly dp = pderiv(p);
    for (int it = 0; it < max_iter; ++it) {
        const cx f = peval(p, z);
        const cx df = peval(dp, z);
        if (std::abs(df) < 1e-300) break;
        const cx step = f / df;
        z -= step;
        if (std::abs(step) < tol * std::max(1.0, std::abs(z))) break;
    }
    return z;
}

std::vector<cx> poly_roots(const Poly& p, double polish_tol) {
    const int d = pdegree(p, 1e-14 * pnorm(p));
    if (d < 1) return {};

    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d, d);
    const cx lead = p[size_t(d)];
    for (int i = 1; i < d; ++i) M(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) M(i, d - 1) = -p[size_t(i)] / lead;

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        fail(errc::singular_system, "eigenvalue iteration failed");

    Poly pd(p.begin(), p.begin() + d + 1);
    std::vector<cx> roots(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i)
        roots[size_t(i)] = newton_polish(pd, es.eigenvalues()[i], 12, polish_tol);

    // deterministic order: by real part, then imaginary part
    std::sort(roots.begin(), roots.end(), [](cx a, cx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

std::vector<cx> match_roots(const std::vector<cx>& reference,
                            const std::vector<cx>& roots) {
    if (reference.size() != roots.size())
        fail(errc::bad_argument, "root lists differ in length");
    const size_t n = roots.size();
    if (n <= 6) {
        std::vector<size_t> perm(n), best(n);
        std::iota(perm.begin(), perm.end(), 0);
        best = perm;
        double best_cost = -1.0;
        do {
            double cost = 0.0;
            for (size_t i = 0; i < n; ++i) cost += std::abs(roots[perm[i]] - reference[i]);
            if (best_cost < 0.0 || cost < best_cost) {
                best_cost = cost;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        std::vector<cx> out(n);
        for (size_t i = 0; i < n; ++i) out[i] = roots[best[i]];
        return out;
    }
    // greedy fallback for longer lists
    std::vector<cx> pool = roots, out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        size_t jbest = 0;
        for (size_t j = 1; j < pool.size(); ++j)
            if (std::abs(pool[j] - reference[i]) < std::abs(pool[jbest] - reference[i]))
                jbest = j;
        out.push_back(pool[jbest]);
        pool.erase(pool.begin() + long(jbest));
    }
    return out;
}

} // namespace sg
