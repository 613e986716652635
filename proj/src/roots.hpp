#pragma once

#include "poly.hpp"

namespace sg {

// all complex roots via companion-matrix eigenvalues, Newton-polished
std::vector<cx> poly_roots(const Poly& p, double polish_tol = 1e-13);

cx newton_polish(const Poly& p, cx z, int max_iter = 12, double tol = 1e-13);

// permutation of `roots` minimising total distance to `reference`
std::vector<cx> match_roots(const std::vector<cx>& reference,
                            const std::vector<cx>& roots);

} // namespace sg
