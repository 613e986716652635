#pragma once

#include <stdexcept>
#include <string>

namespace sg {

enum class errc : int {
    ok                  = 0,
    degenerate_roots    = 1,
    root_out_of_domain  = 2,
    pole_input          = 3,
    sym_point_at_inf    = 4,
    branch_collision    = 5,
    cycle_collision     = 6,
    quadrature_failure  = 7,
    not_in_ba           = 8,
    rank_deficiency     = 9,
    on_s2_locus         = 10,
    no_positive_orient  = 11,
    root_bracket        = 12,
    singular_system     = 13,
    division_residual   = 14,
    boundary_hit        = 15,
    period_drift        = 16,
    unclassifiable      = 17,
    domain_error        = 18,
    manifold_escape     = 19,
    bad_argument        = 20,
};

const char* errc_name(errc c);

struct error : std::runtime_error {
    errc code;
    error(errc c, const std::string& what)
        : std::runtime_error(what), code(c) {}
};

[[noreturn]] inline void fail(errc c, const std::string& what) {
    throw error(c, what);
}

} // namespace sg
