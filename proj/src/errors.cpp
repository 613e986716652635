#include "errors.hpp"

namespace sg {

const char* errc_name(errc c) {
    switch (c) {
    case errc::ok:                 return "Ok";
    case errc::degenerate_roots:   return "DegenerateRoots";
    case errc::root_out_of_domain: return "RootOutOfDomain";
    case errc::pole_input:         return "PoleInput";
    case errc::sym_point_at_inf:   return "SymPointAtInfinity";
    case errc::branch_collision:   return "BranchPointCollision";
    case errc::cycle_collision:    return "CycleCollision";
    case errc::quadrature_failure: return "QuadratureFailure";
    case errc::not_in_ba:          return "NotInBa";
    case errc::rank_deficiency:    return "RankDeficiency";
    case errc::on_s2_locus:        return "OnS2Locus";
    case errc::no_positive_orient: return "NoPositiveOrientation";
    case errc::root_bracket:       return "RootBracketFailure";
    case errc::singular_system:    return "SingularSystem";
    case errc::division_residual:  return "DivisionResidual";
    case errc::boundary_hit:       return "BoundaryHit";
    case errc::period_drift:       return "PeriodDrift";
    case errc::unclassifiable:     return "Unclassifiable";
    case errc::domain_error:       return "DomainError";
    case errc::manifold_escape:    return "ManifoldEscape";
    case errc::bad_argument:       return "BadArgument";
    }
    return "Unknown";
}

} // namespace sg
