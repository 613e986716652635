#pragma once
// Isoperiodic (Whitham) deformations on the S²₁ locus: the tangent solve for
// prescribed Sym-point data, integration of the two-parameter flow, the angle
// map φ, location of rational points, and classification of boundary limits.
#include "bspace.hpp"

#include <array>
#include <vector>

namespace sg {

// Tangent data of the deformation with prescribed c₁(1), c₂(1): the unique
// (c₁, c₂, Q, ȧ, ḃ₁, ḃ₂) with b₂c₁ − b₁c₂ = Qa, the λ=1 compatibility
// conditions, and 2aḃ_l − ȧb_l = 2iλac_l′ − ic_l(a + λa′).
struct WhithamTangent {
    Poly adot;          // self-inversive quartic, leading phase gauge-fixed
    Poly b1dot, b2dot;  // self-inversive cubics
    Poly c1, c2;        // self-inversive cubics
    Poly Q;             // self-inversive quadratic
};

WhithamTangent tangent_pair(const AdmissibleA& a, const Poly& b1, const Poly& b2,
                            double c1_at_1, double c2_at_1);
WhithamTangent tangent(const Frame& fr, double c1_at_1, double c2_at_1);

// φ(frame) = (Im q₁(y), Im q₂(y)) for the frame's oriented period-map basis.
std::array<double, 2> phi(const Frame& fr);

// One accepted integration step, as logged along a trajectory.
struct TrajectoryRecord {
    double t;                    // arc position in [0, 1] of the current leg
    std::array<double, 2> phi;
    std::array<cx, 2> alpha;     // labelled roots in the unit disk
    double period_drift;         // max |A-period|/2π before re-projection
    double step;
};

struct FlowOptions {
    double root_tol = 1e-9;    // embedded-pair tolerance on root motion
    double h_init = 1e-3;
    double h_min = 1e-10;
    double h_max = 0.05;
    long max_steps = 100000;
    double sep_stop = 1e-6;    // min root separation / modulus before stopping
    double margin_min = 0.02;  // cycle-clearance floor before stopping
    std::vector<TrajectoryRecord>* log = nullptr;
};

struct FlowState {
    Frame frame;
    std::array<double, 2> t;    // nominal target φ(start) + delta
    std::array<double, 2> phi;  // recomputed φ of the final frame
};

// Integrate d(φ)/dt = delta along the straight segment, prescribing
// (c₁(1), c₂(1)) = √(a(1))·delta at every stage; validates periods and φ
// after every accepted step.
FlowState flow(const Frame& fr, std::array<double, 2> delta,
               const FlowOptions& opt = {});

enum class LimitCase { A, B, C, D, E };

struct LimitClassification {
    LimitCase limit_case;
    std::array<double, 2> limit_phi;
    std::array<cx, 2> limit_alpha;  // extrapolated root limits
};

// Classify a boundary-bound trail of labelled disk roots against the five
// degeneration cases and evaluate the limiting angles.
LimitClassification classify_limit(const std::vector<std::array<cx, 2>>& trail);

// Thrown by flow() when the step collapses against a degeneration: carries
// the classification and the recorded trajectory up to the stop.
struct boundary_error : error {
    LimitClassification limit;
    std::vector<TrajectoryRecord> trajectory;
    boundary_error(LimitClassification lc, std::vector<TrajectoryRecord> tr,
                   const std::string& what)
        : error(errc::boundary_hit, what), limit(lc), trajectory(std::move(tr)) {}
};

struct BoundaryResult {
    LimitClassification limit;
    std::vector<TrajectoryRecord> trajectory;
};

// Flow along `direction` in φ-space until a degeneration stops the step
// control, then classify it.
BoundaryResult flow_to_boundary(const Frame& fr, std::array<double, 2> direction,
                                const FlowOptions& opt = {});

// Curve with φ = (π p₁, π p₂), reached from the seed by straight flow with a
// Newton-style correction loop; retries through the triangle centroid when the
// straight leg hits the boundary. The target must lie strictly inside △.
AdmissibleA locate_torus(double p1, double p2, const Frame& seed,
                         const FlowOptions& opt = {});

} // namespace sg
