#pragma once

#include <vector>

#include "lzt/common.hpp"
#include "lzt/zeros.hpp"

namespace lzt {

// Continuation runs in c = lambda^2: the transition brackets and figure
// annotations are naturally expressed in c, and lambda = sqrt(c) is monotone.

enum class Configuration { OffLinePair, OnLinePair, Indeterminate };

enum class Termination {
    ReachedLambdaBound,
    MergedOnCriticalLine,
    DerivativeDegenerate,
    StepUnderflow,
};

struct TrajectoryPoint {
    double c;
    Cplx s;
    double residual;
    int corrector_iters;  // Newton iterations spent at this point
    double dc_used;       // signed step that produced this point
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;  // c strictly monotone
    Termination termination = Termination::ReachedLambdaBound;
};

struct TraceOptions {
    double dc_init = 1e-2;
    double max_step_s = 0.05;  // cap on |Delta s| per committed step
    double dc_min = 1e-12;     // below this the step underflows
    double line_tol = 1e-6;    // |Re s - 1/2| at which an off-line trace merges
};

struct TransitionBracket {
    double c_lo;
    double c_hi;
    Configuration classification_lo;
    Configuration classification_hi;
};

// Double-zero fingerprint at a merge point: the winding on a small circle
// and the square-root law of the pair separation against the c offset.
struct MergeReport {
    int winding = 0;
    double beta = 0.0;       // fitted separation exponent
    double beta_low = 0.0;   // 95% confidence bounds of the fit
    double beta_high = 0.0;
    int fit_points = 0;      // 0 when no pair splitting was observed
};

// Classifies the zero cluster inside t in [t_center - h, t_center + h] on
// the line Re s = 1/2 at aspect c: a sign-changing pair (OnLinePair), an
// off-line conjugate-symmetric pair over a dip without sign change
// (OffLinePair), or a dip too shallow against the noise floor to decide
// (Indeterminate). WindowError when the window does not isolate one cluster.
Configuration classify_configuration(double c, double t_center, double t_halfwidth,
                                     const EvalConfig& cfg = EvalConfig{});

// Predictor-corrector continuation of a zero from (c_start, s_start) toward
// c_end. The predictor is ds/dc from implicit differentiation with central
// finite differences; the corrector re-refines at each new c, halving the
// step when it needs more than five iterations.
Trajectory trace(double c_start, Cplx s_start, double c_end,
                 const TraceOptions& opts = TraceOptions{});

// Bisection on c between differently classified endpoints; Indeterminate
// midpoints are resolved by shrinking the window fourfold, then tightening
// the evaluation tolerance tenfold, then splitting conservatively.
TransitionBracket find_transition(double c_lo, double c_hi, double t_center,
                                  double t_halfwidth, double target_width = 1e-10);

// Local signature of a transition: winding count of S0~ on a small circle
// around s_merge, and the pair-separation exponent fit from probes at
// c +/- {1e-5, 1e-6, 1e-7}. The probe ladder requires |c - c*| well below
// 1e-7, i.e. a bracket tightened to ~1e-9 or better; a center known only
// to 1e-6 puts the smallest probes on the wrong side and skews beta.
MergeReport merge_signature(double c, Cplx s_merge);

namespace detail {

// Bottom of the |Z| dip inside the window, refined on successively finer
// grids; the ordinate of a merge point to well below the sample spacing.
LineMinimum window_minimum(const AnalyticFn& f, double t_center, double t_halfwidth);

} // namespace detail

} // namespace lzt
