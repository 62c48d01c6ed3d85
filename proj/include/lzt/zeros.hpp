#pragma once

#include <functional>
#include <vector>

#include "lzt/common.hpp"
#include "lzt/lattice.hpp"

namespace lzt {

enum class ZeroMethod { LineScan, NewtonRefine, ArgPrinciple };

struct ZeroRecord {
    double lambda = 0.0;
    Cplx s;
    int multiplicity = 1;
    double residual = 0.0;   // |function| at s
    ZeroMethod method = ZeroMethod::LineScan;
    bool on_critical_line = false;  // |Re s - 1/2| <= 1e-8
};

// axis-aligned search rectangle in the s plane
struct Region {
    double sigma_min;
    double sigma_max;
    double t_min;
    double t_max;
};

// Point evaluation carrying a cancellation-free magnitude scale: zero
// decisions compare |value| against the scale, never against bare epsilon,
// so the machinery survives the exponential height decay of the sums.
struct PointEval {
    Cplx value;
    double scale;
    double est_abs_err;
};

using AnalyticFn = std::function<PointEval(Cplx)>;

// evaluation wrappers used by scanning, counting and refinement
AnalyticFn s0_tilde_fn(const LatticeShape& shape, const EvalConfig& cfg = EvalConfig{});
AnalyticFn t_plus_fn(const LatticeShape& shape);

// candidate near-double zero or off-line-pair signature: a local minimum of
// |Z| along the critical line without a sign change
struct LineMinimum {
    double t;
    double value;  // Z at the (parabola-refined) minimum
};

struct ScanResult {
    std::vector<ZeroRecord> zeros;  // sign changes, bisected to |dt| <= 1e-10
    std::vector<LineMinimum> minima;
};

// Scans Z(t) = S0~(lambda, 1/2 + it), which is exactly real; throws
// AccuracyError if a nonzero imaginary part appears.
ScanResult scan_critical_line(double lambda, double t_min, double t_max,
                              double step = 0.01);

// Argument-principle count inside the rectangle (zeros minus poles, with
// multiplicity). The boundary is auto-perturbed outward up to 1e-3 when a
// sample lands on a zero; BoundaryZeroError after three failed attempts.
// The region must not contain the poles at s = 0 and s = 1.
int count_zeros(double lambda, const Region& region);
int count_zeros(const AnalyticFn& f, const Region& region);

// Newton iteration from s_init with central finite-difference derivative;
// converges to |f| <= 1e-10 * local scale or throws NoConvergenceError.
ZeroRecord refine_zero(double lambda, Cplx s_init);

// functional-equation orbit {s, 1-s, conj s, 1-conj s}, each re-refined;
// members merged when they coincide (on-line zeros degenerate to pairs)
std::vector<ZeroRecord> zero_quadruple(const ZeroRecord& z);

namespace detail {

// sign changes of a real-valued function, each bisected to |dt| <= 1e-10
std::vector<double> scan_sign_changes(const std::function<double(double)>& f,
                                      double t_min, double t_max, double step);

// winding number of f around a circle, certified phase steps < pi/2
int winding_circle(const AnalyticFn& f, Cplx center, double radius);

ZeroRecord refine_zero_fn(const AnalyticFn& f, double lambda, Cplx s_init);

} // namespace detail

} // namespace lzt
