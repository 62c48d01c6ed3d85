#pragma once

#include <string>
#include <vector>

#include "lzt/common.hpp"

namespace lzt {

// Brute-force sum of (p1^2 + lambda^2 p2^2)^{-s} over lattice points inside
// the given radius, with an integral estimate of the discarded tail added to
// the value and a boundary-fluctuation bound in est_abs_err. Only converges
// for Re s > 1; serves as the independent cross-check for everything else.
SumValue direct_sum(const LatticeShape& shape, Cplx s, double radius);

// Double sum pi^n sum_{p1,p2>=1} p2^{s-1/2+n} p1^{-(s-1/2-n)}
// K_{s-1/2+m}(2 pi p1 p2 lam), grouped over the product q = p1 p2 so each
// Bessel evaluation is shared by a divisor sum. Terms stop once the Bessel
// argument clears the order by the configured ratio and the magnitude
// envelope falls below target; a geometric tail bound goes to est_abs_err.
SumValue macdonald_sum(int n, int m, Cplx s, double lam,
                       const EvalConfig& cfg = EvalConfig{});

// S0(lambda, s): analytic continuation of the lattice sum via zeta rows plus
// an exponentially convergent Bessel remainder. PoleError at s = 1.
// S0(lambda, 0) = -1 exactly; zero at negative integers.
SumValue s0(const LatticeShape& shape, Cplx s, const EvalConfig& cfg = EvalConfig{});

// Symmetrised form lambda^s Gamma(s) S0 / (8 pi^s): invariant under both
// lambda -> 1/lambda and s -> 1-s, real on the critical line (exactly so in
// floating point when Re s == 1/2). PoleError at s in {0, 1}.
SumValue s0_tilde(const LatticeShape& shape, Cplx s, const EvalConfig& cfg = EvalConfig{});

// Even/odd zeta-row superpositions. t_plus has a removable point at s = 1/2
// which the implementation bridges with a local Taylor patch; the exact
// points {0, 1/2, 1} still raise PoleError on the public functions.
Cplx t_plus(const LatticeShape& shape, Cplx s);
Cplx t_minus(Cplx s);

struct NamedResidual {
    std::string name;
    double residual;  // |lhs - rhs| / max(|lhs|, |rhs|), or absolute when both sides vanish
};

// Cross-identity diagnostics: the zeta-row/Bessel-remainder exchange
// identity, its lambda-derivative form at lambda = 1, and the logarithmic
// lambda-derivative of S0 at lambda = 1. Derivatives use central differences,
// so those residuals bottom out near 1e-8 rather than 1e-12.
std::vector<NamedResidual> identity_residuals(const LatticeShape& shape, Cplx s,
                                              const EvalConfig& cfg = EvalConfig{});

// Closed products of zeta and Dirichlet L factors, available for
// lambda^2 in {1,...,7}. UnsupportedShapeError otherwise.
Cplx factorized_reference(const LatticeShape& shape, Cplx s);

// Zeros of the closed-form prefactors for lambda^2 in {3, 4, 7}; all lie on
// Re s = 1/2. For lambda^2 = 4 each n contributes a +/- pair.
std::vector<Cplx> prefactor_zeros(const LatticeShape& shape, int n_lo, int n_hi);

// Square-lattice angular sums: Gamma(2m+s)/(8 pi^s) sum' cos(4 m theta) /
// (p1^2+p2^2)^s with the angle taken from integer coordinates. Direct
// summation, so Re s > 1 is required; 0 <= m <= 4.
SumValue trig_sum_c(int m, Cplx s, double radius);

// Coefficient of sin^{2m} phi in the aspect-ratio expansion of the
// symmetrised sum about the square lattice, m in 1..4. Polynomials in
// s(1-s) times the angular sums above.
Cplx s2m_coefficient(int m, Cplx s, double radius);

// Partial expansion through sin^{2*order} phi (order <= 4).
Cplx expansion_eval(const LatticeShape& shape, Cplx s, int order, double radius);

// Same-variable expansion of t_plus through sin^order phi (order <= 7),
// built from t_plus(1,s), t_minus(s) and the series for lambda^{-s} and
// lambda^{s-1} in sin phi.
Cplx t_plus_expansion(const LatticeShape& shape, Cplx s, int order);

namespace detail {

// t_plus with the removable point s = 1/2 bridged; used by scanning code
// that must cross the critical line.
Cplx t_plus_patched(double lam, Cplx s);

// Extended-precision residual expansion_eval(lambda, s_real, order) -
// s0_tilde(lambda, s_real) for real s. The subtraction cancels ~16 digits
// near lambda = 1, so both sides run above double precision internally.
// Only integer s_real has a fast path; s_real = 3 is the intended use.
long double expansion_residual_hp(double lambda, double s_real, int order,
                                  double radius);

} // namespace detail

} // namespace lzt
