#pragma once

#include <functional>
#include <vector>

#include "lzt/common.hpp"

namespace lzt {

// Gamma function for complex argument. PoleError at non-positive integers.
Cplx gamma(Cplx s);

// Principal-branch value of log Gamma up to a multiple of 2*pi*i; safe to
// exponentiate or to difference inside a single exp().
Cplx lgamma(Cplx s);

// 1/Gamma, entire; returns exactly 0 at non-positive integers.
Cplx gamma_reciprocal(Cplx s);

// Real digamma for x > 0.
double digamma(double x);

// Riemann zeta by Euler-Maclaurin summation, continued to Re s < 0 through
// the functional equation. PoleError at s = 1.
Cplx riemann_zeta(Cplx s);

// Hurwitz zeta(s, a) for 0 < a <= 1 by Euler-Maclaurin. PoleError at s = 1.
Cplx hurwitz_zeta(Cplx s, double a);

// Symmetrised zeta xi1(s) = pi^(-s/2) Gamma(s/2) zeta(s) = xi1(1-s).
// PoleError at s in {0, 1}.
Cplx xi1(Cplx s);

// Kronecker symbol (d/n) for n >= 0.
int kronecker_chi(int d, long long n);

// Dirichlet L-function for the Kronecker character of discriminant d,
// |d| <= 24, d = 0 or 1 mod 4. Entire for the non-principal characters
// supported here; the removable point s = 1 is evaluated explicitly.
Cplx dirichlet_l(int d, Cplx s);

// Completed L-function Lambda_d(s) = (|d|/pi)^((s+a)/2) Gamma((s+a)/2) L_d(s)
// with a = 0 for even characters (d > 0) and a = 1 for odd (d < 0).
// Invariant under s -> 1-s and real on the critical line.
Cplx dirichlet_l_completed(int d, Cplx s);

// Scaled Taylor coefficients b_k of an analytic f about z0, sampled on the
// circle |z - z0| = r with m points: f(z) = sum b_k ((z-z0)/r)^k.
std::vector<Cplx> taylor_from_circle(const std::function<Cplx(Cplx)>& f,
                                     Cplx z0, double r, int m);

Cplx eval_taylor(const std::vector<Cplx>& coef, Cplx z0, double r, Cplx z);

} // namespace lzt
