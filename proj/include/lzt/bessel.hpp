#pragma once

#include "lzt/common.hpp"

namespace lzt {

struct BesselResult {
    Cplx value{0.0, 0.0};
    double est_rel_err = 0.0;
    bool accuracy_warning = false;
};

// Modified Bessel function K_nu(x) for complex order and real x > 0.
// Two evaluation routes share the work: a power-series reflection form when
// x is small against |Im nu|, and dyadic trapezoid refinement of
// int_0^inf exp(-x cosh u) cosh(nu u) du otherwise. Internals run in long
// double; est_rel_err reports the realized cancellation loss.
BesselResult bessel_k_ex(Cplx nu, double x, const QuadratureSpec& q = QuadratureSpec{});

Cplx bessel_k(Cplx nu, double x, const QuadratureSpec& q = QuadratureSpec{});

// Upper estimate of ln |K_nu(x)|, used for series truncation planning.
double log_bessel_k_mag(Cplx nu, double x);

namespace detail {

using CLD = std::complex<long double>;

CLD bessel_k_core(CLD nu, long double x, const QuadratureSpec& q, double& est_rel_err);

// Stirling log Gamma for complex long double, |Im z| unrestricted,
// argument pushed to Re z >= 8 by the recurrence.
CLD lgamma_stirling(CLD z);

} // namespace detail

} // namespace lzt
