#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "lzt/errors.hpp"

namespace lzt {

using Cplx = std::complex<double>;

// Control for the semi-infinite Bessel quadrature.
struct QuadratureSpec {
    double abs_tol = 1e-16;
    double rel_tol = 1e-14;
    int max_levels = 18;       // dyadic refinement levels
    double tail_cut = 1e-24;   // integrand magnitude relative to its peak at which the range is cut
};

// A computed sum with its error estimate and bookkeeping.
struct SumValue {
    Cplx value{0.0, 0.0};
    double est_abs_err = 0.0;
    long terms_used = 0;
    std::vector<std::string> warnings;
};

// Series truncation policy: the order_ratio activation point is a convergence
// heuristic for MacDonald-function sums; a geometric tail bound must still be
// met before a sum is reported converged.
struct TruncationRule {
    double order_ratio = 1.3;
    double tail_safety = 4.0;
};

struct EvalConfig {
    double target_rel_err = 1e-12;
    long max_terms_per_axis = 4000;
    QuadratureSpec bessel_quadrature{};
    TruncationRule truncation{};
};

// Period ratio lambda > 0 with the derived expansion variables
// chi = lambda - 1/lambda and sin_phi = (lambda^2-1)/(lambda^2+1).
struct LatticeShape {
    double lambda = 1.0;

    explicit LatticeShape(double lam) : lambda(lam) {
        if (!(lam > 0.0) || !std::isfinite(lam))
            throw DomainError("LatticeShape: lambda must be positive and finite");
    }
    static LatticeShape from_c(double c) {
        if (!(c > 0.0) || !std::isfinite(c))
            throw DomainError("LatticeShape: c = lambda^2 must be positive and finite");
        return LatticeShape(std::sqrt(c));
    }
    double c() const { return lambda * lambda; }
    double chi() const { return lambda - 1.0 / lambda; }
    double sin_phi() const {
        return (lambda * lambda - 1.0) / (lambda * lambda + 1.0);
    }
};

} // namespace lzt
