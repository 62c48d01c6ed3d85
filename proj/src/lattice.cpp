#include "lzt/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "lzt/bessel.hpp"
#include "lzt/specialfn.hpp"

namespace lzt {

namespace {

constexpr double PI = 3.14159265358979323846;
constexpr double LN2 = 0.69314718055994530942;

Cplx cpow_real(double b, Cplx e) {
    return std::exp(e * std::log(b));
}

// multiply by i^k, k mod 4, exactly (sign flips and swaps only)
Cplx mul_ipow(Cplx z, int k) {
    switch (k & 3) {
        case 1: return Cplx(-z.imag(), z.real());
        case 2: return -z;
        case 3: return Cplx(z.imag(), -z.real());
        default: return z;
    }
}

// T_+ away from the removable point. With Re s == 1/2 the second zeta row
// is the conjugate of the first, so folding them keeps the value exactly
// real on the critical line (and sidesteps the spurious pole of the
// individual rows at 2s-1 = 0).
Cplx t_plus_direct(double lam, Cplx s) {
    Cplx a = xi1(2.0 * s) * cpow_real(lam, -s);
    if (s.real() == 0.5) return Cplx(0.5 * a.real(), 0.0);
    Cplx b = xi1(2.0 * s - 1.0) * cpow_real(lam, s - 1.0);
    return 0.25 * (a + b);
}

int integer_shape_class(const LatticeShape& shape) {
    double c = shape.c();
    int ci = static_cast<int>(std::lround(c));
    if (ci < 1 || std::abs(c - ci) > 1e-12 * std::max(1.0, c)) return 0;
    return ci;
}

} // namespace

namespace detail {

Cplx t_plus_patched(double lam, Cplx s) {
    const Cplx half(0.5, 0.0);
    if (std::abs(s - half) >= 1e-3) return t_plus_direct(lam, s);
    // Taylor patch about 1/2. The two rows individually blow up like
    // 1/(2s-1) here, so sampling sits at a radius where they are still
    // tame (|xi1| ~ 60, two digits lost, well inside budget).
    const double r0 = 8e-3;
    auto coef = taylor_from_circle(
        [lam](Cplx z) { return t_plus_direct(lam, z); }, half, r0, 32);
    // Realness on the vertical line through the center forces b_k * i^k
    // real; project onto that pattern so the patch is exactly real there.
    for (int k = 0; k < static_cast<int>(coef.size()); ++k) {
        Cplx rot = mul_ipow(coef[k], k);
        coef[k] = mul_ipow(Cplx(rot.real(), 0.0), 4 - (k & 3));
    }
    return eval_taylor(coef, half, r0, s);
}

} // namespace detail

SumValue direct_sum(const LatticeShape& shape, Cplx s, double radius) {
    if (!(s.real() > 1.0)) throw DomainError("direct_sum: Re s must exceed 1");
    if (!(radius >= 10.0)) throw DomainError("direct_sum: radius must be at least 10");
    const double lam = shape.lambda;
    const double R2 = radius * radius;
    const Cplx ms = -s;
    std::complex<long double> acc(0.0L, 0.0L);
    long double abs_acc = 0.0L;
    long terms = 0;

    auto add = [&](double weight, double norm2) {
        Cplx t = weight * std::exp(ms * std::log(norm2));
        acc += t;
        abs_acc += std::abs(t);
        ++terms;
    };
    const long pmax1 = static_cast<long>(std::floor(radius));
    for (long p = 1; p <= pmax1; ++p)
        add(2.0, static_cast<double>(p) * p);
    const long pmax2 = static_cast<long>(std::floor(radius / lam));
    for (long p = 1; p <= pmax2; ++p)
        add(2.0, lam * lam * static_cast<double>(p) * p);
    for (long p2 = 1; p2 <= pmax2; ++p2) {
        const double b = lam * lam * static_cast<double>(p2) * p2;
        const long p1max = static_cast<long>(std::floor(std::sqrt(std::max(0.0, R2 - b))));
        for (long p1 = 1; p1 <= p1max; ++p1)
            add(4.0, static_cast<double>(p1) * p1 + b);
    }

    SumValue out;
    Cplx partial(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    // integral estimate of everything outside the cutoff circle
    Cplx tail = (PI / lam) * std::exp((1.0 - s) * (2.0 * std::log(radius))) / (s - 1.0);
    out.value = partial + tail;
    out.terms_used = terms;
    // boundary-strip fluctuation (O(perimeter) points of size R^{-2 Re s})
    // plus per-term evaluation noise, which scales with |s| through the
    // exp(-s log n) phase and dominates at large radius
    out.est_abs_err =
        8.0 * PI * (1.0 + 1.0 / lam) * std::pow(radius, 1.0 - 2.0 * s.real()) +
        (2.0 + std::abs(s)) * 5e-15 * static_cast<double>(abs_acc);
    return out;
}

SumValue macdonald_sum(int n, int m, Cplx s, double lam, const EvalConfig& cfg) {
    if (n < 0) throw DomainError("macdonald_sum: n must be non-negative");
    if (!(lam > 0.0) || !std::isfinite(lam))
        throw DomainError("macdonald_sum: lam must be positive and finite");
    const Cplx w = s - 0.5;
    const Cplx nu = w + static_cast<double>(m);
    const double abs_nu = std::abs(nu);
    const double rw = std::abs(w.real());

    SumValue out;
    Cplx acc(0.0, 0.0);
    double err = 0.0;
    bool warned = false;
    double log_env_next = 0.0;
    long q = 1;
    for (;; ++q) {
        if (q > cfg.max_terms_per_axis)
            throw ConvergenceError("macdonald_sum: term budget exhausted before tail bound met");
        const double x = 2.0 * PI * q * lam;
        // whole-term magnitude envelope: Bessel decay times q^n, the divisor
        // count (< 2 sqrt q) and the cosh growth q^{|Re w|}
        const double log_env = log_bessel_k_mag(nu, x) +
                               (n + rw + 0.5) * std::log(static_cast<double>(q)) +
                               n * std::log(PI) + LN2;
        if (q > 1 && x >= cfg.truncation.order_ratio * abs_nu) {
            const double target =
                0.01 * cfg.target_rel_err * std::max(std::abs(acc), 1e-280);
            if (log_env < std::log(target)) {
                log_env_next = log_env;
                break;
            }
        }
        Cplx coeff(0.0, 0.0);
        for (long d = 1; d * d <= q; ++d) {
            if (q % d) continue;
            const long e = q / d;
            if (d == e)
                coeff += 1.0;
            else
                coeff += 2.0 * std::cosh(w * std::log(static_cast<double>(e) / d));
        }
        BesselResult k = bessel_k_ex(nu, x, cfg.bessel_quadrature);
        if (k.accuracy_warning && !warned) {
            out.warnings.push_back("bessel cancellation above target");
            warned = true;
        }
        const double qn = std::pow(PI * static_cast<double>(q), n);
        const Cplx term = qn * coeff * k.value;
        acc += term;
        err += std::abs(term) * k.est_rel_err;
    }
    // geometric tail: each further q costs at least e^{-2 pi lam} in the
    // Bessel factor; bound the ratio away from 1 for small lam
    const double rho = std::exp(-std::min(2.0 * PI * lam, 0.5 * PI * lam + 1.0));
    err += cfg.truncation.tail_safety * std::exp(log_env_next) / (1.0 - rho);

    out.value = acc;
    out.est_abs_err = err;
    out.terms_used = q - 1;
    return out;
}

SumValue s0_tilde(const LatticeShape& shape, Cplx s, const EvalConfig& cfg) {
    if (s == Cplx(0.0, 0.0) || s == Cplx(1.0, 0.0))
        throw PoleError("s0_tilde: poles at s = 0 and s = 1");
    const double lam = shape.lambda >= 1.0 ? shape.lambda : 1.0 / shape.lambda;
    SumValue k = macdonald_sum(0, 0, s, 1.0 / lam, cfg);
    const double rl = 1.0 / std::sqrt(lam);
    const Cplx tp = detail::t_plus_patched(lam, s);
    SumValue out;
    out.value = tp + rl * k.value;
    out.est_abs_err = rl * k.est_abs_err + 1e-14 * std::abs(tp);
    out.terms_used = k.terms_used;
    out.warnings = std::move(k.warnings);
    return out;
}

SumValue s0(const LatticeShape& shape, Cplx s, const EvalConfig& cfg) {
    if (s == Cplx(1.0, 0.0)) throw PoleError("s0: pole at s = 1");
    if (s == Cplx(0.0, 0.0)) {
        SumValue v;
        v.value = Cplx(-1.0, 0.0);
        return v;
    }
    SumValue st = s0_tilde(shape, s, cfg);
    // 8 pi^s lambda^{-s} / Gamma(s); the 1/Gamma zeros at negative integers
    // are exactly the trivial zeros of the sum
    const Cplx f = 8.0 * cpow_real(PI / shape.lambda, s) * gamma_reciprocal(s);
    st.value *= f;
    st.est_abs_err *= std::abs(f);
    return st;
}

Cplx t_plus(const LatticeShape& shape, Cplx s) {
    if (s == Cplx(0.0, 0.0) || s == Cplx(0.5, 0.0) || s == Cplx(1.0, 0.0))
        throw PoleError("t_plus: s in {0, 1/2, 1} excluded");
    return detail::t_plus_patched(shape.lambda, s);
}

Cplx t_minus(Cplx s) {
    if (s == Cplx(0.0, 0.0) || s == Cplx(0.5, 0.0) || s == Cplx(1.0, 0.0))
        throw PoleError("t_minus: s in {0, 1/2, 1} excluded");
    return 0.25 * (xi1(2.0 * s) - xi1(2.0 * s - 1.0));
}

std::vector<NamedResidual> identity_residuals(const LatticeShape& shape, Cplx s,
                                              const EvalConfig& cfg) {
    const double lam = shape.lambda >= 1.0 ? shape.lambda : 1.0 / shape.lambda;
    auto normalized = [](Cplx lhs, Cplx rhs) {
        const double scale = std::max(std::abs(lhs), std::abs(rhs));
        if (scale < 1e-30) return 0.0;
        return std::abs(lhs - rhs) / scale;
    };
    std::vector<NamedResidual> out;

    {
        const Cplx x2 = xi1(2.0 * s), x1 = xi1(2.0 * s - 1.0);
        const Cplx lhs = 0.25 * (x2 * (cpow_real(lam, -s) - cpow_real(lam, s)) +
                                 x1 * (cpow_real(lam, s - 1.0) - cpow_real(lam, 1.0 - s)));
        const Cplx rhs = std::sqrt(lam) * macdonald_sum(0, 0, s, lam, cfg).value -
                         macdonald_sum(0, 0, s, 1.0 / lam, cfg).value / std::sqrt(lam);
        out.push_back({"zeta_bessel_exchange", normalized(lhs, rhs)});
    }
    {
        const double h = 1e-4;
        const Cplx lhs = s * xi1(2.0 * s) + (1.0 - s) * xi1(2.0 * s - 1.0);
        const Cplx dk = (macdonald_sum(0, 0, s, 1.0 + h, cfg).value -
                         macdonald_sum(0, 0, s, 1.0 - h, cfg).value) /
                        (2.0 * h);
        const Cplx rhs = -2.0 * macdonald_sum(0, 0, s, 1.0, cfg).value - 4.0 * dk;
        out.push_back({"zeta_bessel_derivative_at_one", normalized(lhs, rhs)});
    }
    {
        const double h = 1e-4;
        const Cplx lhs = (s0(LatticeShape(1.0 + h), s, cfg).value -
                          s0(LatticeShape(1.0 - h), s, cfg).value) /
                         (2.0 * h);
        const Cplx rhs = -s * s0(LatticeShape(1.0), s, cfg).value;
        out.push_back({"lambda_derivative_at_one", normalized(lhs, rhs)});
    }
    return out;
}

Cplx factorized_reference(const LatticeShape& shape, Cplx s) {
    if (s == Cplx(1.0, 0.0)) throw PoleError("factorized_reference: zeta pole at s = 1");
    const int ci = integer_shape_class(shape);
    if (ci < 1 || ci > 7)
        throw UnsupportedShapeError(
            "factorized_reference: lambda^2 must be an integer in 1..7");
    auto two_pow = [](Cplx e) { return std::exp(e * LN2); };
    const Cplx z = riemann_zeta(s);
    switch (ci) {
        case 1: return 4.0 * z * dirichlet_l(-4, s);
        case 2: return 2.0 * z * dirichlet_l(-8, s);
        case 3: return 2.0 * (1.0 + two_pow(1.0 - 2.0 * s)) * z * dirichlet_l(-3, s);
        case 4:
            return 2.0 * (1.0 - two_pow(-s) + two_pow(1.0 - 2.0 * s)) * z *
                   dirichlet_l(-4, s);
        case 5: return z * dirichlet_l(-20, s) + dirichlet_l(-4, s) * dirichlet_l(5, s);
        case 6: return z * dirichlet_l(-24, s) + dirichlet_l(-3, s) * dirichlet_l(8, s);
        default:
            return 2.0 * (1.0 - two_pow(1.0 - s) + two_pow(1.0 - 2.0 * s)) * z *
                   dirichlet_l(-7, s);
    }
}

std::vector<Cplx> prefactor_zeros(const LatticeShape& shape, int n_lo, int n_hi) {
    const int ci = integer_shape_class(shape);
    if (ci != 3 && ci != 4 && ci != 7)
        throw UnsupportedShapeError("prefactor_zeros: lambda^2 must be 3, 4 or 7");
    std::vector<Cplx> out;
    for (int n = n_lo; n <= n_hi; ++n) {
        switch (ci) {
            case 3:
                out.emplace_back(0.5, (2.0 * n + 1.0) * PI / (2.0 * LN2));
                break;
            case 4: {
                const double a = std::atan(std::sqrt(7.0)) / LN2;
                out.emplace_back(0.5, -a + 2.0 * PI * n / LN2);
                out.emplace_back(0.5, a + 2.0 * PI * n / LN2);
                break;
            }
            default:
                out.emplace_back(0.5, PI / (4.0 * LN2) + 2.0 * PI * n / LN2);
                break;
        }
    }
    std::sort(out.begin(), out.end(),
              [](Cplx a, Cplx b) { return a.imag() < b.imag(); });
    return out;
}

} // namespace lzt
