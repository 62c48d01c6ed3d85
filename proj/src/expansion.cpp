#include <quadmath.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <vector>

#include "lzt/bessel.hpp"
#include "lzt/lattice.hpp"
#include "lzt/specialfn.hpp"

namespace lzt {

namespace {

constexpr double PI = 3.14159265358979323846;
constexpr double LOG_PI = 1.1447298858494001741;

void validate_trig_domain(int m, Cplx s, double radius) {
    if (m < 0 || m > 4) throw DomainError("trig_sum_c: angular index must lie in 0..4");
    if (!(s.real() > 1.0)) throw DomainError("trig_sum_c: Re s must exceed 1");
    if (!(radius >= 10.0)) throw DomainError("trig_sum_c: radius must be at least 10");
}

struct TrigTable {
    std::array<Cplx, 5> raw{};      // sum' cos(4 m theta) / n^s, no prefactor
    double raw_err = 0.0;           // shared absolute bound on each entry
    long terms = 0;
};

// One pass over the octant covers every angular order at once; the even
// Chebyshev values come from doubling identities on cos 2 theta.
TrigTable trig_sums_raw(int mmax, Cplx s, double radius) {
    TrigTable t;
    const double R2 = radius * radius;
    const Cplx ms = -s;
    std::array<std::complex<long double>, 5> acc{};
    long double abs_acc = 0.0L;

    const long pmax = static_cast<long>(std::floor(radius));
    for (long p = 1; p <= pmax; ++p, ++t.terms) {
        const Cplx v = 4.0 * std::exp(ms * std::log(static_cast<double>(p) * p));
        for (int i = 0; i <= mmax; ++i) acc[i] += v;
        abs_acc += std::abs(v);
    }
    const long dmax = static_cast<long>(std::floor(radius / std::sqrt(2.0)));
    for (long p = 1; p <= dmax; ++p, ++t.terms) {
        const Cplx v = 4.0 * std::exp(ms * std::log(2.0 * p * static_cast<double>(p)));
        static constexpr double tdiag[5] = {1.0, -1.0, 1.0, -1.0, 1.0};
        for (int i = 0; i <= mmax; ++i) acc[i] += tdiag[i] * v;
        abs_acc += std::abs(v);
    }
    for (long p2 = 1; p2 <= dmax; ++p2) {
        const double b = static_cast<double>(p2) * p2;
        const long p1max = static_cast<long>(std::floor(std::sqrt(std::max(0.0, R2 - b))));
        for (long p1 = p2 + 1; p1 <= p1max; ++p1, ++t.terms) {
            const double n = static_cast<double>(p1) * p1 + b;
            const Cplx v = 8.0 * std::exp(ms * std::log(n));
            const double x = (static_cast<double>(p1) * p1 - b) / n;  // cos 2 theta
            double tc[5];
            tc[0] = 1.0;
            tc[1] = 2.0 * x * x - 1.0;
            tc[2] = 2.0 * tc[1] * tc[1] - 1.0;
            tc[3] = 2.0 * tc[2] * tc[1] - tc[1];
            tc[4] = 2.0 * tc[2] * tc[2] - 1.0;
            for (int i = 0; i <= mmax; ++i) acc[i] += tc[i] * v;
            abs_acc += std::abs(v);
        }
    }

    for (int i = 0; i <= mmax; ++i)
        t.raw[i] = Cplx(static_cast<double>(acc[i].real()),
                        static_cast<double>(acc[i].imag()));
    // angular orders above zero average out over circles, so the integral
    // tail is a correction only for i = 0 and an error bound elsewhere
    const Cplx tail =
        PI * std::exp((1.0 - s) * (2.0 * std::log(radius))) / (s - 1.0);
    t.raw[0] += tail;
    t.raw_err = 16.0 * PI * std::pow(radius, 1.0 - 2.0 * s.real()) +
                (2.0 + std::abs(s)) * 5e-15 * static_cast<double>(abs_acc) +
                (mmax > 0 ? std::abs(tail) : 0.0);
    return t;
}

Cplx trig_prefactor(int m, Cplx s) {
    return std::exp(lgamma(2.0 * m + s) - s * LOG_PI) / 8.0;
}

// Coefficients of the angular sums inside S_{2m}, polynomials in u = s(1-s).
// Index 0 multiplies the base sum, index j >= 1 the 4j-order angular sum.
std::vector<Cplx> s2m_poly(int m, Cplx s) {
    const Cplx u = s * (1.0 - s);
    switch (m) {
        case 1: return {-u / 4.0, Cplx(0.25, 0.0)};
        case 2:
            return {u * (u - 10.0) / 64.0, -(u - 6.0) / 48.0, Cplx(1.0 / 192.0, 0.0)};
        case 3:
            return {-u * (u * u - 46.0 * u + 264.0) / 2304.0,
                    (u * u - 38.0 * u + 120.0) / 1536.0, -(u - 20.0) / 3840.0,
                    Cplx(1.0 / 23040.0, 0.0)};
        case 4:
            return {u * (u * u * u - 124.0 * u * u + 3132.0 * u - 13392.0) / 147456.0,
                    -(u * u * u - 112.0 * u * u + 2292.0 * u - 5040.0) / 92160.0,
                    (u - 70.0) * (u - 12.0) / 184320.0, -(u - 42.0) / 645120.0,
                    Cplx(1.0 / 5160960.0, 0.0)};
        default:
            throw DomainError("s2m_coefficient: order must lie in 1..4");
    }
}

} // namespace

SumValue trig_sum_c(int m, Cplx s, double radius) {
    validate_trig_domain(m, s, radius);
    TrigTable t = trig_sums_raw(m, s, radius);
    const Cplx pref = trig_prefactor(m, s);
    SumValue out;
    out.value = pref * t.raw[m];
    out.est_abs_err = std::abs(pref) * t.raw_err;
    out.terms_used = t.terms;
    return out;
}

Cplx s2m_coefficient(int m, Cplx s, double radius) {
    if (m < 1 || m > 4) throw DomainError("s2m_coefficient: order must lie in 1..4");
    validate_trig_domain(m, s, radius);
    TrigTable t = trig_sums_raw(m, s, radius);
    const auto poly = s2m_poly(m, s);
    // assemble in terms of the prefixed sums: the base factor Gamma(s)/(8 pi^s)
    // against Gamma(2j+s)/(8 pi^s) contributes a Pochhammer ratio
    Cplx acc = poly[0] * trig_prefactor(0, s) * t.raw[0];
    for (int j = 1; j <= m; ++j)
        acc += poly[j] * trig_prefactor(j, s) * t.raw[j];
    return acc;
}

Cplx expansion_eval(const LatticeShape& shape, Cplx s, int order, double radius) {
    if (order < 0 || order > 4)
        throw DomainError("expansion_eval: order must lie in 0..4");
    validate_trig_domain(order, s, radius);
    TrigTable t = trig_sums_raw(order, s, radius);
    const double w2 = shape.sin_phi() * shape.sin_phi();
    Cplx acc = trig_prefactor(0, s) * t.raw[0];
    double wp = 1.0;
    for (int m = 1; m <= order; ++m) {
        wp *= w2;
        const auto poly = s2m_poly(m, s);
        Cplx sm = poly[0] * trig_prefactor(0, s) * t.raw[0];
        for (int j = 1; j <= m; ++j)
            sm += poly[j] * trig_prefactor(j, s) * t.raw[j];
        acc += sm * wp;
    }
    return acc;
}

Cplx t_plus_expansion(const LatticeShape& shape, Cplx s, int order) {
    if (order < 0 || order > 7)
        throw DomainError("t_plus_expansion: order must lie in 0..7");
    if (s == Cplx(0.0, 0.0) || s == Cplx(0.5, 0.0) || s == Cplx(1.0, 0.0))
        throw PoleError("t_plus_expansion: s in {0, 1/2, 1} excluded");
    const Cplx p = detail::t_plus_patched(1.0, s);
    const Cplx q = t_minus(s);
    const double w = shape.sin_phi();

    // artanh(w) = w + w^3/3 + w^5/5 + ...; exponentiate the two row scalings
    // termwise with the usual series-exponential recurrence
    auto exp_series = [order](Cplx mult) {
        std::vector<Cplx> c(order + 1, Cplx(0.0, 0.0));
        for (int k = 1; k <= order; k += 2) c[k] = mult / static_cast<double>(k);
        std::vector<Cplx> b(order + 1, Cplx(0.0, 0.0));
        b[0] = 1.0;
        for (int n = 1; n <= order; ++n) {
            Cplx acc(0.0, 0.0);
            for (int k = 1; k <= n; ++k)
                acc += static_cast<double>(k) * c[k] * b[n - k];
            b[n] = acc / static_cast<double>(n);
        }
        return b;
    };
    const auto bp = exp_series(-s);        // lambda^{-s}
    const auto bm = exp_series(s - 1.0);   // lambda^{s-1}

    Cplx acc(0.0, 0.0);
    double wp = 1.0;
    for (int n = 0; n <= order; ++n) {
        const Cplx even = 0.5 * (bp[n] + bm[n]);
        const Cplx odd = 0.5 * (bp[n] - bm[n]);
        acc += (p * even + q * odd) * wp;
        wp *= w;
    }
    return acc;
}

namespace detail {

namespace {

using F128 = __float128;

// long double Euler-Maclaurin zeta for real s > 1
long double ld_zeta(long double s) {
    static const long double bf[13] = {
        1.0L / 6, -1.0L / 30, 1.0L / 42, -1.0L / 30, 5.0L / 66, -691.0L / 2730,
        7.0L / 6, -3617.0L / 510, 43867.0L / 798, -174611.0L / 330,
        854513.0L / 138, -236364091.0L / 2730, 8553103.0L / 6};
    const long N = 40;
    long double acc = 0.0L;
    for (long n = 1; n < N; ++n) acc += powl(static_cast<long double>(n), -s);
    const long double M = N;
    const long double Mms = powl(M, -s);
    acc += Mms * M / (s - 1.0L) + 0.5L * Mms;
    long double poch = s, pw = Mms / M, fact = 1.0L;
    for (int k = 1; k <= 13; ++k) {
        fact *= (2.0L * k - 1.0L) * (2.0L * k);
        acc += bf[k - 1] / fact * poch * pw;
        poch *= (s + (2.0L * k - 1.0L)) * (s + 2.0L * k);
        pw /= M * M;
    }
    return acc;
}

long double ld_xi1(long double z) {
    // valid for z > 1 (all uses here)
    return expl(-0.5L * z * logl(3.14159265358979323846264338328L) +
                lgammal(0.5L * z)) *
           ld_zeta(z);
}

// Kober evaluation of the symmetrised sum for real s, long double throughout
long double s0_tilde_real(double lambda, long double s) {
    const long double lam = lambda >= 1.0 ? (long double)lambda : 1.0L / (long double)lambda;
    const long double PIL = 3.14159265358979323846264338328L;
    const long double tp = 0.25L * (ld_xi1(2.0L * s) * powl(lam, -s) +
                                    ld_xi1(2.0L * s - 1.0L) * powl(lam, s - 1.0L));
    const long double w = s - 0.5L;
    QuadratureSpec spec;
    spec.tail_cut = 1e-30;
    long double k = 0.0L;
    for (long q = 1; q < 4000; ++q) {
        const long double x = 2.0L * PIL * q / lam;
        if (x > 90.0L && q > 2) break;  // exp(-90) is far below the f128 target
        long double coeff = 0.0L;
        for (long d = 1; d * d <= q; ++d) {
            if (q % d) continue;
            const long e = q / d;
            coeff += (d == e) ? 1.0L
                              : 2.0L * coshl(w * logl(static_cast<long double>(e) / d));
        }
        double err = 0.0;
        const std::complex<long double> kv =
            bessel_k_core(std::complex<long double>(w, 0.0L), x, spec, err);
        k += coeff * kv.real();
    }
    return tp + k / sqrtl(lam);
}

struct TrigTableReal {
    std::array<F128, 5> raw{};
    double s_real = 0.0;
    double radius = 0.0;
    bool ready = false;
};

TrigTableReal g_trig_cache;
std::mutex g_trig_mutex;

// extended-precision octant pass, integer-exponent fast path only
void trig_sums_raw_f128(double s_real, double radius, std::array<F128, 5>& out) {
    const long si = static_cast<long>(s_real);
    if (static_cast<double>(si) != s_real || si < 2)
        throw DomainError("expansion_residual_hp: integer s >= 2 required");
    const double R2 = radius * radius;
    std::array<F128, 5> acc{};

    auto npow = [si](F128 n) {
        F128 p = n;
        for (long k = 1; k < si; ++k) p *= n;
        return p;
    };
    const long pmax = static_cast<long>(std::floor(radius));
    for (long p = 1; p <= pmax; ++p) {
        const F128 v = 4.0Q / npow(static_cast<F128>(p) * p);
        for (auto& a : acc) a += v;
    }
    const long dmax = static_cast<long>(std::floor(radius / std::sqrt(2.0)));
    for (long p = 1; p <= dmax; ++p) {
        const F128 v = 4.0Q / npow(2.0Q * p * static_cast<F128>(p));
        static constexpr double tdiag[5] = {1.0, -1.0, 1.0, -1.0, 1.0};
        for (int i = 0; i < 5; ++i) acc[i] += tdiag[i] * v;
    }
    for (long p2 = 1; p2 <= dmax; ++p2) {
        const long b = p2 * p2;
        const long p1max = static_cast<long>(
            std::floor(std::sqrt(std::max(0.0, R2 - static_cast<double>(b)))));
        for (long p1 = p2 + 1; p1 <= p1max; ++p1) {
            const long n = p1 * p1 + b;
            const F128 invn = 1.0Q / static_cast<F128>(n);
            const F128 v = 8.0Q * npow(invn);
            const F128 x = static_cast<F128>(p1 * p1 - b) * invn;
            F128 t1 = 2.0Q * x * x - 1.0Q;
            F128 t2 = 2.0Q * t1 * t1 - 1.0Q;
            F128 t3 = 2.0Q * t2 * t1 - t1;
            F128 t4 = 2.0Q * t2 * t2 - 1.0Q;
            acc[0] += v;
            acc[1] += t1 * v;
            acc[2] += t2 * v;
            acc[3] += t3 * v;
            acc[4] += t4 * v;
        }
    }
    const F128 PIQ = M_PIq;
    const F128 R2q = static_cast<F128>(R2);
    acc[0] += PIQ * R2q / ((static_cast<F128>(si) - 1.0Q) * npow(R2q));
    out = acc;
}

} // namespace

long double expansion_residual_hp(double lambda, double s_real, int order,
                                  double radius) {
    if (order < 0 || order > 4)
        throw DomainError("expansion_residual_hp: order must lie in 0..4");
    std::array<F128, 5> raw;
    {
        std::lock_guard<std::mutex> lock(g_trig_mutex);
        if (g_trig_cache.ready && g_trig_cache.s_real == s_real &&
            g_trig_cache.radius == radius) {
            raw = g_trig_cache.raw;
        } else {
            trig_sums_raw_f128(s_real, radius, raw);
            g_trig_cache = {raw, s_real, radius, true};
        }
    }
    const F128 PIQ = M_PIq;
    const F128 sq = s_real;
    // prefactors Gamma(2j+s)/(8 pi^s)
    std::array<F128, 5> pref;
    for (int j = 0; j < 5; ++j)
        pref[j] = tgammaq(2.0Q * j + sq) / (8.0Q * powq(PIQ, sq));

    const long double lam =
        lambda >= 1.0 ? (long double)lambda : 1.0L / (long double)lambda;
    const long double lam2 = lam * lam;
    const F128 w2 = static_cast<F128>((lam2 - 1.0L) / (lam2 + 1.0L)) *
                    static_cast<F128>((lam2 - 1.0L) / (lam2 + 1.0L));

    const F128 u = sq * (1.0Q - sq);
    auto poly = [&](int m) -> std::array<F128, 5> {
        switch (m) {
            case 1: return {-u / 4.0Q, 0.25Q, 0, 0, 0};
            case 2: return {u * (u - 10.0Q) / 64.0Q, -(u - 6.0Q) / 48.0Q, 1.0Q / 192.0Q, 0, 0};
            case 3:
                return {-u * (u * u - 46.0Q * u + 264.0Q) / 2304.0Q,
                        (u * u - 38.0Q * u + 120.0Q) / 1536.0Q, -(u - 20.0Q) / 3840.0Q,
                        1.0Q / 23040.0Q, 0};
            default:
                return {u * (u * u * u - 124.0Q * u * u + 3132.0Q * u - 13392.0Q) / 147456.0Q,
                        -(u * u * u - 112.0Q * u * u + 2292.0Q * u - 5040.0Q) / 92160.0Q,
                        (u - 70.0Q) * (u - 12.0Q) / 184320.0Q, -(u - 42.0Q) / 645120.0Q,
                        1.0Q / 5160960.0Q};
        }
    };
    F128 acc = pref[0] * raw[0];
    F128 wp = 1.0Q;
    for (int m = 1; m <= order; ++m) {
        wp *= w2;
        const auto c = poly(m);
        F128 sm = 0.0Q;
        for (int j = 0; j <= m; ++j) sm += c[j] * pref[j] * raw[j];
        acc += sm * wp;
    }
    const F128 kober = static_cast<F128>(s0_tilde_real(lambda, (long double)s_real));
    return static_cast<long double>(acc - kober);
}

} // namespace detail

} // namespace lzt
