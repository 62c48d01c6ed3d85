#include "lzt/specialfn.hpp"

#include <array>
#include <cmath>
#include <cstdlib>

namespace lzt {

namespace {

constexpr double PI = 3.14159265358979323846;
constexpr double LOG_PI = 1.1447298858494001741;

// b^e for real b > 0; unlike std::pow this stays conjugate-covariant,
// which several realness invariants downstream rely on.
inline Cplx cpow_real(double b, Cplx e) {
    return std::exp(e * std::log(b));
}

inline bool is_nonpositive_integer(Cplx s) {
    return s.imag() == 0.0 && s.real() <= 0.0 && s.real() == std::floor(s.real());
}

// log(sin(pi z)) up to a multiple of 2*pi*i, stable for large |Im z|.
Cplx log_sin_pi(Cplx z) {
    if (z.imag() < 0.0) return std::conj(log_sin_pi(std::conj(z)));
    double n = std::round(z.real());
    Cplx w(z.real() - n, z.imag());  // |Re w| <= 1/2
    Cplx ls;
    if (z.imag() <= 30.0) {
        Cplx sw(std::sin(PI * w.real()) * std::cosh(PI * w.imag()),
                std::cos(PI * w.real()) * std::sinh(PI * w.imag()));
        ls = std::log(sw);
    } else {
        // sin(pi w) = (i/2) e^{-i pi w} (1 - e^{2 i pi w}), second factor ~ 1
        Cplx e2 = std::exp(Cplx(0.0, 2.0 * PI) * w);
        ls = std::log(Cplx(0.0, 0.5)) - Cplx(0.0, PI) * w + std::log(1.0 - e2);
    }
    if (std::fmod(std::abs(n), 2.0) == 1.0) ls += Cplx(0.0, PI);
    return ls;
}

// Lanczos approximation, g = 607/128, valid for Re z >= 1/2.
Cplx lgamma_core(Cplx z) {
    static constexpr double g = 607.0 / 128.0;
    static constexpr std::array<double, 15> c = {
        0.99999999999999709182,     57.156235665862923517,
        -59.597960355475491248,     14.136097974741747174,
        -0.49191381609762019978,    0.33994649984811888699e-4,
        0.46523628927048575665e-4,  -0.98374475304879564677e-4,
        0.15808870322491248884e-3,  -0.21026444172410488319e-3,
        0.21743961811521264320e-3,  -0.16431810653676389022e-3,
        0.84418223983852743293e-4,  -0.26190838401581408670e-4,
        0.36899182659531622704e-5};
    Cplx zm1 = z - 1.0;
    Cplx sum = c[0];
    for (int i = 1; i < 15; ++i) sum += c[i] / (zm1 + static_cast<double>(i));
    Cplx t = zm1 + g + 0.5;
    return (zm1 + 0.5) * std::log(t) - t + std::log(2.5066282746310005024 * sum);
}

// B_2 .. B_26
constexpr std::array<double, 13> BERNOULLI = {
    1.0 / 6.0,       -1.0 / 30.0,        1.0 / 42.0,
    -1.0 / 30.0,     5.0 / 66.0,         -691.0 / 2730.0,
    7.0 / 6.0,       -3617.0 / 510.0,    43867.0 / 798.0,
    -174611.0 / 330.0, 854513.0 / 138.0, -236364091.0 / 2730.0,
    8553103.0 / 6.0};

// B_{2k} / (2k)! for k = 1..13
const std::array<double, 13>& bernoulli_over_factorial() {
    static const std::array<double, 13> v = [] {
        std::array<double, 13> r{};
        double fact = 1.0;
        for (int k = 1; k <= 13; ++k) {
            fact *= (2.0 * k - 1.0) * (2.0 * k);
            r[k - 1] = BERNOULLI[k - 1] / fact;
        }
        return r;
    }();
    return v;
}

// Euler-Maclaurin sum of (n+a)^{-s} over n >= 0 with 12 correction terms.
// Runs in long double: for Re s < 0 the partial sums grow like N^{1-Re s}
// while the result stays O(1), and the extra mantissa absorbs that
// cancellation.
Cplx hurwitz_em(Cplx s, double a) {
    using CLD = std::complex<long double>;
    const double t = std::abs(s.imag());
    const long N = std::max(20L, static_cast<long>(std::ceil(2.0 * t)));
    const CLD sl(s.real(), s.imag());
    const long double al = a;
    CLD acc(0.0L, 0.0L);
    for (long n = 0; n < N; ++n)
        acc += std::exp(-sl * std::log(static_cast<long double>(n) + al));
    const long double M = static_cast<long double>(N) + al;
    const CLD Mms = std::exp(-sl * std::log(M));
    acc += Mms * M / (sl - 1.0L);
    acc += 0.5L * Mms;
    const auto& bf = bernoulli_over_factorial();
    CLD poch = sl;                 // (s)_{2k-1}
    CLD pw = Mms / M;              // M^{-s-2k+1}
    for (int k = 1; k <= 12; ++k) {
        acc += static_cast<long double>(bf[k - 1]) * poch * pw;
        poch *= (sl + (2.0L * k - 1.0L)) * (sl + 2.0L * k);
        pw /= M * M;
    }
    return Cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
}

} // namespace

Cplx lgamma(Cplx s) {
    if (is_nonpositive_integer(s)) throw PoleError("lgamma: non-positive integer argument");
    if (s.real() >= 0.5) return lgamma_core(s);
    return LOG_PI - log_sin_pi(s) - lgamma_core(1.0 - s);
}

Cplx gamma(Cplx s) {
    return std::exp(lgamma(s));
}

Cplx gamma_reciprocal(Cplx s) {
    if (is_nonpositive_integer(s)) return Cplx(0.0, 0.0);
    return std::exp(-lgamma(s));
}

double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma: argument must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv2 = 1.0 / (x * x);
    double r = std::log(x) - 0.5 / x;
    double p = inv2;
    for (int k = 1; k <= 7; ++k) {
        r -= BERNOULLI[k - 1] / (2.0 * k) * p;
        p *= inv2;
    }
    return r + acc;
}

Cplx riemann_zeta(Cplx s) {
    if (s == Cplx(1.0, 0.0)) throw PoleError("riemann_zeta: pole at s = 1");
    if (s.real() < 0.0) {
        // zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1-s) zeta(1-s)
        Cplx f = std::exp(s * 0.69314718055994530942 + (s - 1.0) * LOG_PI +
                          log_sin_pi(0.5 * s) + lgamma_core(1.0 - s));
        return f * hurwitz_em(1.0 - s, 1.0);
    }
    return hurwitz_em(s, 1.0);
}

Cplx hurwitz_zeta(Cplx s, double a) {
    if (!(a > 0.0) || a > 1.0) throw DomainError("hurwitz_zeta: a must lie in (0, 1]");
    if (s == Cplx(1.0, 0.0)) throw PoleError("hurwitz_zeta: pole at s = 1");
    if (s.real() < -24.0) throw DomainError("hurwitz_zeta: Re s below supported continuation range");
    return hurwitz_em(s, a);
}

Cplx xi1(Cplx s) {
    if (s == Cplx(0.0, 0.0) || s == Cplx(1.0, 0.0))
        throw PoleError("xi1: pole at s in {0, 1}");
    if (s.real() < 0.5) s = 1.0 - s;  // exact reflection symmetry
    return std::exp(-(s * 0.5) * LOG_PI + lgamma_core(0.5 * s)) * riemann_zeta(s);
}

int kronecker_chi(int d, long long n) {
    static constexpr int tab2[8] = {0, 1, 0, -1, 0, -1, 0, 1};
    long long a = d;
    long long b = n;
    if (b == 0) return (a == 1 || a == -1) ? 1 : 0;
    if (((a | b) & 1) == 0) return 0;
    int v = 0;
    while ((b & 1) == 0) { b >>= 1; ++v; }
    int k = (v & 1) ? tab2[a & 7] : 1;
    while (a != 0) {
        v = 0;
        while ((a & 1) == 0) { a >>= 1; ++v; }
        if (v & 1) k *= tab2[b & 7];
        if (a & b & 2) k = -k;
        long long r = a < 0 ? -a : a;
        a = b % r;
        b = r;
    }
    return (b > 1) ? 0 : k;
}

namespace {

void validate_discriminant(int d) {
    int m = ((d % 4) + 4) % 4;
    if (d == 0 || std::abs(d) > 24 || (m != 0 && m != 1))
        throw DomainError("dirichlet_l: unsupported discriminant");
}

Cplx dirichlet_l_direct(int d, Cplx s) {
    const int q = std::abs(d);
    Cplx acc(0.0, 0.0);
    for (int a = 1; a <= q; ++a) {
        int ch = kronecker_chi(d, a);
        if (ch != 0) acc += static_cast<double>(ch) * hurwitz_zeta(s, static_cast<double>(a) / q);
    }
    return cpow_real(q, -s) * acc;
}

} // namespace

Cplx dirichlet_l(int d, Cplx s) {
    validate_discriminant(d);
    if (d == 1) return riemann_zeta(s);  // principal character; inherits the pole
    const int q = std::abs(d);
    if (s == Cplx(1.0, 0.0)) {
        double acc = 0.0;
        for (int a = 1; a <= q; ++a) {
            int ch = kronecker_chi(d, a);
            if (ch != 0) acc += ch * digamma(static_cast<double>(a) / q);
        }
        return Cplx(-acc / q, 0.0);
    }
    if (std::abs(s - Cplx(1.0, 0.0)) < 0.05) {
        // the Hurwitz poles cancel across the character sum; evaluate through
        // a local Taylor patch to avoid the near-pole cancellation
        auto f = [d](Cplx z) { return dirichlet_l_direct(d, z); };
        auto coef = taylor_from_circle(f, Cplx(1.0, 0.0), 0.25, 48);
        return eval_taylor(coef, Cplx(1.0, 0.0), 0.25, s);
    }
    return dirichlet_l_direct(d, s);
}

Cplx dirichlet_l_completed(int d, Cplx s) {
    validate_discriminant(d);
    const double a = d > 0 ? 0.0 : 1.0;
    const int q = std::abs(d);
    Cplx half = 0.5 * (s + a);
    return std::exp(half * std::log(q / PI) + lgamma(half)) * dirichlet_l(d, s);
}

std::vector<Cplx> taylor_from_circle(const std::function<Cplx(Cplx)>& f,
                                     Cplx z0, double r, int m) {
    std::vector<Cplx> samples(m);
    for (int j = 0; j < m; ++j) {
        double th = 2.0 * PI * j / m;
        samples[j] = f(z0 + r * Cplx(std::cos(th), std::sin(th)));
    }
    std::vector<Cplx> coef(m);
    for (int k = 0; k < m; ++k) {
        Cplx acc(0.0, 0.0);
        for (int j = 0; j < m; ++j) {
            double th = -2.0 * PI * j * k / m;
            acc += samples[j] * Cplx(std::cos(th), std::sin(th));
        }
        coef[k] = acc / static_cast<double>(m);
    }
    return coef;
}

Cplx eval_taylor(const std::vector<Cplx>& coef, Cplx z0, double r, Cplx z) {
    Cplx u = (z - z0) / r;
    Cplx acc(0.0, 0.0);
    for (auto it = coef.rbegin(); it != coef.rend(); ++it) acc = acc * u + *it;
    return acc;
}

} // namespace lzt
