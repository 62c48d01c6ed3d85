#include "lzt/zeros.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "lzt/specialfn.hpp"

namespace lzt {

namespace {

constexpr double PI = 3.14159265358979323846;

double fold_up(double lam) { return lam >= 1.0 ? lam : 1.0 / lam; }

// internal signal: a contour sample landed on (or numerically inside) a zero
struct BoundaryHit {};

// Accumulated phase along path(tau), tau in [a, b]. Certification: every
// accepted step has |phase change| < pi/2 and bounded magnitude ratio, so
// principal-value increments sum to the true continuous phase.
class PathWinder {
  public:
    PathWinder(const AnalyticFn& f, std::function<Cplx(double)> path)
        : f_(f), path_(std::move(path)) {}

    double total(double a, double b, int initial) {
        double acc = 0.0;
        PointEval pa = probe(a);
        const double h = (b - a) / initial;
        for (int i = 0; i < initial; ++i) {
            double t1 = (i + 1 == initial) ? b : a + (i + 1) * h;
            PointEval pb = probe(t1);
            acc += walk(a + i * h, t1, pa, pb, 0);
            pa = pb;
        }
        return acc;
    }

    long evals() const { return evals_; }

  private:
    PointEval probe(double tau) {
        ++evals_;
        if (evals_ > 2000000)
            throw ConvergenceError("count_zeros: contour sampling budget exhausted");
        PointEval p = f_(path_(tau));
        if (std::abs(p.value) <= 10.0 * std::max(p.est_abs_err, 1e-300))
            throw BoundaryHit{};
        return p;
    }

    double walk(double a, double b, const PointEval& pa, const PointEval& pb,
                int depth) {
        const double dphi = std::arg(pb.value / pa.value);
        const double ratio = std::abs(pb.value) / std::abs(pa.value);
        if (std::abs(dphi) < 0.5 * PI && ratio < 4.0 && ratio > 0.25) return dphi;
        if (depth >= 48) throw BoundaryHit{};
        const double m = 0.5 * (a + b);
        PointEval pm = probe(m);
        return walk(a, m, pa, pm, depth + 1) + walk(m, b, pm, pb, depth + 1);
    }

    const AnalyticFn& f_;
    std::function<Cplx(double)> path_;
    long evals_ = 0;
};

int rect_winding(const AnalyticFn& f, const Region& r) {
    auto path = [&](double tau) -> Cplx {
        // perimeter parameterized over [0, 4], one unit per edge
        double u = tau - std::floor(tau);
        if (tau >= 4.0) u = 1.0;
        switch (static_cast<int>(std::min(std::floor(tau), 3.0))) {
            case 0: return Cplx(r.sigma_min + u * (r.sigma_max - r.sigma_min), r.t_min);
            case 1: return Cplx(r.sigma_max, r.t_min + u * (r.t_max - r.t_min));
            case 2: return Cplx(r.sigma_max - u * (r.sigma_max - r.sigma_min), r.t_max);
            default: return Cplx(r.sigma_min, r.t_max - u * (r.t_max - r.t_min));
        }
    };
    const double per_sigma = std::max(8.0, std::ceil((r.sigma_max - r.sigma_min) / 0.2));
    const double per_t = std::max(8.0, std::ceil((r.t_max - r.t_min) / 0.2));
    PathWinder w(f, path);
    double tot = w.total(0.0, 1.0, static_cast<int>(per_sigma)) +
                 w.total(1.0, 2.0, static_cast<int>(per_t)) +
                 w.total(2.0, 3.0, static_cast<int>(per_sigma)) +
                 w.total(3.0, 4.0, static_cast<int>(per_t));
    const double turns = tot / (2.0 * PI);
    const long n = std::lround(turns);
    if (std::abs(turns - n) > 0.25)
        throw ConvergenceError("count_zeros: winding total did not close to an integer");
    return static_cast<int>(n);
}

struct GridScan {
    std::vector<double> roots;
    std::vector<LineMinimum> minima;
};

double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double fa) {
    // fa and f(b) have opposite signs on entry
    while (b - a > 1e-10) {
        double m = 0.5 * (a + b);
        double fm = f(m);
        if (fm == 0.0) return m;
        if ((fa < 0.0) == (fm < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

GridScan grid_scan(const std::function<double(double)>& f, double t_min,
                   double t_max, double step) {
    if (!(t_min < t_max)) throw DomainError("scan: require t_min < t_max");
    if (!(step > 0.0)) throw DomainError("scan: require positive step");
    const long n = std::max(1L, std::lround(std::ceil((t_max - t_min) / step)));
    std::vector<double> ts(n + 1), zs(n + 1);
    for (long i = 0; i <= n; ++i) {
        ts[i] = (i == n) ? t_max : t_min + i * step;
        zs[i] = f(ts[i]);
    }
    GridScan out;
    for (long i = 0; i < n; ++i) {
        if (zs[i] == 0.0) {
            if (out.roots.empty() || out.roots.back() != ts[i]) out.roots.push_back(ts[i]);
        } else if ((zs[i] < 0.0) != (zs[i + 1] < 0.0)) {
            out.roots.push_back(bisect_root(f, ts[i], ts[i + 1], zs[i]));
        }
    }
    if (zs[n] == 0.0) out.roots.push_back(ts[n]);
    for (long i = 1; i < n; ++i) {
        const double a = std::abs(zs[i - 1]), b = std::abs(zs[i]), c = std::abs(zs[i + 1]);
        const bool same_sign = (zs[i - 1] < 0.0) == (zs[i] < 0.0) &&
                               (zs[i] < 0.0) == (zs[i + 1] < 0.0);
        if (!(same_sign && b < a && b <= c)) continue;
        // parabola vertex through the three magnitudes
        const double denom = a - 2.0 * b + c;
        double t_star = ts[i];
        if (denom > 0.0) t_star += 0.5 * step * (a - c) / denom;
        out.minima.push_back({t_star, f(t_star)});
    }
    return out;
}

} // namespace

AnalyticFn s0_tilde_fn(const LatticeShape& shape, const EvalConfig& cfg) {
    const double lam = fold_up(shape.lambda);
    return [shape, cfg, lam](Cplx s) -> PointEval {
        SumValue v = s0_tilde(shape, s, cfg);
        // scale from the two cancelling constituents: the prefactor rows and
        // the Bessel part never vanish together, so this floor survives zeros
        const Cplx tp = detail::t_plus_patched(lam, s);
        const double scale =
            std::abs(tp) + std::abs(v.value - tp) + 1e-300;
        return PointEval{v.value, scale, std::max(v.est_abs_err, 1e-16 * scale)};
    };
}

AnalyticFn t_plus_fn(const LatticeShape& shape) {
    const double lam = shape.lambda;
    return [lam](Cplx s) -> PointEval {
        const Cplx v = detail::t_plus_patched(lam, s);
        double scale;
        if (std::abs(s - Cplx(0.5, 0.0)) >= 1e-3) {
            const Cplx a = 0.25 * xi1(2.0 * s) * std::exp(-s * std::log(lam));
            const Cplx b = 0.25 * xi1(2.0 * s - 1.0) * std::exp((s - 1.0) * std::log(lam));
            scale = std::abs(a) + std::abs(b) + 1e-300;
        } else {
            scale = std::abs(v) + 0.25;  // removable point, order-one scale
        }
        return PointEval{v, scale, 3e-14 * scale};
    };
}

ScanResult scan_critical_line(double lambda, double t_min, double t_max,
                              double step) {
    const AnalyticFn f = s0_tilde_fn(LatticeShape(lambda));
    auto z = [&](double t) -> double {
        PointEval p = f(Cplx(0.5, t));
        const double floor_ =
            std::max({std::abs(p.value), p.est_abs_err, 1e-300});
        if (std::abs(p.value.imag()) > 1e-9 * floor_)
            throw AccuracyError("scan_critical_line: restriction is not real");
        return p.value.real();
    };
    GridScan g = grid_scan(z, t_min, t_max, step);
    ScanResult out;
    out.minima = std::move(g.minima);
    for (double t : g.roots) {
        ZeroRecord r;
        r.lambda = lambda;
        r.s = Cplx(0.5, t);
        r.multiplicity = 1;
        r.residual = std::abs(z(t));
        r.method = ZeroMethod::LineScan;
        r.on_critical_line = true;
        out.zeros.push_back(r);
    }
    return out;
}

int count_zeros(const AnalyticFn& f, const Region& region) {
    if (!(region.sigma_min < region.sigma_max) || !(region.t_min < region.t_max))
        throw DomainError("count_zeros: malformed region");
    static constexpr double kPerturb[3] = {0.0, 4e-4, 1e-3};
    for (int attempt = 0; attempt < 3; ++attempt) {
        Region r = region;
        r.sigma_min -= kPerturb[attempt];
        r.sigma_max += kPerturb[attempt];
        r.t_min -= kPerturb[attempt];
        r.t_max += kPerturb[attempt];
        try {
            return rect_winding(f, r);
        } catch (const BoundaryHit&) {
            continue;
        }
    }
    throw BoundaryZeroError("count_zeros: zero on boundary after 3 perturbations");
}

int count_zeros(double lambda, const Region& region) {
    return count_zeros(s0_tilde_fn(LatticeShape(lambda)), region);
}

namespace detail {

std::vector<double> scan_sign_changes(const std::function<double(double)>& f,
                                      double t_min, double t_max, double step) {
    return grid_scan(f, t_min, t_max, step).roots;
}

int winding_circle(const AnalyticFn& f, Cplx center, double radius) {
    for (double rr : {radius, 0.8 * radius, 1.25 * radius}) {
        auto path = [center, rr](double tau) -> Cplx {
            return center + rr * Cplx(std::cos(2.0 * PI * tau), std::sin(2.0 * PI * tau));
        };
        try {
            PathWinder w(f, path);
            const double tot = w.total(0.0, 1.0, 16);
            const long n = std::lround(tot / (2.0 * PI));
            if (std::abs(tot / (2.0 * PI) - n) > 0.25)
                throw ConvergenceError("winding_circle: total did not close");
            return static_cast<int>(n);
        } catch (const BoundaryHit&) {
            continue;
        }
    }
    throw BoundaryZeroError("winding_circle: zero on circle after 3 radii");
}

ZeroRecord refine_zero_fn(const AnalyticFn& f, double lambda, Cplx s_init) {
    Cplx s = s_init;
    for (int iter = 0; iter < 50; ++iter) {
        const PointEval p = f(s);
        if (std::abs(p.value) <= 1e-10 * p.scale) {
            ZeroRecord r;
            r.lambda = lambda;
            r.s = s;
            r.residual = std::abs(p.value);
            r.method = ZeroMethod::NewtonRefine;
            r.on_critical_line = std::abs(s.real() - 0.5) <= 1e-8;
            // enclosing count at 1e-3 with a shrink retest: a partner zero
            // paired tighter than the certification radius reads as a double
            const int m1 = winding_circle(f, s, 1e-3);
            const int m2 = winding_circle(f, s, 1e-4);
            r.multiplicity = std::max({m1, m2, 1});
            return r;
        }
        const double h = 1e-6 * std::max(1.0, std::abs(s));
        const Cplx d = (f(s + h).value - f(s - h).value) / (2.0 * h);
        if (!(std::abs(d) > 0.0))
            throw NoConvergenceError("refine_zero: derivative vanished");
        Cplx step = p.value / d;
        if (std::abs(step) > 0.5) step *= 0.5 / std::abs(step);
        s -= step;
    }
    throw NoConvergenceError("refine_zero: iteration budget exhausted");
}

} // namespace detail

ZeroRecord refine_zero(double lambda, Cplx s_init) {
    return detail::refine_zero_fn(s0_tilde_fn(LatticeShape(lambda)), lambda, s_init);
}

std::vector<ZeroRecord> zero_quadruple(const ZeroRecord& z) {
    const Cplx s0 = z.s;
    const std::array<Cplx, 4> orbit = {s0, 1.0 - s0, std::conj(s0),
                                       1.0 - std::conj(s0)};
    std::vector<ZeroRecord> out;
    for (const Cplx& cand : orbit) {
        bool dup = false;
        for (const ZeroRecord& r : out)
            if (std::abs(r.s - cand) <= 1e-8) dup = true;
        if (dup) continue;
        ZeroRecord r = refine_zero(z.lambda, cand);
        bool merged = false;
        for (const ZeroRecord& prev : out)
            if (std::abs(prev.s - r.s) <= 1e-8) merged = true;
        if (!merged) out.push_back(r);
    }
    return out;
}

} // namespace lzt
