#include "lzt/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "lzt/errors.hpp"

namespace lzt {

namespace {

double real_on_line(const AnalyticFn& f, double t, double* est = nullptr) {
    const PointEval p = f(Cplx(0.5, t));
    if (std::abs(p.value.imag()) > 1e-9 * (p.scale + 1e-300))
        throw AccuracyError("classify: critical-line value has a nonzero imaginary part");
    if (est) *est = p.est_abs_err;
    return p.value.real();
}

// One pass over the window [t_center - h, t_center + h] on the line.
struct WindowScan {
    int sign_changes = 0;
    double edge_sign = 0.0;  // sign shared by the nonzero samples when no change
    double t_best = 0.0;     // location of the refined |Z| minimum
    double z_best = 0.0;     // signed value there
    double est_best = 0.0;
};

// Sign changes are counted between consecutive nonzero samples. When none
// appear, the signed minimum of edge_sign * Z is refined on successively
// finer local grids: that objective descends to the bottom of a dip far
// narrower than the sample spacing (tracking min |Z| instead would lock onto
// a missed crossing, where the sign of Z is a coin flip).
WindowScan scan_window(const AnalyticFn& f, double t_center, double h,
                       bool force_refine = false) {
    constexpr int kSamples = 100;
    const double step = 2.0 * h / kSamples;

    WindowScan w;
    std::array<double, kSamples + 1> ts, zs;
    double prev_sign = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
        ts[i] = t_center - h + i * step;
        zs[i] = real_on_line(f, ts[i]);
        const double sg = (zs[i] > 0.0) ? 1.0 : (zs[i] < 0.0 ? -1.0 : 0.0);
        if (sg != 0.0) {
            if (prev_sign != 0.0 && sg != prev_sign) ++w.sign_changes;
            if (w.edge_sign == 0.0) w.edge_sign = sg;
            prev_sign = sg;
        }
    }
    const double dir = (w.edge_sign != 0.0) ? w.edge_sign : 1.0;

    int idx_min = 0;
    for (int i = 1; i <= kSamples; ++i)
        if (dir * zs[i] < dir * zs[idx_min]) idx_min = i;
    w.t_best = ts[idx_min];
    w.z_best = zs[idx_min];
    if (w.sign_changes == 0 || force_refine) {
        double a = ts[std::max(0, idx_min - 1)];
        double b = ts[std::min(kSamples, idx_min + 1)];
        for (int round = 0; round < 4; ++round) {
            const double st = (b - a) / 20.0;
            for (int i = 0; i <= 20; ++i) {
                const double t = a + i * st;
                double est = 0.0;
                const double z = real_on_line(f, t, &est);
                if (dir * z < dir * w.z_best) {
                    w.t_best = t;
                    w.z_best = z;
                    w.est_best = est;
                }
            }
            a = w.t_best - st;
            b = w.t_best + st;
        }
        if (w.est_best == 0.0) real_on_line(f, w.t_best, &w.est_best);
    }
    return w;
}

Configuration classify_core(const AnalyticFn& f, double t_center, double h,
                            WindowScan* out) {
    if (!(h > 0.0) || !std::isfinite(t_center))
        throw DomainError("classify: window must have positive halfwidth");

    const WindowScan w = scan_window(f, t_center, h);
    if (out) *out = w;

    if (w.sign_changes == 2) return Configuration::OnLinePair;
    if (w.sign_changes != 0)
        throw WindowError("classify: window does not isolate one zero pair");

    if (std::abs(w.z_best) <= 10.0 * w.est_best) return Configuration::Indeterminate;
    // a dip crossing zero between grid samples is still an on-line pair
    if (w.z_best * w.edge_sign < 0.0) return Configuration::OnLinePair;

    // No crossing and a resolved dip: with Z single-signed on the line, any
    // zeros counted in the strip must sit off it. The standard strip misses
    // pairs far from the line, so widen once before giving up.
    Region strip{0.3, 0.7, t_center - h, t_center + h};
    int cnt = count_zeros(f, strip);
    if (cnt == 0) {
        strip.sigma_min = 0.02;
        strip.sigma_max = 0.98;
        cnt = count_zeros(f, strip);
    }
    if (cnt == 2) return Configuration::OffLinePair;
    throw WindowError("classify: window does not isolate one zero pair");
}

// Indeterminate resolution ladder used during bisection: shrink the window
// fourfold around the observed minimum, then tighten the evaluation target
// tenfold. A verdict may still be Indeterminate after both rungs.
Configuration classify_resolved(double c, double t_center, double h) {
    const LatticeShape shape = LatticeShape::from_c(c);
    EvalConfig cfg{};
    AnalyticFn f = s0_tilde_fn(shape, cfg);

    WindowScan w;
    Configuration k = classify_core(f, t_center, h, &w);
    if (k != Configuration::Indeterminate) return k;

    k = classify_core(f, w.t_best, h / 4.0, &w);
    if (k != Configuration::Indeterminate) return k;

    cfg.target_rel_err *= 0.1;
    f = s0_tilde_fn(shape, cfg);
    return classify_core(f, w.t_best, h / 4.0, nullptr);
}

struct Corrected {
    Cplx s;
    double resid = 0.0;
    double scale = 0.0;
    int iters = 0;
    bool ok = false;
};

// Newton steps with a central finite-difference derivative. With polish set,
// iteration continues past the residual target while the steps keep
// contracting, which pins members of a near-double pair far better than the
// residual criterion alone can.
Corrected newton_correct(const AnalyticFn& f, Cplx s0, int max_iter, bool polish = false) {
    Cplx s = s0;
    bool converged = false;
    int used = 0;
    double last_step = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const PointEval p = f(s);
        if (!converged && std::abs(p.value) <= 1e-10 * p.scale) {
            converged = true;
            used = it;
            if (!polish) return {s, std::abs(p.value), p.scale, used, true};
        }
        const double hs = 1e-6 * std::max(1.0, std::abs(s));
        const Cplx df = (f(s + hs).value - f(s - hs).value) / (2.0 * hs);
        if (!(std::abs(df) > 0.0)) break;
        Cplx step = p.value / df;
        const double mag = std::abs(step);
        if (mag > 0.5) step *= 0.5 / mag;
        if (converged && (mag >= 0.5 * last_step || mag < 1e-13)) {
            const PointEval q = f(s);
            return {s, std::abs(q.value), q.scale, used, true};
        }
        s -= step;
        last_step = mag;
    }
    const PointEval p = f(s);
    const bool ok = converged || std::abs(p.value) <= 1e-10 * p.scale;
    return {s, std::abs(p.value), p.scale, max_iter, ok};
}

// Both zeros of a split pair near s_center, probed from four directions so
// the perpendicular (off-line) and along-line splittings are both covered.
std::optional<double> pair_separation(double c, Cplx s_center) {
    const AnalyticFn f = s0_tilde_fn(LatticeShape::from_c(c));
    std::vector<Cplx> zeros;
    for (double eta : {3e-4, 1e-4, 1e-3}) {
        for (const Cplx& dir : {Cplx(1, 0), Cplx(-1, 0), Cplx(0, 1), Cplx(0, -1)}) {
            Corrected r;
            try {
                r = newton_correct(f, s_center + eta * dir, 40, true);
            } catch (const Error&) {
                continue;
            }
            if (!r.ok || std::abs(r.s - s_center) > 5e-3) continue;
            bool dup = false;
            for (const Cplx& z : zeros)
                if (std::abs(z - r.s) < 1e-9) dup = true;
            if (!dup) zeros.push_back(r.s);
        }
        if (zeros.size() >= 2) break;
    }
    if (zeros.size() < 2) return std::nullopt;
    double sep = 0.0;
    for (size_t i = 0; i < zeros.size(); ++i)
        for (size_t j = i + 1; j < zeros.size(); ++j)
            sep = std::max(sep, std::abs(zeros[i] - zeros[j]));
    return sep;
}

// two-sided 95% t quantiles for small residual degrees of freedom
double t_quantile_95(int df) {
    static constexpr std::array<double, 8> kT = {12.706, 4.303, 3.182, 2.776,
                                                 2.571, 2.447, 2.365, 2.306};
    if (df < 1) return std::numeric_limits<double>::infinity();
    return kT[std::min<int>(df, static_cast<int>(kT.size())) - 1];
}

} // namespace

Configuration classify_configuration(double c, double t_center, double t_halfwidth,
                                     const EvalConfig& cfg) {
    const LatticeShape shape = LatticeShape::from_c(c);
    const AnalyticFn f = s0_tilde_fn(shape, cfg);
    return classify_core(f, t_center, t_halfwidth, nullptr);
}

Trajectory trace(double c_start, Cplx s_start, double c_end, const TraceOptions& opts) {
    if (!(c_start > 0.0) || !(c_end > 0.0) || !std::isfinite(c_start) || !std::isfinite(c_end))
        throw DomainError("trace: c range must be positive and finite");
    if (!(opts.dc_init > 0.0) || !(opts.max_step_s > 0.0) || !(opts.dc_min > 0.0))
        throw DomainError("trace: step controls must be positive");

    const double dir = (c_end > c_start) ? 1.0 : -1.0;
    auto fn_at = [](double c) { return s0_tilde_fn(LatticeShape::from_c(c)); };

    AnalyticFn f = fn_at(c_start);
    const Corrected anchor = newton_correct(f, s_start, 50);
    if (!anchor.ok) throw NoConvergenceError("trace: starting zero did not refine");

    double c = c_start;
    Cplx s = anchor.s;
    Trajectory traj;
    traj.points.push_back({c, s, anchor.resid, anchor.iters, 0.0});
    if (c_start == c_end) return traj;  // zero-length range: the anchor alone

    // A trace that starts on the line continues along it; the merge handoff
    // applies only to trajectories arriving from off-line.
    const bool started_off = std::abs(s.real() - 0.5) >= opts.line_tol;

    double dc = dir * opts.dc_init;
    constexpr size_t kMaxPoints = 200000;
    while (true) {
        if (started_off && std::abs(s.real() - 0.5) < opts.line_tol) {
            traj.termination = Termination::MergedOnCriticalLine;
            break;
        }
        if ((c_end - c) * dir <= 1e-14 * std::max(1.0, std::abs(c_end))) {
            traj.termination = Termination::ReachedLambdaBound;
            break;
        }
        if (traj.points.size() >= kMaxPoints)
            throw ConvergenceError("trace: step budget exhausted");

        const PointEval here = f(s);
        const double hs = 1e-6 * std::max(1.0, std::abs(s));
        const Cplx dFds = (f(s + hs).value - f(s - hs).value) / (2.0 * hs);
        if (std::abs(dFds) < 1e-8 * here.scale) {
            traj.termination = Termination::DerivativeDegenerate;
            break;
        }
        const double hc = 1e-6 * std::max(1.0, std::abs(c));
        const Cplx dFdc = (fn_at(c + hc)(s).value - fn_at(c - hc)(s).value) / (2.0 * hc);
        const Cplx slope = -dFdc / dFds;

        bool committed = false;
        bool underflow = false;
        while (!committed) {
            if (std::abs(dc) < opts.dc_min) {
                underflow = true;
                break;
            }
            double dc_try = dc;
            if ((c + dc_try - c_end) * dir > 0.0) dc_try = c_end - c;

            Cplx ds = slope * dc_try;
            if (std::abs(ds) > opts.max_step_s) {
                dc_try *= 0.9 * opts.max_step_s / std::abs(ds);
                ds = slope * dc_try;
            }
            // Near a merge the zero dives toward the line like a square root;
            // resolving the dive geometrically keeps the landing point at the
            // merge ordinate instead of overshooting deep into the on-line
            // regime in one stride.
            const double dist = std::abs(s.real() - 0.5);
            if (started_off && dist < 0.05 && std::abs(ds.real()) > 0.5 * dist) {
                dc_try *= 0.5 * dist / std::abs(ds.real());
                ds = slope * dc_try;
            }
            if (std::abs(dc_try) < opts.dc_min) {
                underflow = true;
                break;
            }

            AnalyticFn f_next = fn_at(c + dc_try);
            const Corrected corr = newton_correct(f_next, s + ds, 8);
            if (corr.ok && corr.iters <= 5 && std::abs(corr.s - s) <= opts.max_step_s) {
                c += dc_try;
                s = corr.s;
                f = std::move(f_next);
                traj.points.push_back({c, s, corr.resid, corr.iters, dc_try});
                committed = true;
                if (corr.iters <= 2 && std::abs(dc) < opts.dc_init)
                    dc = dir * std::min(opts.dc_init, 2.0 * std::abs(dc));
            } else {
                dc *= 0.5;
            }
        }
        if (underflow) {
            traj.termination = Termination::StepUnderflow;
            break;
        }
    }
    return traj;
}

TransitionBracket find_transition(double c_lo, double c_hi, double t_center,
                                  double t_halfwidth, double target_width) {
    if (!(c_lo > 0.0) || !(c_hi > c_lo) || !(t_halfwidth > 0.0) || !(target_width > 0.0))
        throw DomainError("find_transition: need 0 < c_lo < c_hi and positive widths");

    const Configuration lo = classify_resolved(c_lo, t_center, t_halfwidth);
    const Configuration hi = classify_resolved(c_hi, t_center, t_halfwidth);
    if (lo == Configuration::Indeterminate || hi == Configuration::Indeterminate)
        throw BracketError("find_transition: endpoint classification is indeterminate");
    if (lo == hi)
        throw BracketError("find_transition: endpoints classify identically");

    while (c_hi - c_lo > target_width) {
        const double cm = 0.5 * (c_lo + c_hi);
        if (!(cm > c_lo) || !(cm < c_hi)) break;  // spacing exhausted
        Configuration km = classify_resolved(cm, t_center, t_halfwidth);
        if (km == Configuration::Indeterminate) {
            // conservative split: move whichever quarter point gives a verdict
            const double q1 = 0.5 * (c_lo + cm);
            const Configuration k1 = classify_resolved(q1, t_center, t_halfwidth);
            if (k1 == lo) { c_lo = q1; continue; }
            if (k1 == hi) { c_hi = q1; continue; }
            const double q3 = 0.5 * (cm + c_hi);
            const Configuration k3 = classify_resolved(q3, t_center, t_halfwidth);
            if (k3 == hi) { c_hi = q3; continue; }
            if (k3 == lo) { c_lo = q3; continue; }
            throw ConvergenceError("find_transition: indeterminate zone spans the probes");
        }
        if (km == lo) c_lo = cm; else c_hi = cm;
    }
    return {c_lo, c_hi, lo, hi};
}

MergeReport merge_signature(double c, Cplx s_merge) {
    const LatticeShape shape = LatticeShape::from_c(c);
    MergeReport rep;
    rep.winding = detail::winding_circle(s0_tilde_fn(shape), s_merge, 1e-3);

    // separation law |s1 - s2| ~ |c - c*|^beta, sampled on both sides
    std::vector<double> xs, ys;
    for (double dco : {1e-5, 1e-6, 1e-7})
        for (double sgn : {1.0, -1.0})
            if (const auto sep = pair_separation(c + sgn * dco, s_merge)) {
                xs.push_back(std::log(dco));
                ys.push_back(std::log(*sep));
            }
    rep.fit_points = static_cast<int>(xs.size());
    if (rep.fit_points < 3) return rep;  // no splitting observed: winding only

    const int n = rep.fit_points;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    const double beta = (n * sxy - sx * sy) / det;
    const double alpha = (sy - beta * sx) / n;
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = ys[i] - alpha - beta * xs[i];
        ssr += r * r;
    }
    const double se = std::sqrt(std::max(ssr, 0.0) / (n - 2) / (sxx - sx * sx / n));
    const double tq = t_quantile_95(n - 2);
    rep.beta = beta;
    rep.beta_low = beta - tq * se;
    rep.beta_high = beta + tq * se;
    return rep;
}

namespace detail {

LineMinimum window_minimum(const AnalyticFn& f, double t_center, double t_halfwidth) {
    if (!(t_halfwidth > 0.0) || !std::isfinite(t_center))
        throw DomainError("window_minimum: window must have positive halfwidth");
    const WindowScan w = scan_window(f, t_center, t_halfwidth, true);
    return {w.t_best, w.z_best};
}

} // namespace detail

} // namespace lzt
