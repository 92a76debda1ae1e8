#include "specloc/locus.hpp"

#include <algorithm>
#include <cmath>

#include "specloc/qes.hpp"

namespace specloc {

namespace {

struct Vec2 {
    double x = 0.0, y = 0.0;
    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

Vec2 gradient(const HFun& H, Vec2 u, double fd) {
    double hx = fd * (1.0 + std::abs(u.x));
    double hy = fd * (1.0 + std::abs(u.y));
    double gx = (H(u.x + hx, u.y) - H(u.x - hx, u.y)) / (2.0 * hx);
    double gy = (H(u.x, u.y + hy) - H(u.x, u.y - hy)) / (2.0 * hy);
    return {gx, gy};
}

bool inside(const TraceBounds& b, Vec2 u) {
    return u.x >= b.x_lo && u.x <= b.x_hi && u.y >= b.lam_lo && u.y <= b.lam_hi;
}

// Newton iteration constrained to the hyperplane through u_pred orthogonal
// to the tangent; the gradient row is held fixed (chord iteration).
bool correct(const HFun& H, Vec2 grad, Vec2 tang, Vec2 upred, double tol, int iters,
             Vec2& out, double& resid) {
    Vec2 u = upred;
    double det = grad.x * tang.y - grad.y * tang.x;
    if (std::abs(det) < 1e-300) return false;
    for (int it = 0; it < iters; ++it) {
        double hv = H(u.x, u.y);
        double cv = tang.dot(u - upred);
        double dx = (-hv * tang.y + cv * grad.y) / det;
        double dy = (-cv * grad.x + hv * tang.x) / det;
        u = u + Vec2{dx, dy};
        double gn = grad.norm();
        resid = std::abs(hv) / (gn + 1e-300);
        double scale = 1.0 + u.norm();
        if (resid < tol * scale && Vec2{dx, dy}.norm() < tol * scale) {
            out = u;
            return true;
        }
    }
    return false;
}

// Solve H(x, lambda) = 0 for x at fixed lambda, by a guarded secant/Newton
// with finite-difference slope.
bool solve_x(const HFun& H, double lambda, double x_init, double fd, double& x_out) {
    double x = x_init;
    for (int it = 0; it < 60; ++it) {
        double hx = fd * (1.0 + std::abs(x));
        double f = H(x, lambda);
        double d = (H(x + hx, lambda) - H(x - hx, lambda)) / (2.0 * hx);
        if (std::abs(d) < 1e-300) return false;
        double step = f / d;
        x -= step;
        if (std::abs(step) < 1e-12 * (1.0 + std::abs(x))) {
            x_out = x;
            return true;
        }
    }
    return false;
}

// Refine a fold bracketed by trace points i-1, i, i+1: extremize x(lambda)
// along the curve by golden-section search.
bool refine_fold(const HFun& H, const CurveTrace& tr, int i, double fd,
                 std::pair<double, double>& out) {
    const int n = static_cast<int>(tr.pts.size());
    auto at = [&](int k) {
        int kk = ((k % n) + n) % n;
        return Vec2{tr.pts[static_cast<size_t>(kk)].x, tr.pts[static_cast<size_t>(kk)].lambda};
    };
    Vec2 a = at(i - 1), b = at(i), c = at(i + 1);
    const bool maximize = b.x >= std::max(a.x, c.x);
    double lo = std::min(a.y, c.y), hi = std::max(a.y, c.y);
    if (!(hi > lo)) return false;

    auto xval = [&](double lam, double guess) {
        double x = 0.0;
        if (!solve_x(H, lam, guess, fd, x)) return guess;
        return x;
    };
    const double gr = 0.6180339887498949;
    double l1 = hi - gr * (hi - lo), l2 = lo + gr * (hi - lo);
    double x1 = xval(l1, b.x), x2 = xval(l2, b.x);
    for (int it = 0; it < 200 && (hi - lo) > 1e-8 * (1.0 + std::abs(lo)); ++it) {
        bool keep_low = maximize ? (x1 > x2) : (x1 < x2);
        if (keep_low) {
            hi = l2;
            l2 = l1;
            x2 = x1;
            l1 = hi - gr * (hi - lo);
            x1 = xval(l1, x2);
        } else {
            lo = l1;
            l1 = l2;
            x1 = x2;
            l2 = lo + gr * (hi - lo);
            x2 = xval(l2, x1);
        }
    }
    double lam = 0.5 * (lo + hi);
    out = {xval(lam, b.x), lam};
    return true;
}

std::vector<int> detect_turning_indices(const std::vector<TracePoint>& pts, bool closed) {
    std::vector<int> out;
    const int n = static_cast<int>(pts.size());
    if (n < 3) return out;
    auto dx = [&](int i) {
        int j = (i + 1) % n;
        return pts[static_cast<size_t>(j)].x - pts[static_cast<size_t>(i)].x;
    };
    int last = closed ? n : n - 1;
    double prev = 0.0;
    bool have = false;
    for (int i = 0; i < last; ++i) {
        double d = dx(i);
        if (std::abs(d) < 1e-14) continue;
        if (have && std::signbit(d) != std::signbit(prev)) out.push_back(i);
        prev = d;
        have = true;
    }
    return out;
}

} // namespace

CurveTrace trace(const HFun& H, double x0, double lambda0, double step,
                 const TraceBounds& bounds, int max_points, const TraceOptions& opts) {
    CurveTrace tr;
    Vec2 u{x0, lambda0};
    Vec2 g = gradient(H, u, opts.fd_step);
    if (g.norm() < 1e-10) throw SingularPoint("trace: vanishing gradient at the start", u.x, u.y);

    // land exactly on the curve first
    {
        double h0 = std::abs(H(u.x, u.y));
        if (h0 > opts.corrector_tol * g.norm() * (1.0 + u.norm())) {
            Vec2 t{-g.y / g.norm(), g.x / g.norm()};
            Vec2 fixed = u;
            Vec2 got;
            double r = 0.0;
            if (!correct(H, g, t, fixed, opts.corrector_tol, 3 * opts.max_corrector_iters, got, r))
                throw CorrectorDiverged("trace: start point does not satisfy H = 0");
            u = got;
            g = gradient(H, u, opts.fd_step);
        }
    }

    Vec2 t{-g.y, g.x};
    double gn = t.norm();
    if (gn < 1e-10) throw SingularPoint("trace: vanishing gradient at the start", u.x, u.y);
    t = t * (opts.initial_direction / gn);

    const Vec2 u_start = u;
    const Vec2 t_start = t;
    double s = 0.0;
    tr.pts.push_back({s, u.x, u.y, std::abs(H(u.x, u.y)) / (g.norm() + 1e-300)});

    double h = step;
    int easy = 0;
    while (static_cast<int>(tr.pts.size()) < max_points) {
        Vec2 upred = u + t * h;
        Vec2 gp = gradient(H, upred, opts.fd_step);
        if (gp.norm() < 1e-10)
            throw SingularPoint("trace: vanishing gradient (locus crossing?)", upred.x, upred.y);
        Vec2 unew;
        double resid = 0.0;
        bool ok = correct(H, gp, t, upred, opts.corrector_tol, opts.max_corrector_iters,
                          unew, resid);
        Vec2 gnew, tnew;
        if (ok) {
            gnew = gradient(H, unew, opts.fd_step);
            double gm = gnew.norm();
            if (gm < 1e-10)
                throw SingularPoint("trace: vanishing gradient (locus crossing?)", unew.x, unew.y);
            tnew = Vec2{-gnew.y, gnew.x} * (1.0 / gm);
            if (tnew.dot(t) < 0.0) tnew = tnew * -1.0;
            // reject sharp turns: the corrector may have hopped to another arc
            if (tnew.dot(t) < 0.5) ok = false;
        }
        if (!ok) {
            h *= 0.5;
            easy = 0;
            if (h < step / 8.0)
                throw CorrectorDiverged("trace: corrector failed at minimum step");
            continue;
        }

        s += (unew - u).norm();
        u = unew;
        t = tnew;
        tr.pts.push_back({s, u.x, u.y, resid});

        if (!inside(bounds, u)) break;
        if (s > 3.0 * step && (u - u_start).norm() < 0.5 * step && t.dot(t_start) > 0.5) {
            tr.closed = true;
            break;
        }
        if (++easy >= 5) {
            h = std::min(2.0 * h, 4.0 * step);
            easy = 0;
        }
    }

    tr.turning_indices = detect_turning_indices(tr.pts, tr.closed);
    if (opts.refine_folds) {
        for (int idx : tr.turning_indices) {
            std::pair<double, double> fold;
            if (refine_fold(H, tr, idx, opts.fd_step, fold)) tr.singular_events.push_back(fold);
        }
    }
    return tr;
}

std::vector<std::pair<double, double>> turning_points(const CurveTrace& tr, const HFun& H) {
    std::vector<std::pair<double, double>> out;
    TraceOptions opts;
    for (int idx : detect_turning_indices(tr.pts, tr.closed)) {
        std::pair<double, double> fold;
        if (refine_fold(H, tr, idx, opts.fd_step, fold)) out.push_back(fold);
    }
    return out;
}

std::vector<double> curve_values_at_x(const CurveTrace& tr, double x) {
    std::vector<double> out;
    const int n = static_cast<int>(tr.pts.size());
    int last = tr.closed ? n : n - 1;
    for (int i = 0; i < last; ++i) {
        const auto& a = tr.pts[static_cast<size_t>(i)];
        const auto& b = tr.pts[static_cast<size_t>((i + 1) % n)];
        if ((a.x - x) * (b.x - x) <= 0.0 && a.x != b.x) {
            double w = (x - a.x) / (b.x - a.x);
            if (w >= 0.0 && w <= 1.0) out.push_back(a.lambda + w * (b.lambda - a.lambda));
        }
    }
    std::sort(out.begin(), out.end());
    // collapse duplicates at shared segment endpoints
    std::vector<double> uniq;
    for (double v : out)
        if (uniq.empty() || std::abs(v - uniq.back()) > 1e-9 * (1.0 + std::abs(v)))
            uniq.push_back(v);
    return uniq;
}

double trace_hausdorff(const CurveTrace& a, const CurveTrace& b) {
    auto one_sided = [](const CurveTrace& p, const CurveTrace& q) {
        double worst = 0.0;
        for (const auto& u : p.pts) {
            double best = 1e300;
            for (const auto& v : q.pts)
                best = std::min(best, std::hypot(u.x - v.x, u.lambda - v.lambda));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

namespace {

CurveTrace stitch(const CurveTrace& fwd, const CurveTrace& bwd) {
    if (fwd.closed) return fwd;
    CurveTrace out;
    out.branch = fwd.branch;
    out.closed = bwd.closed;
    out.pts.reserve(fwd.pts.size() + bwd.pts.size());
    for (auto it = bwd.pts.rbegin(); it != bwd.pts.rend(); ++it) out.pts.push_back(*it);
    for (size_t i = 1; i < fwd.pts.size(); ++i) out.pts.push_back(fwd.pts[i]);
    double s = 0.0;
    for (size_t i = 0; i < out.pts.size(); ++i) {
        if (i > 0)
            s += std::hypot(out.pts[i].x - out.pts[i - 1].x,
                            out.pts[i].lambda - out.pts[i - 1].lambda);
        out.pts[i].s = s;
    }
    out.turning_indices = detect_turning_indices(out.pts, out.closed);
    out.singular_events = fwd.singular_events;
    for (const auto& e : bwd.singular_events) out.singular_events.push_back(e);
    return out;
}

// find at least `need` real eigenvalues scanning upward from lam_lo
std::vector<double> scan_up(const Problem& pb, double lam_lo, int need,
                            const RealEigOptions& reo) {
    std::vector<double> found;
    double lo = lam_lo, width = 30.0;
    for (int chunk = 0; chunk < 12 && static_cast<int>(found.size()) < need; ++chunk) {
        auto part = real_eigenvalues(pb, lo, lo + width, 600, reo);
        for (double v : part)
            if (found.empty() || v > found.back() + 1e-7) found.push_back(v);
        lo += width;
    }
    if (static_cast<int>(found.size()) < need)
        throw NonConvergence("seed scan found too few real eigenvalues");
    return found;
}

} // namespace

CurveTrace trace_gamma_cubic(int n, double a_lo, double a_hi, double step,
                             const GammaOptions& opts) {
    if (n < 0) throw InvalidParams("trace_gamma_cubic: n >= 0");
    double a_seed = opts.a_seed;
    if (a_seed < a_lo || a_seed > a_hi) a_seed = 0.5 * (a_lo + a_hi);

    RealEigOptions reo;
    reo.shot = opts.shot;
    Problem pb_seed = make_cubic_pt(a_seed);
    auto eigs = scan_up(pb_seed, -6.0 - 2.0 * std::abs(a_seed), 2 * n + 1, reo);
    // the two real branches joined through each fold carry consecutive
    // eigenvalue pairs (2n, 2n+1); seed on the lower sheet
    double lam_seed = eigs[static_cast<size_t>(2 * n)];

    ShotOptions shot = opts.shot;
    HFun H = [shot](double a, double lam) {
        Problem pb = make_cubic_pt(a);
        return determinant_real(pb, pb.mu_of_lambda(lam).real(), shot);
    };

    TraceBounds bounds{a_lo, a_hi, -40.0 - 3.0 * std::abs(a_hi), 80.0 + 6.0 * std::abs(a_hi)};
    TraceOptions to;
    to.initial_direction = +1;
    CurveTrace fwd = trace(H, a_seed, lam_seed, step, bounds, opts.max_points, to);
    to.initial_direction = -1;
    CurveTrace bwd = trace(H, a_seed, lam_seed, step, bounds, opts.max_points, to);
    CurveTrace tr = stitch(fwd, bwd);
    tr.branch = "Gamma_" + std::to_string(n);

    if (opts.verify_label) {
        ZeroCount zc = count_zeros(make_cubic_pt(a_seed), Cplx(lam_seed),
                                   {-4.5, 4.5, -3.5, 3.5}, opts.shot);
        if (zc.n_nonreal != 2 * n) tr.branch += "?";
    }
    return tr;
}

std::vector<CurveTrace> section_sn(double a0, int n_max, double c_lo, double c_hi,
                                   double step, const SectionOptions& opts) {
    if (n_max < 0) throw InvalidParams("section_sn: n_max >= 0");
    RealEigOptions reo;
    reo.shot = opts.shot;
    reo.refine_levels = 3;
    Problem pb0 = make_quartic_i(a0, 0.0);
    double lam_lo = (a0 < 0.0 ? -0.25 * a0 * a0 : 0.0) - 3.0;
    auto eigs = scan_up(pb0, lam_lo, 2 * n_max + 2, reo);

    ShotOptions shot = opts.shot;
    std::vector<CurveTrace> out;
    for (int n = 0; n <= n_max; ++n) {
        HFun H = [shot, a0](double c, double lam) {
            Problem pb = make_quartic_i(a0, c);
            return determinant_real(pb, pb.mu_of_lambda(lam).real(), shot);
        };
        double lam_seed = eigs[static_cast<size_t>(2 * n)];
        TraceBounds bounds{c_lo, c_hi, lam_lo - 10.0, eigs.back() + 120.0};
        TraceOptions to;
        CurveTrace fwd = trace(H, 0.0, lam_seed, step, bounds, opts.max_points, to);
        CurveTrace tr = fwd;
        if (!fwd.closed) {
            to.initial_direction = -1;
            CurveTrace bwd = trace(H, 0.0, lam_seed, step, bounds, opts.max_points, to);
            tr = stitch(fwd, bwd);
        }
        tr.branch = "S_" + std::to_string(n);
        if (opts.verify_label) {
            ZeroCount zc = count_zeros(pb0, Cplx(lam_seed), {-5.0, 5.0, -4.0, 4.0}, opts.shot);
            if (zc.n_nonreal != 2 * n) tr.branch += "?";
        }
        out.push_back(std::move(tr));
    }
    return out;
}

CurveTrace trace_gamma_nm(int n, int m, double b_lo, double b_hi, double step,
                          const GammaNmOptions& opts) {
    if (n < 0 || m < 0 || 2 * m > n) throw InvalidParams("trace_gamma_nm: need 0 <= m <= n/2");

    double b_seed = opts.b_seed != 0.0 ? opts.b_seed : b_hi;
    auto real_root_count = [](const QESPoint& pt) {
        int c = 0;
        for (const auto& r : pt.roots)
            if (std::abs(r.imag()) < 1e-6 * (1.0 + std::abs(r))) ++c;
        return c;
    };

    double lam_seed = 0.0;
    bool found = false;
    for (int attempt = 0; attempt < 4 && !found; ++attempt) {
        auto pts = qes_points(n, Cplx(b_seed));
        for (const auto& pt : pts) {
            if (pt.degenerate) continue;
            if (std::abs(pt.lambda.imag()) > 1e-7 * (1.0 + std::abs(pt.lambda))) continue;
            if (real_root_count(pt) == n - 2 * m) {
                lam_seed = pt.lambda.real();
                found = true;
                break;
            }
        }
        if (!found) b_seed *= 1.5;
    }
    if (!found)
        throw BranchTrackingLost("trace_gamma_nm: no real seed with the requested root signature");

    HFun H = [n](double b, double lam) { return spectral_det(n, b, lam); };
    double lam_span = b_seed * b_seed + 2.0 * (n + 1.0) * std::sqrt(std::abs(b_seed)) + 25.0;
    TraceBounds bounds{b_lo, b_hi, -lam_span, lam_span};
    TraceOptions to;
    CurveTrace fwd = trace(H, b_seed, lam_seed, step, bounds, opts.max_points, to);
    to.initial_direction = -1;
    CurveTrace bwd = trace(H, b_seed, lam_seed, step, bounds, opts.max_points, to);
    CurveTrace tr = stitch(fwd, bwd);
    tr.branch = "Gamma_" + std::to_string(n) + "_" + std::to_string(m);
    return tr;
}

} // namespace specloc
