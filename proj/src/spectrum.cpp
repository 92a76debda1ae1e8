#include "specloc/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "specloc/qes.hpp"

namespace specloc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double bisect_lambda(const Problem& pb, double lo, double hi, double flo,
                     const RealEigOptions& opts) {
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hi - lo < opts.eig_tol * (1.0 + std::abs(mid))) return mid;
        double fm = determinant_real(pb, pb.mu_of_lambda(mid).real(), opts.shot);
        if (fm == 0.0) return mid;
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

void scan_interval(const Problem& pb, double lo, double hi, int grid_n, int level,
                   const RealEigOptions& opts, std::vector<double>& out) {
    if (grid_n < 2) return;
    std::vector<double> lam(static_cast<size_t>(grid_n) + 1),
        val(static_cast<size_t>(grid_n) + 1);
    for (int i = 0; i <= grid_n; ++i) {
        lam[static_cast<size_t>(i)] = lo + (hi - lo) * i / grid_n;
        val[static_cast<size_t>(i)] =
            determinant_real(pb, pb.mu_of_lambda(lam[static_cast<size_t>(i)]).real(), opts.shot);
    }
    for (int i = 0; i < grid_n; ++i) {
        double f0 = val[static_cast<size_t>(i)], f1 = val[static_cast<size_t>(i + 1)];
        if (f0 == 0.0) {
            out.push_back(lam[static_cast<size_t>(i)]);
            continue;
        }
        if (std::signbit(f0) != std::signbit(f1)) {
            out.push_back(bisect_lambda(pb, lam[static_cast<size_t>(i)],
                                        lam[static_cast<size_t>(i + 1)], f0, opts));
        }
    }
    if (level > 0) {
        // refine around interior local minima of |F| without a sign change:
        // a close pair of zeros hides there
        for (int i = 1; i < grid_n; ++i) {
            double a0 = std::abs(val[static_cast<size_t>(i - 1)]),
                   a1 = std::abs(val[static_cast<size_t>(i)]),
                   a2 = std::abs(val[static_cast<size_t>(i + 1)]);
            bool same_sign = std::signbit(val[static_cast<size_t>(i - 1)]) ==
                                 std::signbit(val[static_cast<size_t>(i)]) &&
                             std::signbit(val[static_cast<size_t>(i)]) ==
                                 std::signbit(val[static_cast<size_t>(i + 1)]);
            if (same_sign && a1 < a0 && a1 < a2 && a1 < 0.2 * std::max(a0, a2)) {
                scan_interval(pb, lam[static_cast<size_t>(i - 1)],
                              lam[static_cast<size_t>(i + 1)], 16, level - 1, opts, out);
            }
        }
    }
}

} // namespace

std::vector<double> real_eigenvalues(const Problem& pb, double lambda_lo,
                                     double lambda_hi, int grid_n,
                                     const RealEigOptions& opts) {
    if (grid_n < 16) throw InvalidParams("real_eigenvalues: grid_n >= 16 required");
    if (!(lambda_lo < lambda_hi)) throw InvalidParams("real_eigenvalues: empty range");
    std::vector<double> out;
    scan_interval(pb, lambda_lo, lambda_hi, grid_n, opts.refine_levels, opts, out);
    std::sort(out.begin(), out.end());
    // collapse duplicates from overlapping refinements
    std::vector<double> uniq;
    for (double x : out)
        if (uniq.empty() || std::abs(x - uniq.back()) > 10.0 * opts.eig_tol * (1.0 + std::abs(x)))
            uniq.push_back(x);
    return uniq;
}

namespace {

struct ContourEval {
    const Problem& pb;
    const ShotOptions& shot;
    Cplx operator()(Cplx lambda) const {
        return determinant(pb, pb.mu_of_lambda(lambda), shot);
    }
};

// Winding number of F around the rectangle, accumulated from principal-branch
// phase increments with adaptive bisection. The determinant is normalized by
// positive reals shot-by-shot, which leaves phases intact but makes a
// finite-difference F'/F quadrature non-analytic, so the increments are the
// reliable route to the argument principle here.
struct PhaseMarch {
    const ContourEval& ev;
    double winding = 0.0;

    void edge(Cplx a, Cplx b, Cplx ga, Cplx gb, int depth, bool* ok) {
        Cplx ratio = gb / ga;
        double dphi = std::arg(ratio);
        double dmag = std::log(std::abs(ratio));
        if (std::hypot(dphi, dmag) > 0.6) {
            if (depth >= 26) {
                if (ok) {
                    *ok = false;
                    return;
                }
                throw ContourThroughZero("winding: unresolvable phase step (zero on the contour?)");
            }
            Cplx mid = 0.5 * (a + b);
            Cplx gm = ev(mid);
            if (std::abs(gm) == 0.0) {
                if (ok) {
                    *ok = false;
                    return;
                }
                throw ContourThroughZero("winding: determinant vanished on the contour");
            }
            edge(a, mid, ga, gm, depth + 1, ok);
            if (ok && !*ok) return;
            edge(mid, b, gm, gb, depth + 1, ok);
            return;
        }
        winding += dphi;
    }
};

int winding_rect(const ContourEval& ev, const Rect& box, const BoxOptions& opts,
                 bool* ok = nullptr) {
    std::array<Cplx, 4> corner = {Cplx(box.re_lo, box.im_lo), Cplx(box.re_hi, box.im_lo),
                                  Cplx(box.re_hi, box.im_hi), Cplx(box.re_lo, box.im_hi)};
    if (ok) *ok = true;
    PhaseMarch pm{ev};
    for (int e = 0; e < 4; ++e) {
        Cplx a = corner[static_cast<size_t>(e)], b = corner[static_cast<size_t>((e + 1) % 4)];
        Cplx dz = (b - a) / static_cast<double>(opts.min_panels);
        Cplx gprev = ev(a);
        for (int j = 0; j < opts.min_panels; ++j) {
            Cplx next = (j + 1 == opts.min_panels) ? b : a + dz * static_cast<double>(j + 1);
            Cplx gnext = ev(next);
            if (std::abs(gprev) == 0.0 || std::abs(gnext) == 0.0) {
                if (ok) {
                    *ok = false;
                    return 0;
                }
                throw ContourThroughZero("winding: determinant vanished on the contour");
            }
            pm.edge(a + dz * static_cast<double>(j), next, gprev, gnext, 0, ok);
            if (ok && !*ok) return 0;
            gprev = gnext;
        }
    }
    double turns = pm.winding / kTwoPi;
    int n = static_cast<int>(std::lround(turns));
    if (std::abs(turns - n) > 0.1) {
        if (ok) {
            *ok = false;
            return 0;
        }
        throw ContourThroughZero("winding: accumulated phase is not an integer turn count");
    }
    return n;
}

Rect nudged(const Rect& b, int attempt) {
    double fr = 1.0 + 2e-3 * attempt;
    double cx = 0.5 * (b.re_lo + b.re_hi), cy = 0.5 * (b.im_lo + b.im_hi);
    double hx = 0.5 * (b.re_hi - b.re_lo) * fr, hy = 0.5 * (b.im_hi - b.im_lo) * fr;
    return {cx - hx, cx + hx, cy - hy, cy + hy};
}

int counted_box(const ContourEval& ev, Rect& box, const BoxOptions& opts) {
    for (int attempt = 0; attempt <= opts.max_nudges; ++attempt) {
        Rect trial = attempt == 0 ? box : nudged(box, attempt);
        bool ok = false;
        int n = winding_rect(ev, trial, opts, &ok);
        if (ok) {
            box = trial;
            return n;
        }
    }
    throw ContourThroughZero("count_eigenvalues_box: boundary persists near a zero");
}

Cplx newton_polish(const ContourEval& ev, Cplx lambda0, int iters = 60) {
    Cplx lambda = lambda0;
    for (int it = 0; it < iters; ++it) {
        double h = 1e-6 * (1.0 + std::abs(lambda));
        Cplx f = ev(lambda);
        Cplx fp = (ev(lambda + h) - ev(lambda - h)) / (2.0 * h);
        if (std::abs(fp) == 0.0) break;
        Cplx step = f / fp;
        lambda -= step;
        if (std::abs(step) < 1e-10 * (1.0 + std::abs(lambda))) return lambda;
    }
    return lambda;
}

void collect_box(const ContourEval& ev, Rect box, int depth, int max_subdiv,
                 const BoxOptions& opts, std::vector<Cplx>& out) {
    Rect b = box;
    int n = counted_box(ev, b, opts);
    if (n == 0) return;
    if (n == 1) {
        Cplx z = newton_polish(ev, Cplx(0.5 * (b.re_lo + b.re_hi), 0.5 * (b.im_lo + b.im_hi)));
        out.push_back(z);
        return;
    }
    if (depth >= max_subdiv)
        throw SubdivisionLimit("complex_eigenvalues_box: subdivision limit with " +
                               std::to_string(n) + " zeros in a cell");
    // split the longer side; slightly off-center so conjugate pairs and the
    // real axis do not fall on the cut
    double w = b.re_hi - b.re_lo, h = b.im_hi - b.im_lo;
    if (w >= h) {
        double cut = b.re_lo + 0.5003 * w;
        collect_box(ev, {b.re_lo, cut, b.im_lo, b.im_hi}, depth + 1, max_subdiv, opts, out);
        collect_box(ev, {cut, b.re_hi, b.im_lo, b.im_hi}, depth + 1, max_subdiv, opts, out);
    } else {
        double cut = b.im_lo + 0.5003 * h;
        collect_box(ev, {b.re_lo, b.re_hi, b.im_lo, cut}, depth + 1, max_subdiv, opts, out);
        collect_box(ev, {b.re_lo, b.re_hi, cut, b.im_hi}, depth + 1, max_subdiv, opts, out);
    }
}

} // namespace

int count_eigenvalues_box(const Problem& pb, Rect box, const BoxOptions& opts) {
    ContourEval ev{pb, opts.shot};
    Rect b = box;
    return counted_box(ev, b, opts);
}

std::vector<Cplx> complex_eigenvalues_box(const Problem& pb, Rect box, int max_subdiv,
                                          const BoxOptions& opts) {
    ContourEval ev{pb, opts.shot};
    std::vector<Cplx> out;
    collect_box(ev, box, 0, max_subdiv, opts, out);
    std::sort(out.begin(), out.end(), [](Cplx a, Cplx b2) {
        if (a.real() != b2.real()) return a.real() < b2.real();
        return a.imag() < b2.imag();
    });
    return out;
}

namespace {

// march y along a straight segment, accumulating the winding of arg(y).
// |d log y / dz| = |dy/y| bounds the true log increment of the analytic
// solution, so refining until len * max|dy/y| is small rules out hidden
// 2 pi wraps between samples.
void march_winding(const Problem& pb, Cplx mu, Cplx z0, const detail::OdeState& s0,
                   Cplx z1, detail::OdeState& s1_out, double& winding, int depth,
                   double rtol) {
    if (depth > 36)
        throw BoundaryZero("count_zeros: refinement exhausted near the contour (zero on boundary?)");
    detail::OdeState s1 = s0;
    detail::integrate_segment(pb.V, mu, z0, z1, s1, rtol, true);
    if (std::abs(s1.y) == 0.0 || std::abs(s0.y) == 0.0)
        throw BoundaryZero("count_zeros: eigenfunction vanished on the contour");
    const double len = std::abs(z1 - z0);
    double slope = std::max(std::abs(s0.dy / s0.y), std::abs(s1.dy / s1.y));
    Cplx ratio = s1.y / s0.y;
    double dphi = std::arg(ratio);
    double dmag = std::log(std::abs(ratio)) + (s1.log_scale - s0.log_scale);
    if (len * slope > 0.7 || std::abs(dphi) > 0.8 || std::abs(dmag) > 1.5) {
        Cplx mid = 0.5 * (z0 + z1);
        detail::OdeState sm{};
        march_winding(pb, mu, z0, s0, mid, sm, winding, depth + 1, rtol);
        march_winding(pb, mu, mid, sm, z1, s1_out, winding, depth + 1, rtol);
        return;
    }
    winding += dphi;
    s1_out = s1;
}

} // namespace

ZeroCount count_zeros(const Problem& pb, Cplx lambda, Rect rect,
                      const ShotOptions& opts) {
    if (std::abs(rect.im_lo + rect.im_hi) > 1e-9 * (rect.im_hi - rect.im_lo))
        throw InvalidParams("count_zeros: rectangle must be symmetric about the real axis");
    const Cplx mu = pb.mu_of_lambda(lambda);
    ShotResult base = integrate_ray(pb, mu, pb.theta_a, opts);

    // total zeros: winding of y around the rectangle
    std::array<Cplx, 4> corner = {Cplx(rect.re_lo, rect.im_lo), Cplx(rect.re_hi, rect.im_lo),
                                  Cplx(rect.re_hi, rect.im_hi), Cplx(rect.re_lo, rect.im_hi)};
    detail::OdeState st{base.y0, base.dy0};
    detail::integrate_segment(pb.V, mu, Cplx(0.0), corner[0], st, opts.rtol, true);
    double winding = 0.0;
    detail::OdeState cur = st;
    Cplx zcur = corner[0];
    for (int e = 0; e < 4; ++e) {
        Cplx znext = corner[static_cast<size_t>((e + 1) % 4)];
        detail::OdeState nxt{};
        march_winding(pb, mu, zcur, cur, znext, nxt, winding, 0, opts.rtol);
        cur = nxt;
        zcur = znext;
    }
    double turns = winding / kTwoPi;
    int total = static_cast<int>(std::lround(turns));
    if (std::abs(turns - total) > 0.1)
        throw BoundaryZero("count_zeros: winding did not close to an integer");

    // real zeros: sign changes of the phase-normalized restriction
    const int m = 256;
    std::vector<Cplx> vals(static_cast<size_t>(m));
    detail::OdeState rs{base.y0, base.dy0};
    double x_prev = 0.0;
    // march left-to-right starting from the origin state
    detail::integrate_segment(pb.V, mu, Cplx(0.0),
                              Cplx(rect.re_lo + 0.5 * (rect.re_hi - rect.re_lo) / m, 0.0), rs,
                              opts.rtol, false);
    x_prev = rect.re_lo + 0.5 * (rect.re_hi - rect.re_lo) / m;
    for (int j = 0; j < m; ++j) {
        double x = rect.re_lo + (j + 0.5) * (rect.re_hi - rect.re_lo) / m;
        if (j > 0) {
            detail::integrate_segment(pb.V, mu, Cplx(x_prev, 0.0), Cplx(x, 0.0), rs,
                                      opts.rtol, false);
            x_prev = x;
        }
        vals[static_cast<size_t>(j)] = rs.y;
    }

    Cplx ssum = 0.0;
    double vmax = 0.0;
    for (const auto& v : vals) {
        ssum += v * v;
        vmax = std::max(vmax, std::abs(v));
    }
    double phi = -0.5 * std::arg(ssum);
    double imax = 0.0;
    for (const auto& v : vals)
        imax = std::max(imax, std::abs((std::polar(1.0, phi) * v).imag()));
    if (imax > 1e-6 * vmax)
        throw NotSymmetric("count_zeros: eigenfunction does not phase-normalize to real on the axis");

    int n_real = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (const auto& v : vals) {
        double g = (std::polar(1.0, phi) * v).real();
        if (std::abs(g) < 1e-9 * vmax) continue;
        if (have_prev && std::signbit(g) != std::signbit(prev)) ++n_real;
        prev = g;
        have_prev = true;
    }

    ZeroCount zc;
    zc.n_real = n_real;
    zc.n_nonreal = total - n_real;
    if (zc.n_nonreal < 0)
        throw NonConvergence("count_zeros: real sign changes exceed the winding count");
    return zc;
}

RealityReport reality_check(double b, double J, int N, const ShotOptions& opts) {
    if (N < 1 || N > 20) throw InvalidParams("reality_check: N in [1, 20]");
    Problem pb = make_quartic_ii(b, J);

    const bool integer_J = std::abs(J - std::round(J)) < 1e-12 && std::round(J) >= 1.0;
    std::vector<Cplx> qes_lams;
    if (integer_J) {
        SpectralPoly sp = spectral_poly(static_cast<int>(std::round(J)) - 1, Cplx(b));
        qes_lams = roots(sp.Q);
    }
    auto is_qes = [&](Cplx lam) {
        for (const auto& q : qes_lams)
            if (std::abs(lam - q) < 1e-5 * (1.0 + std::abs(q))) return true;
        return false;
    };

    RealEigOptions reo;
    reo.shot = opts;
    double lam_lo = -b * b - 2.0 * std::abs(J) - 12.0;
    double lam_hi = lam_lo + 40.0;
    std::vector<double> reals;
    for (int attempt = 0; attempt < 6; ++attempt) {
        int grid = static_cast<int>((lam_hi - lam_lo) / 0.2) + 16;
        reals = real_eigenvalues(pb, lam_lo, lam_hi, grid, reo);
        int n_class = 0;
        for (double lam : reals)
            if (!(integer_J && is_qes(lam))) ++n_class;
        if (n_class >= N + 1) break;
        lam_hi += 25.0;
    }

    // strip certification: the argument-principle count over the strip must
    // match the number of real eigenvalues found inside it
    int idx_class = 0;
    double cut = reals.back() + 1.0;
    int n_inside = static_cast<int>(reals.size());
    for (size_t i = 0, cls = 0; i < reals.size(); ++i) {
        if (!(integer_J && is_qes(reals[i]))) ++cls;
        if (static_cast<int>(cls) == N + 1) {
            idx_class = static_cast<int>(i);
            cut = 0.5 * (reals[i] + reals[i - 1]);
            n_inside = static_cast<int>(i);
            break;
        }
    }
    (void)idx_class;

    Rect strip{lam_lo, cut, -5.0, 5.0};
    BoxOptions bo;
    bo.shot = opts;
    int total = count_eigenvalues_box(pb, strip, bo);

    RealityReport rep;
    rep.certified = (total == n_inside);
    std::vector<Cplx> found;
    if (rep.certified) {
        for (int i = 0; i < n_inside; ++i) found.emplace_back(reals[static_cast<size_t>(i)], 0.0);
    } else {
        found = complex_eigenvalues_box(pb, strip, 48, bo);
    }
    std::sort(found.begin(), found.end(),
              [](Cplx a, Cplx c) { return a.real() < c.real(); });
    double max_im = 0.0;
    int taken = 0;
    for (const auto& lam : found) {
        bool q = integer_J && is_qes(lam);
        if (q) {
            rep.rows.push_back({lam, true});
            continue;
        }
        if (taken < N) {
            rep.rows.push_back({lam, false});
            max_im = std::max(max_im, std::abs(lam.imag()));
            ++taken;
        }
    }
    rep.max_im = max_im;
    rep.n_checked = taken;
    return rep;
}

} // namespace specloc
