#include "specloc/shooting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace specloc {

namespace detail {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = kB1 - 5179.0 / 57600, kE3 = kB3 - 7571.0 / 16695,
                 kE4 = kB4 - 393.0 / 640, kE5 = kB5 + 92097.0 / 339200,
                 kE6 = kB6 - 187.0 / 2100, kE7 = -1.0 / 40;

struct Vec2 {
    Cplx a, b;
    Vec2 operator+(const Vec2& o) const { return {a + o.a, b + o.b}; }
    Vec2 operator*(double s) const { return {a * s, b * s}; }
};
inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

} // namespace

namespace {

void integrate_segment_rk45(const CPoly& V, Cplx mu, Cplx za, Cplx zb, OdeState& st,
                            double rtol, bool allow_renorm) {
    const Cplx dir = zb - za;
    const double len = std::abs(dir);
    if (len == 0.0) return;

    // y tracked against arclength parameter t in [0,1]; u stays d/dz.
    auto rhs = [&](double t, const Vec2& v) -> Vec2 {
        Cplx z = za + t * dir;
        return {dir * v.b, dir * (V(z) - mu) * v.a};
    };

    Vec2 v{st.y, st.dy};
    double t = 0.0;
    double h = 0.1 / (1.0 + len * std::sqrt(std::abs(V(za) - mu)));
    h = std::clamp(h, 1e-10, 1.0);
    Vec2 k1 = rhs(t, v);

    while (t < 1.0) {
        if (t + h > 1.0) h = 1.0 - t;
        Vec2 k2 = rhs(t + h * kA21, v + h * kA21 * k1);
        Vec2 k3 = rhs(t + h * 0.3, v + h * (kA31 * k1 + kA32 * k2));
        Vec2 k4 = rhs(t + h * 0.8, v + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
        Vec2 k5 = rhs(t + h * (8.0 / 9),
                      v + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
        Vec2 k6 = rhs(t + h, v + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 +
                                      kA64 * k4 + kA65 * k5));
        Vec2 vn = v + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
        Vec2 k7 = rhs(t + h, vn);
        Vec2 ev = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

        double sc = std::max(std::abs(v.a) + std::abs(vn.a), std::abs(v.b) + std::abs(vn.b));
        double err = std::max(std::abs(ev.a), std::abs(ev.b)) / (rtol * (sc + 1e-290));

        if (err <= 1.0) {
            t += h;
            v = vn;
            k1 = k7; // FSAL
            ++st.steps;
            st.est_error += err * rtol;
            double mag = std::max(std::abs(v.a), std::abs(v.b));
            if (allow_renorm && mag > 1e120) {
                v.a /= mag;
                v.b /= mag;
                k1.a /= mag;
                k1.b /= mag;
                st.log_scale += std::log(mag);
            }
            if (st.steps > 2000000) throw StepFailure("integrate_segment: step budget exhausted");
        }
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
        if (h < 1e-14) throw StepFailure("integrate_segment: step size underflow");
    }
    st.y = v.a;
    st.dy = v.b;
}

// One-step Taylor-series integration: around each point the solution of
// y'' = (V - mu) y has coefficients given by the exact recurrence
//   (k+1)(k+2) a_{k+2} = e^2 sum_m W_m a_{k-m},
// with W the local expansion of V - mu along the step direction e. The step
// length comes from the tail terms, so each step carries its own error
// estimate at machine-level sharpness.
void integrate_segment_taylor(const CPoly& V, Cplx mu, Cplx za, Cplx zb, OdeState& st,
                              double rtol, bool allow_renorm) {
    const Cplx dir = zb - za;
    const double len = std::abs(dir);
    if (len == 0.0) return;
    const Cplx e = dir / len;

    constexpr int kOrder = 26;
    // derivative chain of V, highest first unused; v_m = V^{(m)}/m!
    std::array<CPoly, 5> dv;
    dv[0] = V;
    int d = std::max(V.degree(), 0);
    d = std::min(d, 4);
    for (int m = 1; m <= d; ++m) dv[static_cast<size_t>(m)] = derivative(dv[static_cast<size_t>(m - 1)]);
    double fact = 1.0;
    std::array<double, 5> invfact{};
    for (int m = 0; m <= d; ++m) {
        if (m > 0) fact *= m;
        invfact[static_cast<size_t>(m)] = 1.0 / fact;
    }

    double t = 0.0;
    std::array<Cplx, kOrder + 1> a{};
    while (t < len) {
        Cplx z = za + t * e;
        std::array<Cplx, 5> w{};
        Cplx epow = 1.0;
        for (int m = 0; m <= d; ++m) {
            w[static_cast<size_t>(m)] = dv[static_cast<size_t>(m)](z) * invfact[static_cast<size_t>(m)] * epow;
            epow *= e;
        }
        w[0] -= mu;

        a[0] = st.y;
        a[1] = e * st.dy;
        const Cplx e2 = e * e;
        for (int k = 0; k + 2 <= kOrder; ++k) {
            Cplx s = 0.0;
            for (int m = 0; m <= std::min(k, d); ++m)
                s += w[static_cast<size_t>(m)] * a[static_cast<size_t>(k - m)];
            a[static_cast<size_t>(k + 2)] = e2 * s / ((k + 1.0) * (k + 2.0));
        }

        const double scale = std::abs(a[0]) + std::abs(a[1]) + 1e-290;
        double h = len - t;
        for (int k = kOrder - 3; k <= kOrder; ++k) {
            double ak = std::abs(a[static_cast<size_t>(k)]);
            if (ak > 0.0)
                h = std::min(h, 0.85 * std::pow(rtol * scale / ak, 1.0 / k));
        }
        if (!(h > 0.0) || h < 1e-14 * (1.0 + len))
            throw StepFailure("integrate_segment: Taylor step underflow");

        // verify the tail at the chosen step; shrink if the estimate misses
        for (int tries = 0;; ++tries) {
            double hp = std::pow(h, kOrder - 2);
            double err = std::abs(a[kOrder - 2]) * hp +
                         std::abs(a[kOrder - 1]) * hp * h +
                         std::abs(a[kOrder]) * hp * h * h;
            if (err <= 4.0 * rtol * scale || h >= len - t) break;
            if (tries > 60) throw StepFailure("integrate_segment: Taylor step control stalled");
            h *= 0.7;
        }
        if (h > len - t) h = len - t;

        Cplx y = 0.0, dy = 0.0;
        for (int k = kOrder; k >= 1; --k) {
            y = y * h + a[static_cast<size_t>(k)];
            dy = dy * h + static_cast<double>(k) * a[static_cast<size_t>(k)];
        }
        y = y * h + a[0];
        st.y = y;
        st.dy = dy / e; // back to d/dz
        t += h;
        ++st.steps;
        st.est_error += rtol;
        double mag = std::max(std::abs(st.y), std::abs(st.dy));
        if (allow_renorm && mag > 1e120) {
            st.y /= mag;
            st.dy /= mag;
            st.log_scale += std::log(mag);
        }
        if (st.steps > 2000000) throw StepFailure("integrate_segment: step budget exhausted");
    }
}

} // namespace

void integrate_segment(const CPoly& V, Cplx mu, Cplx za, Cplx zb, OdeState& st,
                       double rtol, bool allow_renorm, OdeMethod method) {
    if (method == OdeMethod::Rk45)
        integrate_segment_rk45(V, mu, za, zb, st, rtol, allow_renorm);
    else
        integrate_segment_taylor(V, mu, za, zb, st, rtol, allow_renorm);
}

} // namespace detail

std::pair<Cplx, Cplx> wkb_seed(const CPoly& V, Cplx mu, double theta, double R) {
    Cplx e(std::cos(theta), std::sin(theta));
    Cplx w = V(R * e) - mu;
    if (std::abs(w) == 0.0) throw BranchAmbiguous("wkb_seed: V - mu vanishes at the seed");
    Cplx s = std::sqrt(w);
    double re = (e * s).real();
    if (std::abs(re) < 1e-6 * std::abs(s))
        throw BranchAmbiguous("wkb_seed: decay direction undetermined; increase R");
    if (re < 0.0) s = -s;
    // evaluate the -1/2 power of s in the rotated frame e*s, which lies in
    // the right half-plane: keeps the seed analytic in mu (no cut crossing)
    Cplx y = std::polar(1.0, theta / 2.0) * std::pow(e * s, -0.5);
    return {y, -s * y};
}

double auto_radius(const CPoly& V, Cplx mu, double theta) {
    Cplx e(std::cos(theta), std::sin(theta));
    const CPoly dV = derivative(V);
    for (double R = 5.0; R <= 2000.0; R *= 1.25) {
        Cplx w = V(R * e) - mu;
        double aw = std::abs(w);
        if (aw < 1e4) continue;
        if (std::abs(dV(R * e)) / std::pow(aw, 1.5) > 1e-3) continue;
        return R;
    }
    throw StepFailure("auto_radius: no admissible seed radius below cap");
}

ShotResult integrate_ray(const Problem& pb, Cplx mu, double theta,
                         const ShotOptions& opts) {
    if (opts.rtol < 1e-14 || opts.rtol > 1e-6)
        throw InvalidParams("integrate_ray: rtol out of [1e-14, 1e-6]");
    const double R = opts.R ? *opts.R : auto_radius(pb.V, mu, theta);
    auto [y, dy] = wkb_seed(pb.V, mu, theta, R);

    detail::OdeState st{y, dy};
    Cplx e(std::cos(theta), std::sin(theta));
    detail::integrate_segment(pb.V, mu, R * e, Cplx(0.0), st, opts.rtol, true, opts.method);

    ShotResult res;
    double mag = std::hypot(std::abs(st.y), std::abs(st.dy));
    if (mag == 0.0) throw StepFailure("integrate_ray: solution vanished");
    res.y0 = st.y / mag;
    res.dy0 = st.dy / mag;
    res.log_scale = st.log_scale + std::log(mag);
    res.R_used = R;
    res.steps = st.steps;
    res.est_error = st.est_error;
    return res;
}

Cplx determinant(const Problem& pb, Cplx mu, const ShotOptions& opts) {
    ShotResult a = integrate_ray(pb, mu, pb.theta_a, opts);
    ShotResult b = integrate_ray(pb, mu, pb.theta_b, opts);
    return a.y0 * b.dy0 - a.dy0 * b.y0;
}

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double th) {
    th = std::fmod(th, 2.0 * kPi);
    if (th > kPi) th -= 2.0 * kPi;
    if (th <= -kPi) th += 2.0 * kPi;
    return th;
}

bool self_conjugate_ray(double th) {
    double w = wrap_angle(th);
    return std::abs(w) < 1e-12 || std::abs(std::abs(w) - kPi) < 1e-12;
}

} // namespace

double determinant_real(const Problem& pb, double mu, const ShotOptions& opts) {
    if (!pb.conjugate_symmetric)
        throw NotSymmetric("determinant_real: problem is not conjugate-symmetric");

    if (self_conjugate_ray(pb.theta_a) && self_conjugate_ray(pb.theta_b)) {
        // both shots stay real; F itself is real
        return determinant(pb, mu, opts).real();
    }
    if (std::abs(wrap_angle(pb.theta_a + pb.theta_b)) < 1e-12) {
        // reflected shot: y_b(z) = conj(y_a(conj z)); F = 2i Im(y0 conj(dy0))
        ShotResult a = integrate_ray(pb, mu, pb.theta_a, opts);
        return (a.y0 * std::conj(a.dy0)).imag();
    }
    throw NotSymmetric("determinant_real: rays are not exchanged by conjugation");
}

std::vector<std::pair<Cplx, Cplx>> eigenfunction_values(const Problem& pb, Cplx mu,
                                                        const std::vector<Cplx>& points,
                                                        const ShotOptions& opts) {
    ShotResult base = integrate_ray(pb, mu, pb.theta_a, opts);
    std::vector<std::pair<Cplx, Cplx>> out;
    out.reserve(points.size());
    for (const auto& z : points) {
        detail::OdeState st{base.y0, base.dy0};
        if (std::abs(z) > 0.0)
            detail::integrate_segment(pb.V, mu, Cplx(0.0), z, st, opts.rtol, false, opts.method);
        out.emplace_back(st.y, st.dy);
    }
    return out;
}

double schwarzian_residual(const Problem& pb, Cplx mu, double w, int grid_n,
                           const ShotOptions& opts) {
    if (grid_n < 9) throw InvalidParams("schwarzian_residual: grid_n >= 9 required");
    std::vector<Cplx> grid(static_cast<size_t>(grid_n));
    const double h = 2.0 * w / (grid_n - 1);
    for (int i = 0; i < grid_n; ++i) grid[static_cast<size_t>(i)] = -w + h * i;

    auto y0v = eigenfunction_values(pb, mu, grid, opts);

    // Second, independent solution: integrate an IVP from the origin whose
    // Wronskian with the eigenfunction is safely nonzero.
    ShotResult base = integrate_ray(pb, mu, pb.theta_a, opts);
    std::array<std::pair<Cplx, Cplx>, 4> ics = {
        {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, -1.0}}};
    std::vector<Cplx> y1v(static_cast<size_t>(grid_n)), best;
    double best_ratio = 0.0;
    for (const auto& ic : ics) {
        Cplx wr = base.y0 * ic.second - base.dy0 * ic.first;
        if (std::abs(wr) < 0.1) continue;
        double maxv = 0.0, minv = 1e300;
        for (int i = 0; i < grid_n; ++i) {
            detail::OdeState st{ic.first, ic.second};
            if (std::abs(grid[static_cast<size_t>(i)]) > 0.0)
                detail::integrate_segment(pb.V, mu, Cplx(0.0), grid[static_cast<size_t>(i)],
                                          st, opts.rtol, false, opts.method);
            y1v[static_cast<size_t>(i)] = st.y;
            maxv = std::max(maxv, std::abs(st.y));
            minv = std::min(minv, std::abs(st.y));
        }
        if (minv / maxv > best_ratio) {
            best_ratio = minv / maxv;
            best = y1v;
        }
    }
    if (best_ratio < 1e-3) throw StepFailure("schwarzian_residual: no pole-free companion solution");
    y1v = best;

    std::vector<Cplx> f(static_cast<size_t>(grid_n));
    for (int i = 0; i < grid_n; ++i)
        f[static_cast<size_t>(i)] = y0v[static_cast<size_t>(i)].first / y1v[static_cast<size_t>(i)];

    double worst = 0.0;
    for (int i = 2; i < grid_n - 2; ++i) {
        Cplx f1 = (f[i + 1] - f[i - 1]) / (2.0 * h);
        Cplx f2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
        Cplx f3 = (f[i + 2] - 2.0 * f[i + 1] + 2.0 * f[i - 1] - f[i - 2]) / (2.0 * h * h * h);
        Cplx sw = f3 / f1 - 1.5 * (f2 / f1) * (f2 / f1);
        Cplx target = -2.0 * (pb.V(grid[static_cast<size_t>(i)]) - mu);
        worst = std::max(worst, std::abs(sw - target) / (1.0 + std::abs(target)));
    }
    return worst;
}

} // namespace specloc
