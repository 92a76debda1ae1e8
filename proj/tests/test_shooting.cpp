#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "specloc/shooting.hpp"

using namespace specloc;

namespace {
constexpr double pi = std::numbers::pi;

Problem harmonic() { return make_custom(CPoly{0.0, 0.0, 1.0}, 0.0, pi); }

// locate a zero of F_real by bisection on [lo, hi]
double bisect_real(const Problem& pb, double lo, double hi, const ShotOptions& opts = {}) {
    double flo = determinant_real(pb, lo, opts);
    for (int i = 0; i < 90; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = determinant_real(pb, mid, opts);
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}
} // namespace

TEST_CASE("wkb seed branches") {
    auto [y, dy] = wkb_seed(CPoly{0.0, 0.0, 1.0}, 0.0, 0.0, 10.0);
    CHECK(std::abs(y - Cplx(1.0 / std::sqrt(10.0))) < 1e-14);
    CHECK(std::abs(dy + 10.0 * y) < 1e-13);

    // cubic along the positive imaginary ray: Re(e^{i theta} s) > 0
    auto [y3, dy3] = wkb_seed(CPoly{0.0, 0.0, 0.0, 1.0}, 0.0, pi / 2, 10.0);
    Cplx s3 = -dy3 / y3;
    CHECK((Cplx(0.0, 1.0) * s3).real() > 0.0);

    // inverted quartic along the imaginary ray: s = -i t^2, real decay rate
    auto [y4, dy4] = wkb_seed(CPoly{0.0, 0.0, 0.0, 0.0, -1.0}, 0.0, pi / 2, 10.0);
    Cplx s4 = -dy4 / y4;
    CHECK(std::abs(s4 - Cplx(0.0, -100.0)) < 1e-9);

    // the seeded solution decays outward, i.e. grows when integrated inward
    auto [ys, dys] = wkb_seed(CPoly{0.0, 0.0, 0.0, 1.0}, 0.0, pi / 2, 10.5);
    detail::OdeState st{ys, dys};
    Cplx e = std::polar(1.0, pi / 2);
    detail::integrate_segment(CPoly{0.0, 0.0, 0.0, 1.0}, 0.0, 10.5 * e, 10.0 * e, st, 1e-10, false);
    CHECK(std::abs(st.y) > std::exp(10.0) * std::abs(ys));
}

TEST_CASE("harmonic ray ratios") {
    Problem pb = harmonic();
    ShotResult a = integrate_ray(pb, 1.0, 0.0);
    CHECK(std::abs(a.dy0 / a.y0) < 1e-6); // even ground state
    ShotResult b = integrate_ray(pb, 1.0, pi);
    CHECK(std::abs(b.dy0 / b.y0) < 1e-6);
    CHECK(std::hypot(std::abs(a.y0), std::abs(a.dy0)) == doctest::Approx(1.0));
}

TEST_CASE("elementary eigenfunction ratios of the QES quartic") {
    // (z - 1) e^{z^3/3 - z} has eigenvalue -3; (z + 1) e^{z^3/3 - z} has 1
    Problem pb = make_quartic_ii(1.0, 2.0);
    ShotResult r1 = integrate_ray(pb, -3.0, pi / 3);
    CHECK(std::abs(r1.dy0 / r1.y0 - Cplx(-2.0)) < 1e-5);
    ShotResult r2 = integrate_ray(pb, 1.0, pi / 3);
    CHECK(std::abs(r2.dy0 / r2.y0) < 1e-5);
}

TEST_CASE("determinant zeros and gaps") {
    Problem pb = harmonic();
    CHECK(std::abs(determinant(pb, 1.0)) < 1e-6);
    CHECK(std::abs(determinant(pb, 2.0)) > 1e-2);
    CHECK(std::abs(determinant(pb, 3.0)) < 1e-6);

    Problem q = make_quartic_ii(1.0, 2.0);
    CHECK(std::abs(determinant(q, 1.0)) < 1e-6);
    CHECK(std::abs(determinant(q, -3.0)) < 1e-6);
    CHECK(std::abs(determinant(q, 0.0)) > 1e-2);
}

TEST_CASE("real determinant") {
    Problem pb = harmonic();
    double f0 = determinant_real(pb, 0.5);
    double f1 = determinant_real(pb, 1.5);
    CHECK(std::signbit(f0) != std::signbit(f1));

    // smallest cubic eigenvalue at a = 0
    Problem cu = make_cubic_pt(0.0);
    double lam = bisect_real(cu, -1.1562670172 - 0.15, -1.1562670172 + 0.15);
    // mu = -lambda: the reference eigenvalue is lambda ~ 1.15626707
    CHECK(std::abs(-lam - 1.15626707198) < 1e-6);
    CHECK(std::abs(determinant(cu, lam)) < 1e-6);

    // rtol refinement stability
    ShotOptions tight;
    tight.rtol = 1e-12;
    double lam2 = bisect_real(cu, lam - 1e-3, lam + 1e-3, tight);
    CHECK(std::abs(lam2 - lam) < 1e-7);

    Problem q = make_quartic_ii(1.0, 2.0);
    CHECK(std::abs(determinant_real(q, 1.0)) < 1e-6);
    CHECK(std::abs(determinant_real(q, -3.0)) < 1e-6);

    Problem asym = make_custom(CPoly{0.0, Cplx(0.0, 1.0), 1.0}, 0.0, pi);
    CHECK_THROWS_AS(determinant_real(asym, 1.0), NotSymmetric);
}

TEST_CASE("conjugation consistency") {
    // two independent shots reproduce 2i * the one-shot real determinant
    Problem q = make_quartic_ii(1.0, 2.0);
    for (double mu : {-1.0, 0.5, 2.0}) {
        Cplx f = determinant(q, mu);
        double fr = determinant_real(q, mu);
        CHECK(std::abs(f - Cplx(0.0, 2.0 * fr)) < 1e-6 * (std::abs(f) + std::abs(fr)));
    }
}

TEST_CASE("R stability") {
    Problem q = make_quartic_ii(1.0, 2.0);
    ShotOptions base;
    double r0 = auto_radius(q.V, 1.0, pi / 3);
    ShotOptions wide;
    wide.R = 1.5 * r0;
    double lo = 0.9, hi = 1.1;
    auto zero_with = [&](const ShotOptions& o) {
        double a = lo, b = hi, fa = determinant_real(q, a, o);
        for (int i = 0; i < 80; ++i) {
            double m2 = 0.5 * (a + b);
            double fm = determinant_real(q, m2, o);
            if (std::signbit(fm) == std::signbit(fa)) {
                a = m2;
                fa = fm;
            } else {
                b = m2;
            }
        }
        return 0.5 * (a + b);
    };
    double z1 = zero_with(base), z2 = zero_with(wide);
    CHECK(std::abs(z1 - z2) < 1e-7 * (1.0 + std::abs(z1)));
}

TEST_CASE("eigenfunction values") {
    Problem pb = harmonic();
    std::vector<Cplx> pts = {Cplx(-2.0), Cplx(-1.0), Cplx(0.0), Cplx(1.0), Cplx(2.0)};
    auto vals = eigenfunction_values(pb, 1.0, pts);
    REQUIRE(vals.size() == pts.size());
    Cplx y0 = vals[2].first;
    for (size_t i = 0; i < pts.size(); ++i) {
        Cplx expect = std::exp(-0.5 * pts[i] * pts[i]);
        CHECK(std::abs(vals[i].first / y0 - expect) < 1e-6);
    }

    // odd state vanishes at the origin
    auto odd = eigenfunction_values(pb, 3.0, {Cplx(0.0), Cplx(1.0)});
    CHECK(std::abs(odd[0].first) < 1e-6 * std::abs(odd[1].first));

    // elementary quartic eigenfunction vanishes at the root of its factor
    Problem q = make_quartic_ii(1.0, 2.0);
    auto qv = eigenfunction_values(q, 1.0, {Cplx(-1.0), Cplx(0.0)});
    CHECK(std::abs(qv[0].first) < 1e-5 * std::abs(qv[1].first));
}

TEST_CASE("schwarzian agreement with the potential") {
    Problem pb = harmonic();
    double coarse = schwarzian_residual(pb, 1.0, 0.25, 33);
    double fine = schwarzian_residual(pb, 1.0, 0.25, 65);
    CHECK(coarse < 0.05);
    double ratio = coarse / fine;
    CHECK(ratio > 2.0);
    CHECK(ratio < 8.0);

    Problem q = make_quartic_ii(1.0, 2.0);
    double qc = schwarzian_residual(q, -3.0, 0.25, 33);
    double qf = schwarzian_residual(q, -3.0, 0.25, 65);
    CHECK(qc / qf > 2.0);
    CHECK(qc / qf < 8.0);
}

TEST_CASE("taylor and embedded-pair integrators agree") {
    Problem cu = make_cubic_pt(1.0);
    ShotOptions rk;
    rk.method = OdeMethod::Rk45;
    for (double mu : {-4.0, -1.2, 2.5}) {
        ShotResult a = integrate_ray(cu, mu, cu.theta_a);
        ShotResult b = integrate_ray(cu, mu, cu.theta_a, rk);
        CHECK(std::abs(a.y0 * b.dy0 - a.dy0 * b.y0) < 1e-7);
        CHECK(a.steps < b.steps / 10);
    }
}
