#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "specloc/qes.hpp"

using namespace specloc;

TEST_CASE("qes matrix entries") {
    auto m0 = qes_matrix(0, 2.0);
    REQUIRE(m0.size() == 1);
    CHECK(std::abs(m0[0][0] - Cplx(-4.0)) == 0.0);

    auto m1 = qes_matrix(1, 1.0);
    CHECK(std::abs(m1[0][0] - Cplx(-1.0)) == 0.0);
    CHECK(std::abs(m1[0][1] - Cplx(2.0)) == 0.0);
    CHECK(std::abs(m1[1][0] - Cplx(2.0)) == 0.0);
    CHECK(std::abs(m1[1][1] - Cplx(-1.0)) == 0.0);
}

TEST_CASE("matrix trace equals the root sum of the characteristic polynomial") {
    for (int n : {1, 2, 3, 4}) {
        double b = 1.7;
        SpectralPoly sp = spectral_poly(n, b);
        Cplx sum = 0.0;
        for (const auto& r : roots(sp.Q)) sum += r;
        CHECK(std::abs(sum - Cplx(-(n + 1.0) * b * b)) < 1e-9 * (1.0 + std::abs(sum)));
    }
}

TEST_CASE("closed-form spectral polynomials") {
    for (double b : {-2.0, -1.0, 0.5, 1.0, 3.0}) {
        SpectralPoly q1 = spectral_poly(0, b);
        CHECK(std::abs(q1.Q.coeff(0) - Cplx(b * b)) < 1e-10);
        CHECK(std::abs(q1.Q.coeff(1) - Cplx(1.0)) < 1e-10);

        // (lambda + b^2)^2 - 4b
        SpectralPoly q2 = spectral_poly(1, b);
        CHECK(std::abs(q2.Q.coeff(0) - Cplx(b * b * b * b - 4.0 * b)) < 1e-10 * (1.0 + b * b * b * b));
        CHECK(std::abs(q2.Q.coeff(1) - Cplx(2.0 * b * b)) < 1e-10 * (1.0 + b * b));
        CHECK(std::abs(q2.Q.coeff(2) - Cplx(1.0)) < 1e-10);
    }
    // hand-expanded determinant at n = 2, b = 1: lambda^3 + 3lambda^2 - 13lambda + 1
    SpectralPoly q3 = spectral_poly(2, 1.0);
    CHECK(std::abs(q3.Q.coeff(0) - Cplx(1.0)) < 1e-9);
    CHECK(std::abs(q3.Q.coeff(1) - Cplx(-13.0)) < 1e-9);
    CHECK(std::abs(q3.Q.coeff(2) - Cplx(3.0)) < 1e-9);
    CHECK(std::abs(q3.Q.coeff(3) - Cplx(1.0)) < 1e-9);
}

TEST_CASE("qes points at n = 1") {
    auto pts = qes_points(1, 1.0);
    REQUIRE(pts.size() == 2);
    // sorted by real part: lambda = -3 pairs with p = z - 1, lambda = 1 with z + 1
    CHECK(std::abs(pts[0].lambda - Cplx(-3.0)) < 1e-9);
    CHECK(std::abs(pts[0].p.coeff(0) - Cplx(-1.0)) < 1e-9);
    CHECK(std::abs(pts[0].p.coeff(1) - Cplx(1.0)) < 1e-12);
    REQUIRE(pts[0].roots.size() == 1);
    CHECK(std::abs(pts[0].roots[0] - Cplx(1.0)) < 1e-8);

    CHECK(std::abs(pts[1].lambda - Cplx(1.0)) < 1e-9);
    CHECK(std::abs(pts[1].p.coeff(0) - Cplx(1.0)) < 1e-9);
    CHECK(std::abs(pts[1].roots[0] + Cplx(1.0)) < 1e-8);

    for (const auto& pt : pts) {
        CHECK_FALSE(pt.degenerate);
        CHECK(qes_residual(pt.p, pt.b, pt.lambda) < 1e-9);
    }
}

TEST_CASE("qes point edge cases") {
    auto p0 = qes_points(0, 2.0);
    REQUIRE(p0.size() == 1);
    CHECK(std::abs(p0[0].lambda - Cplx(-4.0)) < 1e-10);
    CHECK(p0[0].p.degree() == 0);

    // double eigenvalue at b = 0: one flagged point, p = z
    auto pd = qes_points(1, 0.0);
    REQUIRE(pd.size() == 1);
    CHECK(pd[0].degenerate);
    CHECK(std::abs(pd[0].lambda) < 1e-6);
    CHECK(std::abs(pd[0].p.coeff(1) - Cplx(1.0)) < 1e-12);
    CHECK(std::abs(pd[0].p.coeff(0)) < 1e-8);
}

TEST_CASE("qes eigenvalues are true eigenvalues of the quartic") {
    Problem pb = make_quartic_ii(1.0, 3.0);
    SpectralPoly sp = spectral_poly(2, 1.0);
    for (const auto& lam : roots(sp.Q)) {
        CHECK(std::abs(lam.imag()) < 1e-9);
        CHECK(std::abs(determinant(pb, lam)) < 1e-6);
    }
}

TEST_CASE("bethe system") {
    CHECK(bethe_solve(0, 1.0, {}).empty());

    // n = 1: the single root satisfies z^2 = b
    auto z1 = bethe_solve(1, 1.0, {Cplx(0.5, 0.1)});
    REQUIRE(z1.size() == 1);
    CHECK(std::abs(z1[0] * z1[0] - Cplx(1.0)) < 1e-9);

    // n = 2: root sets agree with the factors from the linear-algebra path
    auto pts = qes_points(2, 1.0);
    REQUIRE(pts.size() == 3);
    for (const auto& pt : pts) {
        auto z = bethe_solve(2, 1.0, bethe_seeds_from_point(pt));
        REQUIRE(z.size() == pt.roots.size());
        for (size_t i = 0; i < z.size(); ++i)
            CHECK(std::abs(z[i] - pt.roots[i]) < 1e-8);
    }

    // the linear-algebra-independent seeding lands on one of the same sets
    auto zc = bethe_solve(2, 1.0, bethe_seeds_circle(2));
    double best = 1e300;
    for (const auto& pt : pts) {
        double d = 0.0;
        for (size_t i = 0; i < zc.size(); ++i) d = std::max(d, std::abs(zc[i] - pt.roots[i]));
        best = std::min(best, d);
    }
    CHECK(best < 1e-8);

    CHECK_THROWS_AS(bethe_solve(2, 1.0, {Cplx(0.3), Cplx(0.3)}), Collision);
}

TEST_CASE("bethe roots reconstruct the eigenvalue") {
    // lambda from the p-equation residual minimization matches a root of Q
    double b = 1.3;
    SpectralPoly sp = spectral_poly(2, b);
    auto pts = qes_points(2, b);
    for (const auto& pt : pts) {
        auto z = bethe_solve(2, b, bethe_seeds_from_point(pt));
        CPoly p{1.0};
        for (const auto& r : z) p = p * CPoly{-r, 1.0};
        // residual r(z) = -p'' - 2h'p' + (2nz - b^2)p is lambda * p on the locus
        CPoly r = -derivative(derivative(p)) - 2.0 * (CPoly{-b, 0.0, 1.0} * derivative(p)) +
                  CPoly{-b * b, 4.0} * p;
        Cplx num = 0.0;
        double den = 0.0;
        for (int k = 0; k <= p.degree(); ++k) {
            num += std::conj(p.coeff(k)) * r.coeff(k);
            den += std::norm(p.coeff(k));
        }
        Cplx lam_hat = num / den;
        double bestd = 1e300;
        for (const auto& q : roots(sp.Q)) bestd = std::min(bestd, std::abs(lam_hat - q));
        CHECK(bestd < 1e-8);
    }
}

TEST_CASE("divisibility remainders") {
    CHECK(divisibility_check(CPoly{-1.0, 1.0}, 1.0) < 1e-12);
    CHECK(divisibility_check(CPoly{0.0, 1.0}, 1.0) == doctest::Approx(2.0));
    CHECK(divisibility_check(CPoly{1.0}, 1.0) == 0.0);
}

TEST_CASE("equivalent membership tests move together") {
    // on the locus: all three small
    for (const auto& pt : qes_points(2, 1.0)) {
        auto rep = equivalence_check(pt.p, 1.0);
        CHECK(rep.div_norm < 1e-8);
        CHECK(rep.max_residue < 1e-8);
        CHECK(rep.bethe_residual < 1e-8);
    }
    // off the locus: all three bounded away from zero
    auto rep = equivalence_check(CPoly{-1.0, 1.0}, 2.0);
    CHECK(rep.div_norm > 1e-3);
    CHECK(rep.max_residue > 1e-3);
    CHECK(rep.bethe_residual > 1e-3);

    auto rep0 = equivalence_check(CPoly{1.0}, 1.0);
    CHECK(rep0.div_norm == 0.0);
    CHECK(rep0.max_residue == 0.0);
    CHECK(rep0.bethe_residual == 0.0);
}

TEST_CASE("wronskian transform sends J to -J") {
    // n = 0: W = 1, V_new = z^4 - 2bz^2 - 2z
    auto d0 = darboux(0, 1.0);
    CHECK(d0.W_poly.degree() == 0);
    CHECK(d0.deviation < 1e-12);
    CHECK(std::abs(d0.V_new.coeff(1) - Cplx(-2.0)) < 1e-12);
    CHECK(std::abs(d0.V_new.coeff(2) - Cplx(-2.0)) < 1e-12);
    CHECK(std::abs(d0.V_new.coeff(4) - Cplx(1.0)) < 1e-12);

    // n = 1, b = 1: reduced Wronskian is the constant +-2
    auto d1 = darboux(1, 1.0);
    CHECK(d1.deviation < 1e-9);
    CHECK(std::abs(std::abs(d1.W_poly.coeff(0)) - 2.0) < 1e-9);
    CHECK(std::abs(d1.V_new.coeff(1) - Cplx(-4.0)) < 1e-12);
    CHECK(std::abs(d1.V_new.coeff(2) - Cplx(-2.0)) < 1e-12);
    CHECK(std::abs(d1.shift) == 0.0);

    CHECK_THROWS_AS(darboux(1, 0.0), DegenerateEigenvalue);
}

TEST_CASE("identity constant against the spectral-polynomial derivative") {
    auto c0 = c_constant_check(0, 1.0);
    REQUIRE(c0.size() == 1);
    CHECK(std::abs(c0[0].C_identity - Cplx(1.0)) < 1e-10);
    CHECK(c0[0].match);

    auto c1 = c_constant_check(1, 1.0);
    REQUIRE(c1.size() == 2);
    // sorted by lambda: -3 carries C = -1 (factor z - 1), +1 carries C = +1
    CHECK(std::abs(c1[0].C_identity - Cplx(-1.0)) < 1e-9);
    CHECK(std::abs(c1[1].C_identity - Cplx(1.0)) < 1e-9);
    CHECK(c1[0].match);
    CHECK(c1[1].match);

    for (const auto& row : c_constant_check(2, 1.5)) CHECK(row.match);
}

TEST_CASE("level crossing smoke test") {
    CrossingOptions co;
    auto rows = level_crossings(1, -3.0, 1, co);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].b_k < 0.0);
    CHECK(rows[0].b_k > -3.0);
    CHECK(rows[0].lambda_k == doctest::Approx(-rows[0].b_k * rows[0].b_k).epsilon(1e-8));
    CHECK(rows[0].b_asym == doctest::Approx(-std::pow(0.75 * 3.14159265358979323846, 2.0 / 3.0)));
    CHECK(rows[0].ratio == doctest::Approx(rows[0].b_k / rows[0].b_asym));

    CHECK_THROWS_AS(level_crossings(2, -3.0, 1, co), InvalidParams);
}
