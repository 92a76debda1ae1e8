#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "specloc/polyalg.hpp"

using namespace specloc;

namespace {
CPoly random_poly(std::mt19937& rng, int deg) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<Cplx> c(static_cast<size_t>(deg) + 1);
    for (auto& x : c) x = Cplx(u(rng), u(rng));
    if (std::abs(c.back()) < 0.1) c.back() += 1.0;
    return CPoly(std::move(c));
}
} // namespace

TEST_CASE("evaluation") {
    CPoly p{-1.0, 0.0, 1.0}; // z^2 - 1
    CHECK(std::abs(p(2.0) - 3.0) == 0.0);
    CPoly zero;
    CHECK(std::abs(zero(Cplx(7.0, 1.0))) == 0.0);
    CPoly q{-1.0, 0.0, 1.0}; // z^2 - b, b = 1
    CHECK(std::abs(q(Cplx(0.0, 1.0)) - Cplx(-2.0)) == 0.0);
}

TEST_CASE("ring operations") {
    CPoly p{0.0, -1.0, 0.0, 1.0}; // z^3 - z
    CPoly r = reflect(p);
    CHECK(std::abs(r.coeff(1) - Cplx(1.0)) == 0.0);
    CHECK(std::abs(r.coeff(3) - Cplx(-1.0)) == 0.0);

    auto [q, rem] = divrem(CPoly{-1.0, 0.0, 1.0}, CPoly{-1.0, 1.0});
    CHECK(std::abs(q.coeff(0) - Cplx(1.0)) < 1e-15);
    CHECK(std::abs(q.coeff(1) - Cplx(1.0)) < 1e-15);
    CHECK(rem.max_abs_coeff() < 1e-15);

    CPoly cubic{0.0, 0.0, 0.0, Cplx(1.0 / 3.0)};
    CPoly d = derivative(cubic);
    CHECK(d.degree() == 2);
    CHECK(std::abs(d.coeff(2) - Cplx(1.0)) < 1e-16);

    CHECK_THROWS_AS(divrem(p, CPoly{}), InvalidParams);
}

TEST_CASE("divrem reconstruction") {
    std::mt19937 rng(12345);
    for (int trial = 0; trial < 40; ++trial) {
        CPoly p = random_poly(rng, 3 + trial % 9);
        CPoly d = random_poly(rng, 1 + trial % 4);
        auto [q, r] = divrem(p, d);
        CPoly back = q * d + r;
        // backward-error scale: quotient terms can dwarf p itself
        double scale = std::max({1.0, p.max_abs_coeff(), (q * d).max_abs_coeff()});
        CHECK((back - p).max_abs_coeff() < 1e-12 * scale);
    }
}

TEST_CASE("roots of simple polynomials") {
    auto r = roots(CPoly{-1.0, 0.0, 1.0});
    REQUIRE(r.size() == 2);
    CHECK(std::abs(r[0] - Cplx(-1.0)) < 1e-10);
    CHECK(std::abs(r[1] - Cplx(1.0)) < 1e-10);

    auto dbl = roots(CPoly{4.0, -4.0, 1.0}); // (z-2)^2
    REQUIRE(dbl.size() == 2);
    CHECK(std::abs(dbl[0] - Cplx(2.0)) < 1e-5);
    CHECK(std::abs(dbl[1] - Cplx(2.0)) < 1e-5);

    // elementary-eigenfunction factor at n=1, b=1: roots are +-sqrt(b)
    auto q1 = roots(CPoly{1.0, 1.0}); // p = z + 1 (the lambda = 1 factor)
    REQUIRE(q1.size() == 1);
    CHECK(std::abs(q1[0] + 1.0) < 1e-12);

    CHECK_THROWS_AS(roots(CPoly{3.0}), InvalidParams);
}

TEST_CASE("roots of a constructed degree-7 polynomial") {
    std::vector<Cplx> expect = {Cplx(-2.0, 0.0),  Cplx(-0.5, -1.0), Cplx(-0.5, 1.0),
                                Cplx(0.3, 0.0),   Cplx(1.0, -2.0),  Cplx(1.0, 2.0),
                                Cplx(2.5, 0.0)};
    CPoly p{1.0};
    for (auto r : expect) p = p * CPoly{-r, 1.0};
    auto got = roots(p, 1e-13);
    REQUIRE(got.size() == expect.size());
    for (size_t i = 0; i < expect.size(); ++i)
        CHECK(std::abs(got[i] - expect[i]) < 1e-8);
}

TEST_CASE("residues by contour quadrature") {
    // residue of z^{-2} is 0
    CHECK(std::abs(residue_order2(CPoly{0.0, 1.0}, CPoly{}, 0.0, 0.3)) < 1e-12);

    // residue of z^{-2} e^{-2h}, h' = z^2 - 1, equals -2h'(0) = 2
    Cplx r = residue_order2(CPoly{0.0, 1.0}, CPoly{-1.0, 0.0, 1.0}, 0.0, 0.3);
    CHECK(std::abs(r - Cplx(2.0)) < 1e-10);

    // radius independence on an analytic integrand
    Cplx r2 = residue_order2(CPoly{0.0, 1.0}, CPoly{-1.0, 0.0, 1.0}, 0.0, 0.15);
    CHECK(std::abs(r - r2) < 1e-9);

    CHECK_THROWS_AS(residue_order2(CPoly{4.0, -4.0, 1.0}, CPoly{}, 2.0, 0.1),
                    RootNotSimple);
    CHECK_THROWS_AS(residue_order2(CPoly{0.0, -0.25, 0.0, 1.0}, CPoly{}, 0.0, 0.4),
                    RadiusTooLarge);
}

TEST_CASE("residue sum equals one enclosing contour integral") {
    // p with three well-separated roots; h' = z^2 - 1
    CPoly p = CPoly{-1.2, 1.0} * CPoly{Cplx(0.8, 0.9), 1.0} * CPoly{Cplx(0.1, -1.1), 1.0};
    CPoly hp{-1.0, 0.0, 1.0};
    CPoly h = antiderivative(hp);

    Cplx sum = 0.0;
    for (const auto& z0 : roots(p)) sum += residue_order2(p, hp, z0);

    // keep the enclosing circle tight: |e^{-2h}| grows like e^{2|z|^3/3}
    const double rho = 1.6;
    const int n = 8192;
    Cplx big = 0.0;
    for (int j = 0; j < n; ++j) {
        double th = 2.0 * std::numbers::pi * j / n;
        Cplx e(std::cos(th), std::sin(th));
        Cplx z = rho * e;
        Cplx pv = p(z);
        big += std::exp(-2.0 * h(z)) / (pv * pv) * e;
    }
    big *= rho / n;
    CHECK(std::abs(big - sum) < 1e-8 * (1.0 + std::abs(sum)));
}

TEST_CASE("constant-identity solve") {
    CPoly hp{-1.0, 0.0, 1.0}; // z^2 - b with b = 1

    SUBCASE("n = 0") {
        auto sol = solve_c_identity(CPoly{1.0}, hp);
        CHECK(sol.q.is_zero());
        CHECK(std::abs(sol.C - Cplx(1.0)) < 1e-12);
    }
    SUBCASE("n = 1, p = z - 1") {
        auto sol = solve_c_identity(CPoly{-1.0, 1.0}, hp);
        CHECK(std::abs(sol.C - Cplx(-1.0)) < 1e-10);
        CHECK(std::abs(sol.q.coeff(0) - Cplx(-0.5)) < 1e-10);
        CHECK(std::abs(sol.q.coeff(1) - Cplx(-0.5)) < 1e-10);
    }
    SUBCASE("n = 1, p = z + 1") {
        auto sol = solve_c_identity(CPoly{1.0, 1.0}, hp);
        CHECK(std::abs(sol.C - Cplx(1.0)) < 1e-10);
    }
    SUBCASE("off locus") {
        CHECK_THROWS_AS(solve_c_identity(CPoly{0.0, 1.0}, hp), NoSolution);
    }
    SUBCASE("identity residual") {
        CPoly p{-1.0, 1.0};
        auto sol = solve_c_identity(p, hp);
        CPoly pr = reflect(p);
        CPoly lhs = pr * pr * p * p - CPoly{sol.C};
        CPoly rhs = derivative(sol.q) * p - sol.q * derivative(p) -
                    2.0 * (hp * sol.q * p);
        double scale = std::max(1.0, lhs.max_abs_coeff());
        CHECK((lhs - rhs).max_abs_coeff() < 1e-9 * scale);
    }
}
