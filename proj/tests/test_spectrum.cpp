#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "specloc/qes.hpp"
#include "specloc/spectrum.hpp"

using namespace specloc;

namespace {
constexpr double pi = std::numbers::pi;
Problem harmonic() { return make_custom(CPoly{0.0, 0.0, 1.0}, 0.0, pi); }
} // namespace

TEST_CASE("harmonic real scan") {
    auto eigs = real_eigenvalues(harmonic(), 0.0, 8.0, 64);
    REQUIRE(eigs.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(eigs[static_cast<size_t>(k)] - (2 * k + 1)) < 1e-6);
}

TEST_CASE("quartic real scan picks up the elementary eigenvalues") {
    auto eigs = real_eigenvalues(make_quartic_ii(1.0, 2.0), -6.0, 4.0, 128);
    bool has_m3 = false, has_1 = false;
    for (double ev : eigs) {
        if (std::abs(ev + 3.0) < 1e-6) has_m3 = true;
        if (std::abs(ev - 1.0) < 1e-6) has_1 = true;
    }
    CHECK(has_m3);
    CHECK(has_1);
}

TEST_CASE("cubic eigenvalues are stable under tolerance refinement") {
    Problem cu = make_cubic_pt(0.0);
    RealEigOptions loose, tight;
    tight.shot.rtol = 1e-12;
    auto a = real_eigenvalues(cu, 0.5, 12.0, 128, loose);
    auto b = real_eigenvalues(cu, 0.5, 12.0, 128, tight);
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() >= 3);
    for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-7);
}

TEST_CASE("argument-principle boxes") {
    Problem pb = harmonic();
    auto one = complex_eigenvalues_box(pb, {2.5, 3.5, -0.5, 0.5});
    REQUIRE(one.size() == 1);
    CHECK(std::abs(one[0] - Cplx(3.0)) < 1e-7);

    auto none = complex_eigenvalues_box(pb, {1.5, 2.5, -0.5, 0.5});
    CHECK(none.empty());

    // count equals the number of polished roots over a wider box
    Rect wide{0.0, 8.2, -1.0, 1.0};
    int n = count_eigenvalues_box(pb, wide);
    auto all = complex_eigenvalues_box(pb, wide);
    CHECK(n == 4);
    CHECK(all.size() == 4);
    for (size_t k = 0; k < all.size(); ++k) {
        CHECK(std::abs(all[k] - Cplx(2.0 * k + 1.0)) < 1e-7);
        CHECK(std::abs(all[k].imag()) < 1e-8);
    }
}

TEST_CASE("real scan and box search cross-validate") {
    Problem q = make_quartic_ii(1.0, 2.0);
    auto reals = real_eigenvalues(q, -6.0, 4.0, 128);
    auto box = complex_eigenvalues_box(q, {-6.0, 4.0, -1.0, 1.0});
    REQUIRE(box.size() == reals.size());
    for (size_t i = 0; i < box.size(); ++i) {
        CHECK(std::abs(box[i].imag()) < 1e-8);
        CHECK(std::abs(box[i].real() - reals[i]) < 1e-7);
    }
    // conjugate closure
    for (const auto& lam : box) {
        bool found = false;
        for (const auto& mu : box)
            if (std::abs(mu - std::conj(lam)) < 1e-8) found = true;
        CHECK(found);
    }
}

TEST_CASE("zero counting") {
    Problem pb = harmonic();
    ZeroCount h2 = count_zeros(pb, 5.0, {-4.0, 4.0, -1.0, 1.0});
    CHECK(h2.n_real == 2);
    CHECK(h2.n_nonreal == 0);

    ZeroCount h0 = count_zeros(pb, 1.0, {-3.0, 3.0, -1.5, 1.5});
    CHECK(h0.n_real == 0);
    CHECK(h0.n_nonreal == 0);

    Problem q = make_quartic_ii(1.0, 2.0);
    ZeroCount qz = count_zeros(q, 1.0, {-3.0, 3.0, -2.0, 2.0});
    CHECK(qz.n_real == 1);
    CHECK(qz.n_nonreal == 0);

    // stabilization under rectangle growth
    ZeroCount qz2 = count_zeros(q, 1.0, {-4.5, 4.5, -3.0, 3.0});
    CHECK(qz2.n_real == qz.n_real);
    CHECK(qz2.n_nonreal == qz.n_nonreal);

    CHECK_THROWS_AS(count_zeros(pb, 5.0, {-4.0, 4.0, -1.0, 2.0}), InvalidParams);
}

TEST_CASE("reality sweep certifies a real spectrum") {
    RealityReport rep = reality_check(1.0, 1.0, 4);
    CHECK(rep.certified);
    CHECK(rep.n_checked == 4);
    CHECK(rep.max_im < 1e-6);
    // the one elementary eigenvalue lambda = -b^2 is classified out
    bool saw_qes = false;
    for (const auto& row : rep.rows)
        if (row.is_qes) {
            saw_qes = true;
            CHECK(std::abs(row.lambda - Cplx(-1.0)) < 1e-6);
        }
    CHECK(saw_qes);
}
