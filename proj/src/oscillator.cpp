#include "specloc/oscillator.hpp"

#include <cmath>
#include <numbers>

namespace specloc {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double th) {
    th = std::fmod(th, 2.0 * kPi);
    if (th > kPi) th -= 2.0 * kPi;
    if (th <= -kPi) th += 2.0 * kPi;
    return th;
}

bool poly_is_real(const CPoly& p) {
    for (const auto& c : p.coeffs())
        if (std::abs(c.imag()) != 0.0) return false;
    return true;
}

bool rays_conjugate_stable(double a, double b) {
    double na = wrap_angle(-a), nb = wrap_angle(-b);
    auto close = [](double x, double y) { return std::abs(wrap_angle(x - y)) < 1e-12; };
    return (close(na, a) && close(nb, b)) || (close(na, b) && close(nb, a));
}

void require_finite(std::initializer_list<double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) throw InvalidParams("family parameters must be finite");
}

} // namespace

std::vector<StokesSector> stokes_sectors(int d) {
    if (d < 1) throw InvalidParams("stokes_sectors: d >= 1 required");
    std::vector<StokesSector> out;
    out.reserve(static_cast<size_t>(d) + 2);
    for (int j = 0; j <= d + 1; ++j)
        out.push_back({d, j, 2.0 * kPi * j / (d + 2), kPi / (d + 2)});
    return out;
}

bool sectors_adjacent(int d, int j, int k) {
    int m = ((j - k) % (d + 2) + d + 2) % (d + 2);
    return m == 1 || m == d + 1;
}

Problem make_cubic_pt(double a) {
    require_finite({a});
    Problem pb;
    pb.V = CPoly{0.0, -a, 0.0, 1.0};
    pb.theta_a = kPi / 2.0;
    pb.theta_b = -kPi / 2.0;
    pb.mu_scale = -1.0;
    pb.family = Family::CubicPT;
    pb.family_name = "cubic-pt";
    pb.params = {{"a", a}};
    pb.conjugate_symmetric = true;
    return pb;
}

Problem make_quartic_i(double a, double c) {
    require_finite({a, c});
    Problem pb;
    pb.V = CPoly{0.0, c, a, 0.0, -1.0};
    pb.theta_a = kPi / 2.0;
    pb.theta_b = -kPi / 2.0;
    pb.mu_scale = -1.0;
    pb.family = Family::QuarticI;
    pb.family_name = "quartic-i";
    pb.params = {{"a", a}, {"c", c}};
    pb.conjugate_symmetric = true;
    return pb;
}

Problem make_quartic_ii(double b, double J) {
    require_finite({b, J});
    Problem pb;
    pb.V = CPoly{0.0, 2.0 * J, -2.0 * b, 0.0, 1.0};
    pb.theta_a = kPi / 3.0;
    pb.theta_b = -kPi / 3.0;
    pb.mu_scale = 1.0;
    pb.family = Family::QuarticII;
    pb.family_name = "quartic-ii";
    pb.params = {{"b", b}, {"j", J}};
    pb.conjugate_symmetric = true;
    return pb;
}

Problem make_custom(CPoly V, double theta_a, double theta_b) {
    if (V.degree() < 1) throw InvalidParams("custom potential must be nonconstant");
    Problem pb;
    pb.theta_a = wrap_angle(theta_a);
    pb.theta_b = wrap_angle(theta_b);
    pb.conjugate_symmetric = poly_is_real(V) && rays_conjugate_stable(pb.theta_a, pb.theta_b);
    pb.V = std::move(V);
    return pb;
}

ProblemDiagnostics validate_problem(const Problem& pb) {
    const int d = pb.V.degree();
    if (d < 1) throw InvalidParams("potential must be nonconstant");

    // Sector pattern of the leading term c z^d: a phase arg(c) rotates the
    // monic pattern by -arg(c)/(d+2).
    const double phi = std::arg(pb.V.lead());
    const double width = 2.0 * kPi / (d + 2);
    auto sector_of = [&](double theta) {
        double u = (theta * (d + 2) + phi) / (2.0 * kPi);
        int j = static_cast<int>(std::lround(u));
        double center = (2.0 * kPi * j - phi) / (d + 2);
        double off = std::abs(wrap_angle(theta - center));
        if (off >= 0.499 * width)
            throw RayNotRecessive("ray lies on or too close to a sector boundary");
        return ((j % (d + 2)) + d + 2) % (d + 2);
    };

    ProblemDiagnostics diag;
    diag.sector_a = sector_of(pb.theta_a);
    diag.sector_b = sector_of(pb.theta_b);
    if (diag.sector_a == diag.sector_b || sectors_adjacent(d, diag.sector_a, diag.sector_b))
        throw AdjacentSectors("boundary rays lie in identical or adjacent Stokes sectors");

    // Named monic families are normalized: no z^{d-1} term.
    if (pb.family != Family::Custom && std::abs(pb.V.coeff(d - 1)) > 1e-12)
        throw NotNormalized("potential carries a z^{d-1} term");

    // Recession along each ray for a reference spectral value.
    const Cplx mu0 = pb.mu_of_lambda(0.0);
    auto margin = [&](double theta) {
        Cplx e(std::cos(theta), std::sin(theta));
        double worst = 1e300;
        for (double t = 5.0; t <= 40.0; t *= 1.3) {
            Cplx s = std::sqrt(pb.V(t * e) - mu0);
            double re = (e * s).real(), as = std::abs(s);
            if (as == 0.0) continue;
            worst = std::min(worst, std::abs(re) / as);
            if (std::abs(re) < 1e-6 * as)
                throw RayNotRecessive("no decaying branch along the boundary ray");
        }
        return worst;
    };
    diag.recession_margin_a = margin(pb.theta_a);
    diag.recession_margin_b = margin(pb.theta_b);
    return diag;
}

} // namespace specloc
