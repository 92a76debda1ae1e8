#pragma once

#include <string>
#include <vector>

#include "specloc/polyalg.hpp"

namespace specloc {

/// One of the d+2 open angular sectors in which every solution of
/// y'' = (V - mu) y either grows or decays exponentially along all rays.
struct StokesSector {
    int d = 0;
    int j = 0;
    double center_angle = 0.0; // 2*pi*j/(d+2)
    double half_width = 0.0;   // pi/(d+2)
};

std::vector<StokesSector> stokes_sectors(int d);

/// True iff sectors j and k of degree d are adjacent: (j-k) mod (d+2) in {1, d+1}.
bool sectors_adjacent(int d, int j, int k);

enum class Family { CubicPT, QuarticI, QuarticII, Custom };

/// A boundary eigenvalue problem y'' = (V - mu) y with the solution required
/// to be recessive along the rays arg z = theta_a and arg z = theta_b.
/// mu = mu_scale * lambda + mu_shift maps the family's published eigenvalue
/// convention onto the internal spectral parameter.
struct Problem {
    CPoly V;
    double theta_a = 0.0;
    double theta_b = 0.0;
    double mu_scale = 1.0;
    double mu_shift = 0.0;
    Family family = Family::Custom;
    std::string family_name = "custom";
    std::vector<std::pair<std::string, double>> params;
    bool conjugate_symmetric = false;

    Cplx mu_of_lambda(Cplx lambda) const { return mu_scale * lambda + mu_shift; }
    Cplx lambda_of_mu(Cplx mu) const { return (mu - mu_shift) / mu_scale; }
};

/// -y'' + (z^3 - a z) y = -lambda y, recessive along arg z = +-pi/2.
Problem make_cubic_pt(double a);
/// -y'' + (-z^4 + a z^2 + c z) y = -lambda y, recessive along arg z = +-pi/2.
Problem make_quartic_i(double a, double c);
/// -y'' + (z^4 - 2 b z^2 + 2 J z) y = lambda y, recessive along arg z = +-pi/3.
Problem make_quartic_ii(double b, double J);
/// y'' = (V - lambda) y with recession along the two given rays.
Problem make_custom(CPoly V, double theta_a, double theta_b);

struct ProblemDiagnostics {
    int sector_a = 0;
    int sector_b = 0;
    double recession_margin_a = 0.0; // min Re(e^{i theta} s) / |s| over the outer range
    double recession_margin_b = 0.0;
};

/// Checks that the rays lie strictly inside two non-adjacent Stokes sectors
/// of the leading term, that monic families carry no z^{d-1} term, and that
/// both rays are recessive for a reference spectral value. Throws
/// AdjacentSectors / NotNormalized / RayNotRecessive.
ProblemDiagnostics validate_problem(const Problem& pb);

} // namespace specloc
