#pragma once

#include <vector>

#include "specloc/oscillator.hpp"
#include "specloc/polyalg.hpp"
#include "specloc/shooting.hpp"

namespace specloc {

/// Row-major square matrix of the map p -> -p'' - 2(z^2 - b)p' + (2nz - b^2)p
/// on the monomial basis {1, z, ..., z^n}. Its spectrum consists of the
/// eigenvalues with elementary eigenfunctions p(z) e^{z^3/3 - b z}.
using CMatrix = std::vector<std::vector<Cplx>>;

CMatrix qes_matrix(int n, Cplx b);

/// Characteristic polynomial of the QES matrix at fixed b, monic in lambda,
/// with its formal derivative. Computed by determinant evaluation at
/// Chebyshev nodes on the Gershgorin disk plus Newton interpolation.
struct SpectralPoly {
    int n = 0;
    Cplx b = 0.0;
    CPoly Q;
    CPoly dQ;
};
SpectralPoly spectral_poly(int n, Cplx b);

/// det(lambda I - M(b)) for real arguments; cheap evaluator for curve tracing.
double spectral_det(int n, double b, double lambda);

/// One elementary eigenfunction p(z) e^{z^3/3 - bz} of the J = n+1 quartic.
struct QESPoint {
    int n = 0;
    Cplx b = 0.0;
    Cplx lambda = 0.0;
    CPoly p;                 // monic, degree n
    std::vector<Cplx> roots; // zeros of p
    bool degenerate = false; // multiple eigenvalue of the QES matrix
};

/// All QES points at (n, b), sorted by (Re lambda, Im lambda). Clustered
/// (multiple) eigenvalues yield one flagged point per Jordan eigenvector.
std::vector<QESPoint> qes_points(int n, Cplx b);

/// Coefficientwise residual of the p-equation at (p, b, lambda).
double qes_residual(const CPoly& p, Cplx b, Cplx lambda);

/// Damped Newton solve of sum_{j != k} 1/(z_k - z_j) = -(z_k^2 - b),
/// converged when max residual < 1e-10. Output sorted by (real, imag).
std::vector<Cplx> bethe_solve(int n, Cplx b, std::vector<Cplx> seeds,
                              int max_iter = 120);

/// Seed sets for bethe_solve: scaled points on a circle (independent of the
/// linear-algebra path), or the roots of the qes_points factors perturbed by
/// 1e-3 (fast path).
std::vector<Cplx> bethe_seeds_circle(int n);
std::vector<Cplx> bethe_seeds_from_point(const QESPoint& pt);

/// Max-abs coefficient of rem(p'' + 2 p'(z^2 - b), p).
double divisibility_check(const CPoly& p, Cplx b);

/// The three equivalent membership tests evaluated together, each scaled to
/// be O(1) off the locus: divisibility remainder, max contour residue of
/// p^{-2} e^{-2h}, and the worst Bethe residual at the roots of p.
struct EquivalenceReport {
    double div_norm = 0.0;
    double max_residue = 0.0;
    double bethe_residual = 0.0;
};
EquivalenceReport equivalence_check(const CPoly& p, Cplx b);

/// Wronskian-based transform removing the n+1 elementary eigenvalues of
/// L_{n+1}. The reduced Wronskian W_poly must come out constant, and the
/// transformed potential equals z^4 - 2bz^2 - 2Jz (the potential of L_{-J}).
struct DarbouxResult {
    CPoly W_poly;
    CPoly V_new;
    Cplx shift = 0.0;
    double deviation = 0.0; // relative size of non-constant W_poly terms
};
DarbouxResult darboux(int n, Cplx b);

/// C from the identity solve against C = 2^{-2n} dQ/dlambda at each point.
struct CConstantRow {
    Cplx lambda;
    Cplx C_identity;
    Cplx C_formula;
    bool match = false;
};
std::vector<CConstantRow> c_constant_check(int n, Cplx b);

/// Intersections of the real elementary-eigenvalue branch lambda(b) of L_J
/// with the spectrum of L_{-J}, scanned for b in [b_min, 0), indexed by
/// decreasing b and compared with -((3/4) pi k)^{2/3}.
struct CrossingRow {
    int k = 0;
    double b_k = 0.0;
    double lambda_k = 0.0;
    double b_asym = 0.0;
    double ratio = 0.0;
};
struct CrossingOptions {
    double scan_db = 0.02;
    ShotOptions shot;
};
std::vector<CrossingRow> level_crossings(int J, double b_min, int k_max,
                                         const CrossingOptions& opts = {});

} // namespace specloc
