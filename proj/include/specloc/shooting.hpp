#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "specloc/oscillator.hpp"

namespace specloc {

/// Both integrators are adaptive one-step methods with per-step error
/// control. The Taylor stepper exploits the polynomial coefficients (local
/// series recurrence, order 26, tail-term error estimate) and takes steps
/// one to two orders of magnitude longer than the embedded 5(4) pair at the
/// same tolerance; the pair is kept for cross-validation.
enum class OdeMethod { Taylor, Rk45 };

struct ShotOptions {
    double rtol = 1e-10;
    std::optional<double> R; // seed radius override; otherwise automatic
    OdeMethod method = OdeMethod::Taylor;
};

/// Value and derivative at z = 0 of the solution recessive at infinity along
/// one boundary ray, integrated inward. Normalized so |y0|^2 + |dy0|^2 = 1;
/// only the projective class is meaningful. log_scale records the positive
/// factor divided out.
struct ShotResult {
    Cplx y0, dy0;
    double R_used = 0.0;
    int steps = 0;
    double est_error = 0.0;
    double log_scale = 0.0;
};

/// First-order WKB seed at z = R e^{i theta}: y = s^{-1/2}, dy = -s*y with
/// s = sqrt(V - mu) on the branch with Re(e^{i theta} s) > 0.
std::pair<Cplx, Cplx> wkb_seed(const CPoly& V, Cplx mu, double theta, double R);

/// Smallest R >= 5 with |V - mu| >= 1e4 and |V'| / |V - mu|^{3/2} <= 1e-3
/// at the seed point.
double auto_radius(const CPoly& V, Cplx mu, double theta);

ShotResult integrate_ray(const Problem& pb, Cplx mu, double theta,
                         const ShotOptions& opts = {});

/// Wronskian at z = 0 of the two recessive solutions; zero exactly at
/// eigenvalues. Defined up to a nonvanishing factor.
Cplx determinant(const Problem& pb, Cplx mu, const ShotOptions& opts = {});

/// Real-valued determinant for conjugate-symmetric problems and real mu.
/// One shot suffices when theta_b = -theta_a; sign changes are meaningful
/// (the value scales by a positive factor under seed rescaling).
double determinant_real(const Problem& pb, double mu, const ShotOptions& opts = {});

/// Eigenfunction values (y, dy/dz) at the given points, one shot along
/// theta_a then straight segments from the origin; a single overall scale
/// across all returned values.
std::vector<std::pair<Cplx, Cplx>> eigenfunction_values(const Problem& pb, Cplx mu,
                                                        const std::vector<Cplx>& points,
                                                        const ShotOptions& opts = {});

/// Max relative deviation of the finite-difference Schwarzian of f = y0/y1
/// from -2(V - mu) on a real grid of half-width w around the origin.
/// Second-order in the grid spacing.
double schwarzian_residual(const Problem& pb, Cplx mu, double w, int grid_n,
                           const ShotOptions& opts = {});

namespace detail {

/// State of y'' = (V - mu) y: value, derivative in z, and the log of the
/// positive normalization divided out so far.
struct OdeState {
    Cplx y, dy;
    double log_scale = 0.0;
    int steps = 0;
    double est_error = 0.0;
};

/// Adaptive integration of the state along the straight segment za -> zb.
/// Renormalizes by positive reals on overflow when allow_renorm is set.
void integrate_segment(const CPoly& V, Cplx mu, Cplx za, Cplx zb, OdeState& st,
                       double rtol, bool allow_renorm,
                       OdeMethod method = OdeMethod::Taylor);

} // namespace detail

} // namespace specloc
