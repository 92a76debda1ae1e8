#pragma once

#include <functional>
#include <string>
#include <vector>

#include "specloc/spectrum.hpp"

namespace specloc {

/// Scalar equation H(x, lambda) = 0 defining a real locus curve.
using HFun = std::function<double(double, double)>;

struct TracePoint {
    double s = 0.0;      // accumulated arclength
    double x = 0.0;      // parameter coordinate
    double lambda = 0.0;
    double resid = 0.0;  // |H| / ||grad H||, position units
};

struct TraceBounds {
    double x_lo = -1e300, x_hi = 1e300;
    double lam_lo = -1e300, lam_hi = 1e300;
};

struct CurveTrace {
    std::string branch;
    std::vector<TracePoint> pts;
    bool closed = false;
    std::vector<int> turning_indices;                   // parameter reversals
    std::vector<std::pair<double, double>> singular_events; // refined fold points
};

struct TraceOptions {
    double corrector_tol = 1e-8;
    double fd_step = 1e-5;
    int max_corrector_iters = 10;
    int initial_direction = +1;
    bool refine_folds = true;
};

/// Pseudo-arclength predictor-corrector tracing of H = 0 from a point on the
/// curve. Stops at the bounds box, the point budget, or closure. Fold points
/// (where dx/ds reverses; there dH/dlambda = 0 on the curve) are recorded as
/// singular events. A vanishing full gradient raises SingularPoint.
CurveTrace trace(const HFun& H, double x0, double lambda0, double step,
                 const TraceBounds& bounds, int max_points,
                 const TraceOptions& opts = {});

/// Fold locations (x, lambda) of a trace, refined to tolerance 1e-8 by
/// maximizing the parameter along the curve.
std::vector<std::pair<double, double>> turning_points(const CurveTrace& tr, const HFun& H);

/// Interpolated lambda values of the curve at parameter value x, one per
/// crossing segment.
std::vector<double> curve_values_at_x(const CurveTrace& tr, double x);

/// Hausdorff distance between the point sets of two traces.
double trace_hausdorff(const CurveTrace& a, const CurveTrace& b);

struct GammaOptions {
    ShotOptions shot;
    double a_seed = 3.0;
    int max_points = 20000;
    bool verify_label = true;
};

/// Component Gamma_n of the cubic real locus: the curve carrying
/// eigenfunctions with 2n non-real zeros, traced over a_range.
CurveTrace trace_gamma_cubic(int n, double a_lo, double a_hi, double step,
                             const GammaOptions& opts = {});

struct SectionOptions {
    ShotOptions shot;
    int max_points = 40000;
    bool verify_label = false;
};

/// Sections of the type-I surfaces S_0..S_{n_max} by the plane a = a0:
/// closed curves in the (c, lambda) plane.
std::vector<CurveTrace> section_sn(double a0, int n_max, double c_lo, double c_hi,
                                   double step, const SectionOptions& opts = {});

struct GammaNmOptions {
    int max_points = 20000;
    double b_seed = 0.0; // 0: use b_hi
};

/// Component Gamma_{n,m} of the elementary-eigenvalue locus of L_{n+1}:
/// the real solution curve of Q_{n+1}(b, lambda) = 0 on which the factor p
/// has exactly n - 2m real roots.
CurveTrace trace_gamma_nm(int n, int m, double b_lo, double b_hi, double step,
                          const GammaNmOptions& opts = {});

} // namespace specloc
