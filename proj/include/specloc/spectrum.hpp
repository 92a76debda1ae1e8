#pragma once

#include <string>
#include <vector>

#include "specloc/shooting.hpp"

namespace specloc {

/// One located eigenvalue in the family's published convention.
struct EigenRecord {
    std::string family;
    std::vector<std::pair<std::string, double>> params;
    Cplx lambda = 0.0;
    int index = -1; // position in real-sorted order when real
    int n_real_zeros = -1;
    int n_nonreal_zeros = -1;
    std::string method;
};

struct RealEigOptions {
    ShotOptions shot;
    double eig_tol = 1e-8;
    int refine_levels = 2; // local grid refinement around |F| minima
};

/// Real eigenvalues in [lambda_lo, lambda_hi] by sign-change bracketing of
/// the real determinant on a uniform grid plus bisection. Misses even-order
/// zeros and pairs below the (refined) grid resolution.
std::vector<double> real_eigenvalues(const Problem& pb, double lambda_lo,
                                     double lambda_hi, int grid_n,
                                     const RealEigOptions& opts = {});

/// Axis-aligned rectangle, in the lambda plane or the z plane.
struct Rect {
    double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;
};

struct BoxOptions {
    ShotOptions shot;
    int min_panels = 8;    // trapezoid panels per edge, doubled until stable
    int max_panels = 1024;
    int max_nudges = 5;
};

/// Number of eigenvalues inside the rectangle by the argument principle
/// applied to the spectral determinant along the boundary.
int count_eigenvalues_box(const Problem& pb, Rect box, const BoxOptions& opts = {});

/// All eigenvalues inside the rectangle: argument-principle counting with
/// recursive subdivision until each cell holds at most one zero, then Newton
/// polishing.
std::vector<Cplx> complex_eigenvalues_box(const Problem& pb, Rect box,
                                          int max_subdiv = 40,
                                          const BoxOptions& opts = {});

struct ZeroCount {
    int n_real = 0;
    int n_nonreal = 0;
};

/// Zeros of the eigenfunction at `lambda` inside the z-plane rectangle
/// (symmetric about the real axis): total count by winding of y along the
/// boundary, real count by sign changes of the phase-normalized restriction
/// to the real segment.
ZeroCount count_zeros(const Problem& pb, Cplx lambda, Rect rect,
                      const ShotOptions& opts = {});

struct RealityRow {
    Cplx lambda;
    bool is_qes = false;
};

struct RealityReport {
    std::vector<RealityRow> rows; // the checked eigenvalues, sorted by Re
    double max_im = 0.0;          // over the checked class
    int n_checked = 0;
    bool certified = true; // strip count matched the real scan
};

/// First N eigenvalues of the J-family quartic at parameter b: real scan
/// plus an argument-principle sweep over the strip |Im lambda| <= 5.
/// For integer J >= 1 the elementary (QES) eigenvalues are excluded from
/// the checked class.
RealityReport reality_check(double b, double J, int N, const ShotOptions& opts = {});

} // namespace specloc
