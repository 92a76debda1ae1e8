#pragma once

#include <complex>
#include <initializer_list>
#include <utility>
#include <vector>

#include "specloc/error.hpp"

namespace specloc {

using Cplx = std::complex<double>;

/// Dense univariate polynomial over C, coefficients stored in ascending
/// degree order (c[k] multiplies z^k). The zero polynomial has an empty
/// coefficient vector; otherwise the leading coefficient is nonzero.
class CPoly {
public:
    CPoly() = default;
    CPoly(std::initializer_list<Cplx> ascending) : c_(ascending) { trim(); }
    explicit CPoly(std::vector<Cplx> ascending) : c_(std::move(ascending)) { trim(); }

    static CPoly monomial(int degree, Cplx coeff = 1.0);

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; } // -1 for zero
    Cplx lead() const { return c_.empty() ? Cplx(0.0) : c_.back(); }
    Cplx coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : Cplx(0.0);
    }
    const std::vector<Cplx>& coeffs() const { return c_; }
    double max_abs_coeff() const;

    /// Horner evaluation.
    Cplx operator()(Cplx z) const;

    /// Copy with leading coefficients of magnitude <= eps dropped.
    CPoly trimmed(double eps) const;

    CPoly& operator+=(const CPoly& o);
    CPoly& operator-=(const CPoly& o);
    CPoly& operator*=(Cplx s);

private:
    void trim(); // drop exactly-zero leading coefficients
    std::vector<Cplx> c_;
};

CPoly operator+(CPoly a, const CPoly& b);
CPoly operator-(CPoly a, const CPoly& b);
CPoly operator*(const CPoly& a, const CPoly& b);
CPoly operator*(Cplx s, CPoly a);
CPoly operator-(CPoly a);

CPoly derivative(const CPoly& p);
/// Antiderivative with value 0 at z = 0.
CPoly antiderivative(const CPoly& p);
/// z -> -z.
CPoly reflect(const CPoly& p);
/// Euclidean division: returns (quotient, remainder) with p = q*d + r,
/// deg r < deg d. Throws InvalidParams for a zero divisor.
std::pair<CPoly, CPoly> divrem(const CPoly& p, const CPoly& d);

/// All roots with multiplicity, by Ehrlich-Aberth simultaneous iteration
/// from deterministic starting points on a circle. Each returned root r
/// satisfies |p(r)| <= tol * sum_k |c_k||r|^k. Output sorted by
/// (real, imag). Throws NonConvergence after max_iter sweeps.
std::vector<Cplx> roots(const CPoly& p, double tol = 1e-12, int max_iter = 300);

/// (1/2 pi i) * contour integral of p(z)^{-2} e^{-2h(z)} around the circle
/// |z - z0| = radius, h = antiderivative of hprime with h(0) = 0, by
/// trapezoidal quadrature with quad_n nodes. z0 must be a simple root of p
/// and no other root may lie within 2*radius.
Cplx residue_order2(const CPoly& p, const CPoly& hprime, Cplx z0,
                    double radius = 0.0, int quad_n = 64);

/// Pick the default quadrature radius for residue_order2: 0.4 times the
/// distance from z0 to the nearest other root, capped at 0.5.
double residue_default_radius(const CPoly& p, Cplx z0);

struct CIdentity {
    CPoly q;
    Cplx C = 0.0;
    double residual = 0.0; // max-abs coefficient residual of the identity
};

/// Solve p^2(-z) p^2(z) - C = q'p - qp' - 2h'qp for (q, C) with
/// deg q <= 3n-2 (q = 0 for n = 0), p monic of degree n. The system is
/// overdetermined; an inconsistent system (point off the elementary-
/// eigenfunction locus) raises NoSolution carrying the least-squares
/// residual.
CIdentity solve_c_identity(const CPoly& p, const CPoly& hprime);

} // namespace specloc
