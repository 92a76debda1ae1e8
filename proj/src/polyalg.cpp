#include "specloc/polyalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace specloc {

void CPoly::trim() {
    while (!c_.empty() && c_.back() == Cplx(0.0)) c_.pop_back();
}

CPoly CPoly::monomial(int degree, Cplx coeff) {
    if (degree < 0 || coeff == Cplx(0.0)) return CPoly{};
    std::vector<Cplx> c(static_cast<size_t>(degree) + 1, Cplx(0.0));
    c.back() = coeff;
    return CPoly(std::move(c));
}

double CPoly::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : c_) m = std::max(m, std::abs(c));
    return m;
}

Cplx CPoly::operator()(Cplx z) const {
    Cplx acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

CPoly CPoly::trimmed(double eps) const {
    std::vector<Cplx> c = c_;
    while (!c.empty() && std::abs(c.back()) <= eps) c.pop_back();
    return CPoly(std::move(c));
}

CPoly& CPoly::operator+=(const CPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Cplx(0.0));
    for (size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
}

CPoly& CPoly::operator-=(const CPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Cplx(0.0));
    for (size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
}

CPoly& CPoly::operator*=(Cplx s) {
    if (s == Cplx(0.0)) {
        c_.clear();
        return *this;
    }
    for (auto& c : c_) c *= s;
    return *this;
}

CPoly operator+(CPoly a, const CPoly& b) { return a += b; }
CPoly operator-(CPoly a, const CPoly& b) { return a -= b; }
CPoly operator*(Cplx s, CPoly a) { return a *= s; }
CPoly operator-(CPoly a) { return a *= Cplx(-1.0); }

CPoly operator*(const CPoly& a, const CPoly& b) {
    if (a.is_zero() || b.is_zero()) return CPoly{};
    std::vector<Cplx> c(a.coeffs().size() + b.coeffs().size() - 1, Cplx(0.0));
    for (size_t i = 0; i < a.coeffs().size(); ++i)
        for (size_t j = 0; j < b.coeffs().size(); ++j)
            c[i + j] += a.coeffs()[i] * b.coeffs()[j];
    return CPoly(std::move(c));
}

CPoly derivative(const CPoly& p) {
    if (p.degree() < 1) return CPoly{};
    std::vector<Cplx> c(p.coeffs().size() - 1);
    for (size_t k = 1; k < p.coeffs().size(); ++k)
        c[k - 1] = static_cast<double>(k) * p.coeffs()[k];
    return CPoly(std::move(c));
}

CPoly antiderivative(const CPoly& p) {
    if (p.is_zero()) return CPoly{};
    std::vector<Cplx> c(p.coeffs().size() + 1, Cplx(0.0));
    for (size_t k = 0; k < p.coeffs().size(); ++k)
        c[k + 1] = p.coeffs()[k] / static_cast<double>(k + 1);
    return CPoly(std::move(c));
}

CPoly reflect(const CPoly& p) {
    std::vector<Cplx> c = p.coeffs();
    for (size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
    return CPoly(std::move(c));
}

std::pair<CPoly, CPoly> divrem(const CPoly& p, const CPoly& d) {
    if (d.is_zero()) throw InvalidParams("divrem: division by zero polynomial");
    if (p.degree() < d.degree()) return {CPoly{}, p};
    std::vector<Cplx> rem = p.coeffs();
    const int dq = p.degree() - d.degree();
    std::vector<Cplx> quot(static_cast<size_t>(dq) + 1, Cplx(0.0));
    const Cplx dl = d.lead();
    for (int k = dq; k >= 0; --k) {
        Cplx f = rem[static_cast<size_t>(k + d.degree())] / dl;
        quot[static_cast<size_t>(k)] = f;
        for (int j = 0; j <= d.degree(); ++j)
            rem[static_cast<size_t>(k + j)] -= f * d.coeffs()[static_cast<size_t>(j)];
    }
    rem.resize(static_cast<size_t>(std::max(d.degree(), 0)));
    return {CPoly(std::move(quot)), CPoly(std::move(rem))};
}

namespace {

// Local scale of p at z for the convergence test |p(z)| <= tol * scale.
double eval_scale(const CPoly& p, Cplx z) {
    double az = std::abs(z), pw = 1.0, s = 0.0;
    for (const auto& c : p.coeffs()) {
        s += std::abs(c) * pw;
        pw *= az;
    }
    return s + 1e-300;
}

} // namespace

std::vector<Cplx> roots(const CPoly& p, double tol, int max_iter) {
    if (p.is_zero() || p.degree() < 1)
        throw InvalidParams("roots: polynomial must have degree >= 1");

    std::vector<Cplx> out;
    std::vector<Cplx> c = p.coeffs();
    // roots at the origin are exact
    size_t nz = 0;
    while (nz < c.size() - 1 && c[nz] == Cplx(0.0)) ++nz;
    out.assign(nz, Cplx(0.0));
    c.erase(c.begin(), c.begin() + static_cast<long>(nz));

    const int n = static_cast<int>(c.size()) - 1;
    if (n >= 1) {
        CPoly q(c);
        CPoly dq = derivative(q);
        double ratio = 0.0;
        for (int k = 0; k < n; ++k) ratio = std::max(ratio, std::abs(c[static_cast<size_t>(k)] / c.back()));
        const double r0 = 1.0 + ratio;

        std::vector<Cplx> z(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) {
            double th = 2.0 * std::numbers::pi * k / n + 0.4 + 0.01 * k;
            z[static_cast<size_t>(k)] = r0 * Cplx(std::cos(th), std::sin(th));
        }

        bool converged = false;
        for (int it = 0; it < max_iter && !converged; ++it) {
            converged = true;
            for (int k = 0; k < n; ++k) {
                Cplx zk = z[static_cast<size_t>(k)];
                Cplx pv = q(zk);
                if (std::abs(pv) <= tol * eval_scale(q, zk)) continue;
                converged = false;
                Cplx dv = dq(zk);
                if (dv == Cplx(0.0)) dv = Cplx(1e-280, 0.0);
                Cplx nk = pv / dv;
                Cplx s = 0.0;
                for (int j = 0; j < n; ++j) {
                    if (j == k) continue;
                    Cplx d = zk - z[static_cast<size_t>(j)];
                    if (std::abs(d) < 1e-280) d = Cplx(1e-280, 0.0);
                    s += 1.0 / d;
                }
                Cplx denom = 1.0 - nk * s;
                if (std::abs(denom) < 1e-280) denom = Cplx(1e-280, 0.0);
                z[static_cast<size_t>(k)] = zk - nk / denom;
            }
        }
        if (!converged) throw NonConvergence("roots: Aberth iteration cap reached");
        out.insert(out.end(), z.begin(), z.end());
    }

    std::sort(out.begin(), out.end(), [](Cplx a, Cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

double residue_default_radius(const CPoly& p, Cplx z0) {
    double nearest = 1.0;
    if (p.degree() >= 2) {
        nearest = 1e300;
        for (const auto& r : roots(p)) {
            double d = std::abs(r - z0);
            if (d > 1e-9) nearest = std::min(nearest, d);
        }
        if (nearest > 1e299) nearest = 1.0;
    }
    return std::min(0.4 * nearest, 0.5);
}

Cplx residue_order2(const CPoly& p, const CPoly& hprime, Cplx z0,
                    double radius, int quad_n) {
    CPoly dp = derivative(p);
    double dscale = eval_scale(dp, z0);
    if (std::abs(dp(z0)) <= 1e-8 * std::max(1.0, dscale))
        throw RootNotSimple("residue_order2: |p'(z0)| below threshold");
    if (radius <= 0.0) radius = residue_default_radius(p, z0);
    if (p.degree() >= 2) {
        for (const auto& r : roots(p)) {
            double d = std::abs(r - z0);
            if (d > 1e-9 && d < 2.0 * radius)
                throw RadiusTooLarge("residue_order2: another root within 2*radius");
        }
    }
    const CPoly h = antiderivative(hprime);
    Cplx acc = 0.0;
    for (int j = 0; j < quad_n; ++j) {
        double th = 2.0 * std::numbers::pi * j / quad_n;
        Cplx e(std::cos(th), std::sin(th));
        Cplx z = z0 + radius * e;
        Cplx pv = p(z);
        acc += std::exp(-2.0 * h(z)) / (pv * pv) * e;
    }
    return acc * (radius / quad_n);
}

CIdentity solve_c_identity(const CPoly& p, const CPoly& hprime) {
    if (p.is_zero()) throw InvalidParams("solve_c_identity: p must be nonzero");
    const int n = p.degree();
    if (std::abs(p.lead() - Cplx(1.0)) > 1e-9)
        throw InvalidParams("solve_c_identity: p must be monic");

    const CPoly pr = reflect(p);
    const CPoly lhs = (pr * pr) * (p * p); // p^2(-z) p^2(z), degree 4n
    const CPoly dp = derivative(p);

    const int qdim = (n >= 1) ? 3 * n - 1 : 0; // q coefficients 0..3n-2
    const int nunk = qdim + 1;                 // plus the constant C

    // rows cover every degree appearing on either side
    int nrows = lhs.degree() + 1;
    {
        int qdeg = qdim - 1;
        if (qdeg >= 0)
            nrows = std::max(nrows, qdeg + n + hprime.degree() + 2);
    }
    nrows = std::max(nrows, 1);

    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(nrows, nunk);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(nrows);
    for (int k = 0; k <= lhs.degree(); ++k) rhs(k) = lhs.coeff(k);

    for (int j = 0; j < qdim; ++j) {
        CPoly ej = CPoly::monomial(j);
        CPoly col = derivative(ej) * p - ej * dp - 2.0 * (hprime * ej * p);
        for (int k = 0; k <= col.degree(); ++k) A(k, j) = col.coeff(k);
    }
    A(0, qdim) = 1.0; // the constant C

    // column scaling keeps the QR well conditioned when b is large
    Eigen::VectorXd colscale(nunk);
    for (int j = 0; j < nunk; ++j) {
        double m = A.col(j).cwiseAbs().maxCoeff();
        colscale(j) = (m > 0.0) ? m : 1.0;
        A.col(j) /= colscale(j);
    }
    Eigen::VectorXcd x = A.colPivHouseholderQr().solve(rhs);
    double residual = (A * x - rhs).cwiseAbs().maxCoeff();
    for (int j = 0; j < nunk; ++j) x(j) /= colscale(j);

    const double lhs_scale = std::max(1.0, lhs.max_abs_coeff());
    if (residual > 1e-6 * lhs_scale)
        throw NoSolution("solve_c_identity: inconsistent system (point off the QES locus)",
                         residual);

    CIdentity out;
    std::vector<Cplx> qc(static_cast<size_t>(std::max(qdim, 0)));
    for (int j = 0; j < qdim; ++j) qc[static_cast<size_t>(j)] = x(j);
    out.q = CPoly(std::move(qc)).trimmed(1e-13 * std::max(1.0, lhs_scale));
    out.C = x(qdim);
    out.residual = residual;
    return out;
}

} // namespace specloc
