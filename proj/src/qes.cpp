#include "specloc/qes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace specloc {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd to_eigen(const CMatrix& m) {
    const int n = static_cast<int>(m.size());
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = m[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return a;
}

CPoly hprime_of(Cplx b) { return CPoly{-b, 0.0, 1.0}; }

} // namespace

CMatrix qes_matrix(int n, Cplx b) {
    if (n < 0) throw InvalidParams("qes_matrix: n >= 0 required");
    CMatrix m(static_cast<size_t>(n) + 1,
              std::vector<Cplx>(static_cast<size_t>(n) + 1, Cplx(0.0)));
    // column k is the image of z^k:
    //   -k(k-1) z^{k-2} + 2bk z^{k-1} - b^2 z^k + 2(n-k) z^{k+1}
    for (int k = 0; k <= n; ++k) {
        auto col = [&](int row) -> Cplx& {
            return m[static_cast<size_t>(row)][static_cast<size_t>(k)];
        };
        if (k >= 2) col(k - 2) += -static_cast<double>(k) * (k - 1);
        if (k >= 1) col(k - 1) += 2.0 * b * static_cast<double>(k);
        col(k) += -b * b;
        if (k + 1 <= n) col(k + 1) += 2.0 * static_cast<double>(n - k);
    }
    return m;
}

SpectralPoly spectral_poly(int n, Cplx b) {
    const CMatrix mm = qes_matrix(n, b);
    const Eigen::MatrixXcd M = to_eigen(mm);
    const int dim = n + 1;

    // nodes on the Gershgorin disk of M, centered at the common diagonal -b^2
    double rad = 1.0;
    for (int i = 0; i < dim; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim; ++j)
            if (j != i) s += std::abs(M(i, j));
        rad = std::max(rad, s);
    }
    const Cplx center = -b * b;

    const int m = dim + 1; // n+2 nodes determine a degree n+1 polynomial
    std::vector<Cplx> nodes(static_cast<size_t>(m)), vals(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        double x = std::cos(kPi * (2.0 * j + 1.0) / (2.0 * m));
        nodes[static_cast<size_t>(j)] = center + rad * x;
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(dim, dim) * nodes[static_cast<size_t>(j)] - M;
        vals[static_cast<size_t>(j)] = Eigen::PartialPivLU<Eigen::MatrixXcd>(A).determinant();
    }

    // Newton divided differences, then expansion to the monomial basis
    std::vector<Cplx> dd = vals;
    for (int k = 1; k < m; ++k)
        for (int j = m - 1; j >= k; --j)
            dd[static_cast<size_t>(j)] =
                (dd[static_cast<size_t>(j)] - dd[static_cast<size_t>(j - 1)]) /
                (nodes[static_cast<size_t>(j)] - nodes[static_cast<size_t>(j - k)]);

    CPoly result{dd[0]};
    CPoly basis{1.0};
    for (int k = 1; k < m; ++k) {
        basis = basis * CPoly{-nodes[static_cast<size_t>(k - 1)], 1.0};
        result += dd[static_cast<size_t>(k)] * basis;
    }

    // monic by construction up to roundoff
    if (std::abs(result.lead() - Cplx(1.0)) > 1e-6)
        throw NonConvergence("spectral_poly: interpolation lost the monic lead");
    result *= 1.0 / result.lead();

    SpectralPoly sp;
    sp.n = n;
    sp.b = b;
    sp.Q = result;
    sp.dQ = derivative(result);
    return sp;
}

double spectral_det(int n, double b, double lambda) {
    const CMatrix mm = qes_matrix(n, Cplx(b));
    const int dim = n + 1;
    Eigen::MatrixXd A(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            A(i, j) = mm[static_cast<size_t>(i)][static_cast<size_t>(j)].real();
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(dim, dim) * lambda - A;
    return Eigen::PartialPivLU<Eigen::MatrixXd>(B).determinant();
}

double qes_residual(const CPoly& p, Cplx b, Cplx lambda) {
    const int n = p.degree();
    CPoly lhs = -derivative(derivative(p)) - 2.0 * (hprime_of(b) * derivative(p)) +
                CPoly{-b * b, 2.0 * static_cast<double>(n)} * p - lambda * p;
    return lhs.max_abs_coeff();
}

std::vector<QESPoint> qes_points(int n, Cplx b) {
    SpectralPoly sp = spectral_poly(n, b);
    std::vector<Cplx> lam =
        (n + 1 >= 1) ? roots(sp.Q, 1e-13) : std::vector<Cplx>{};

    // cluster multiple eigenvalues; one point per cluster, flagged
    std::vector<std::pair<Cplx, bool>> groups;
    std::vector<bool> used(lam.size(), false);
    for (size_t i = 0; i < lam.size(); ++i) {
        if (used[i]) continue;
        Cplx acc = lam[i];
        int cnt = 1;
        for (size_t j = i + 1; j < lam.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(lam[j] - lam[i]) < 1e-6 * (1.0 + std::abs(lam[i]))) {
                acc += lam[j];
                used[j] = true;
                ++cnt;
            }
        }
        groups.emplace_back(acc / static_cast<double>(cnt), cnt > 1);
    }

    const Eigen::MatrixXcd M = to_eigen(qes_matrix(n, b));
    std::vector<QESPoint> out;
    for (const auto& [lambda, multiple] : groups) {
        Eigen::MatrixXcd A = M - lambda * Eigen::MatrixXcd::Identity(n + 1, n + 1);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
        Eigen::VectorXcd v = svd.matrixV().col(n);

        QESPoint pt;
        pt.n = n;
        pt.b = b;
        pt.lambda = lambda;
        pt.degenerate = multiple;
        if (std::abs(v(n)) < 1e-6 * v.norm()) {
            pt.degenerate = true; // defective top coefficient
            int top = n;
            while (top > 0 && std::abs(v(top)) < 1e-6 * v.norm()) --top;
            v /= v(top);
        } else {
            v /= v(n);
        }
        std::vector<Cplx> pc(static_cast<size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) pc[static_cast<size_t>(k)] = v(k);
        pt.p = CPoly(std::move(pc)).trimmed(1e-12);
        pt.roots = (pt.p.degree() >= 1) ? roots(pt.p) : std::vector<Cplx>{};
        out.push_back(std::move(pt));
    }
    std::sort(out.begin(), out.end(), [](const QESPoint& a, const QESPoint& c) {
        if (a.lambda.real() != c.lambda.real()) return a.lambda.real() < c.lambda.real();
        return a.lambda.imag() < c.lambda.imag();
    });
    return out;
}

std::vector<Cplx> bethe_seeds_circle(int n) {
    std::vector<Cplx> s(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        double th = 2.0 * kPi * k / std::max(n, 1) + 0.35;
        s[static_cast<size_t>(k)] = 1.3 * Cplx(std::cos(th), std::sin(th));
    }
    return s;
}

std::vector<Cplx> bethe_seeds_from_point(const QESPoint& pt) {
    std::vector<Cplx> s = pt.roots;
    for (size_t k = 0; k < s.size(); ++k)
        s[k] += 1e-3 * Cplx(std::cos(0.7 * static_cast<double>(k) + 0.2),
                            std::sin(0.7 * static_cast<double>(k) + 0.2));
    return s;
}

std::vector<Cplx> bethe_solve(int n, Cplx b, std::vector<Cplx> seeds, int max_iter) {
    if (n == 0) return {};
    if (static_cast<int>(seeds.size()) != n)
        throw InvalidParams("bethe_solve: need exactly n seeds");

    auto residual = [&](const std::vector<Cplx>& z, std::vector<Cplx>& r) {
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            Cplx s = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == k) continue;
                s += 1.0 / (z[static_cast<size_t>(k)] - z[static_cast<size_t>(j)]);
            }
            r[static_cast<size_t>(k)] = s + z[static_cast<size_t>(k)] * z[static_cast<size_t>(k)] - b;
            worst = std::max(worst, std::abs(r[static_cast<size_t>(k)]));
        }
        return worst;
    };
    auto check_collision = [&](const std::vector<Cplx>& z) {
        for (int k = 0; k < n; ++k)
            for (int j = k + 1; j < n; ++j)
                if (std::abs(z[static_cast<size_t>(k)] - z[static_cast<size_t>(j)]) < 1e-8)
                    throw Collision("bethe_solve: iterates collided");
    };

    std::vector<Cplx> z = std::move(seeds), r(static_cast<size_t>(n)),
                      rt(static_cast<size_t>(n));
    check_collision(z);
    double rn = residual(z, r);
    for (int it = 0; it < max_iter; ++it) {
        if (rn < 1e-10) {
            std::sort(z.begin(), z.end(), [](Cplx a, Cplx c) {
                if (a.real() != c.real()) return a.real() < c.real();
                return a.imag() < c.imag();
            });
            return z;
        }
        Eigen::MatrixXcd J(n, n);
        for (int k = 0; k < n; ++k) {
            Cplx diag = 2.0 * z[static_cast<size_t>(k)];
            for (int j = 0; j < n; ++j) {
                if (j == k) continue;
                Cplx d = z[static_cast<size_t>(k)] - z[static_cast<size_t>(j)];
                Cplx w = 1.0 / (d * d);
                J(k, j) = w;
                diag -= w;
            }
            J(k, k) = diag;
        }
        Eigen::VectorXcd rhs(n);
        for (int k = 0; k < n; ++k) rhs(k) = -r[static_cast<size_t>(k)];
        Eigen::VectorXcd dz = Eigen::PartialPivLU<Eigen::MatrixXcd>(J).solve(rhs);

        double alpha = 1.0;
        bool improved = false;
        std::vector<Cplx> zt(static_cast<size_t>(n));
        for (int half = 0; half < 7; ++half) {
            for (int k = 0; k < n; ++k)
                zt[static_cast<size_t>(k)] = z[static_cast<size_t>(k)] + alpha * dz(k);
            double rtn = residual(zt, rt);
            if (rtn < rn) {
                z = zt;
                r = rt;
                rn = rtn;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        check_collision(z);
        if (!improved) throw NonConvergence("bethe_solve: damped step stalled");
    }
    throw NonConvergence("bethe_solve: iteration cap reached");
}

double divisibility_check(const CPoly& p, Cplx b) {
    if (p.is_zero()) throw InvalidParams("divisibility_check: p must be nonzero");
    CPoly num = derivative(derivative(p)) + 2.0 * (derivative(p) * hprime_of(b));
    if (num.is_zero()) return 0.0;
    auto [q, rem] = divrem(num, p);
    (void)q;
    return rem.max_abs_coeff();
}

EquivalenceReport equivalence_check(const CPoly& p, Cplx b) {
    EquivalenceReport rep;
    const CPoly hp = hprime_of(b);
    const CPoly h = antiderivative(hp);
    const CPoly dp = derivative(p);

    CPoly num = derivative(dp) + 2.0 * (dp * hp);
    double div_scale = std::max(1.0, num.max_abs_coeff());
    rep.div_norm = divisibility_check(p, b) / div_scale;

    if (p.degree() >= 1) {
        auto rts = roots(p);
        double worst_res = 0.0, worst_bethe = 0.0;
        for (size_t k = 0; k < rts.size(); ++k) {
            Cplx zk = rts[k];
            Cplx res = residue_order2(p, hp, zk);
            // natural residue magnitude at a simple root: 2|e^{-2h}| / |p'|^2
            double unit = 2.0 * std::abs(std::exp(-2.0 * h(zk))) /
                          std::norm(dp(zk));
            worst_res = std::max(worst_res, std::abs(res) / (unit + 1e-300));

            Cplx s = 0.0;
            for (size_t j = 0; j < rts.size(); ++j)
                if (j != k) s += 1.0 / (zk - rts[j]);
            worst_bethe = std::max(worst_bethe, std::abs(s + zk * zk - b));
        }
        rep.max_residue = worst_res;
        rep.bethe_residual = worst_bethe;
    }
    return rep;
}

DarbouxResult darboux(int n, Cplx b) {
    auto pts = qes_points(n, b);
    if (static_cast<int>(pts.size()) != n + 1)
        throw DegenerateEigenvalue("darboux: multiple QES eigenvalue at this b");
    for (const auto& pt : pts)
        if (pt.degenerate)
            throw DegenerateEigenvalue("darboux: degenerate QES point");

    const CPoly hp = hprime_of(b);
    // rows of the reduced Wronskian: r_{i,0} = p_i, r_{i,k+1} = r' + h' r
    std::vector<std::vector<CPoly>> rows(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        rows[static_cast<size_t>(i)].resize(static_cast<size_t>(n) + 1);
        rows[static_cast<size_t>(i)][0] = pts[static_cast<size_t>(i)].p;
        for (int k = 1; k <= n; ++k) {
            const CPoly& prev = rows[static_cast<size_t>(i)][static_cast<size_t>(k - 1)];
            rows[static_cast<size_t>(i)][static_cast<size_t>(k)] =
                derivative(prev) + hp * prev;
        }
    }

    // Laplace expansion; dimensions stay small
    std::vector<size_t> ridx(static_cast<size_t>(n) + 1);
    for (size_t i = 0; i < ridx.size(); ++i) ridx[i] = i;
    auto det = [&](auto&& self, std::vector<size_t>& rs, size_t col) -> CPoly {
        if (rs.size() == 1) return rows[rs[0]][col];
        CPoly acc;
        for (size_t i = 0; i < rs.size(); ++i) {
            std::vector<size_t> sub;
            sub.reserve(rs.size() - 1);
            for (size_t j = 0; j < rs.size(); ++j)
                if (j != i) sub.push_back(rs[j]);
            CPoly minor = self(self, sub, col + 1);
            CPoly term = rows[rs[i]][col] * minor;
            if (i % 2 == 1) term = -term;
            acc += term;
        }
        return acc;
    };
    CPoly W = det(det, ridx, 0);

    DarbouxResult res;
    res.W_poly = W;
    double w0 = std::abs(W.coeff(0));
    double worst = 0.0;
    for (int k = 1; k <= W.degree(); ++k) worst = std::max(worst, std::abs(W.coeff(k)));
    res.deviation = worst / std::max(w0, W.max_abs_coeff() + 1e-300);
    if (res.deviation > 1e-6)
        throw WronskianNotConstant("darboux: reduced Wronskian has non-constant terms of relative size " +
                                   std::to_string(res.deviation));

    // V - 2(n+1) h'' = z^4 - 2bz^2 + 2Jz - 4Jz = z^4 - 2bz^2 - 2Jz
    const double J = n + 1.0;
    res.V_new = CPoly{0.0, -2.0 * J, -2.0 * b, 0.0, 1.0};
    res.shift = 0.0;
    return res;
}

std::vector<CConstantRow> c_constant_check(int n, Cplx b) {
    SpectralPoly sp = spectral_poly(n, b);
    auto pts = qes_points(n, b);
    for (const auto& pt : pts)
        if (pt.degenerate)
            throw DegenerateEigenvalue("c_constant_check: degenerate QES point");

    const double pref = std::pow(2.0, -2.0 * n);
    std::vector<CConstantRow> out;
    for (const auto& pt : pts) {
        CConstantRow row;
        row.lambda = pt.lambda;
        row.C_identity = solve_c_identity(pt.p, hprime_of(b)).C;
        row.C_formula = pref * sp.dQ(pt.lambda);
        row.match = std::abs(row.C_identity - row.C_formula) <=
                    1e-8 * (1.0 + std::abs(row.C_formula));
        out.push_back(row);
    }
    return out;
}

std::vector<CrossingRow> level_crossings(int J, double b_min, int k_max,
                                         const CrossingOptions& opts) {
    if (J < 1 || J % 2 == 0) throw InvalidParams("level_crossings: J must be odd and >= 1");
    if (!(b_min < 0.0)) throw InvalidParams("level_crossings: b_min < 0 required");
    const int n = J - 1; // even

    // real branch of the elementary spectrum reaching b -> -infinity:
    // the factor p there has no real roots (n even)
    auto branch_lambda = [&](double b, double lam_prev, bool have_prev) -> double {
        auto pts = qes_points(n, Cplx(b));
        double best = 0.0, best_d = 1e300;
        bool found = false;
        for (const auto& pt : pts) {
            if (std::abs(pt.lambda.imag()) > 1e-7 * (1.0 + std::abs(pt.lambda))) continue;
            int real_roots = 0;
            for (const auto& r : pt.roots)
                if (std::abs(r.imag()) < 1e-6 * (1.0 + std::abs(r))) ++real_roots;
            if (real_roots != 0) continue;
            double cand = pt.lambda.real();
            double d = have_prev ? std::abs(cand - lam_prev) : std::abs(cand);
            if (!found || d < best_d) {
                best = cand;
                best_d = d;
                found = true;
            }
        }
        if (!found)
            throw BranchTrackingLost("level_crossings: no real branch candidate at b = " +
                                     std::to_string(b));
        if (have_prev && best_d > 0.5 * (1.0 + std::abs(lam_prev)))
            throw BranchTrackingLost("level_crossings: branch jump at b = " + std::to_string(b));
        return best;
    };

    ShotOptions shot = opts.shot;
    auto g = [&](double b, double lam) {
        return determinant_real(make_quartic_ii(b, -static_cast<double>(J)), lam, shot);
    };

    std::vector<CrossingRow> out;
    double b_prev = -1e-3;
    double lam_prev = branch_lambda(b_prev, 0.0, false);
    double g_prev = g(b_prev, lam_prev);
    int k = 0;
    while (b_prev > b_min && k < k_max) {
        double b_next = b_prev - opts.scan_db * (1.0 + 0.25 * std::abs(b_prev));
        if (b_next < b_min) b_next = b_min;
        double lam_next = branch_lambda(b_next, lam_prev, true);
        double g_next = g(b_next, lam_next);
        if (g_prev != 0.0 && g_next != 0.0 && std::signbit(g_prev) != std::signbit(g_next)) {
            double lo = b_next, hi = b_prev, lam_lo = lam_next;
            double glo = g_next;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                double lam_mid = branch_lambda(mid, lam_lo, true);
                double gm = g(mid, lam_mid);
                if (gm == 0.0 || std::signbit(gm) == std::signbit(glo)) {
                    lo = mid;
                    lam_lo = lam_mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
                if (hi - lo < 1e-10 * (1.0 + std::abs(mid))) break;
            }
            ++k;
            CrossingRow row;
            row.k = k;
            row.b_k = 0.5 * (lo + hi);
            row.lambda_k = branch_lambda(row.b_k, lam_lo, true);
            row.b_asym = -std::pow(0.75 * kPi * k, 2.0 / 3.0);
            row.ratio = row.b_k / row.b_asym;
            out.push_back(row);
        }
        b_prev = b_next;
        lam_prev = lam_next;
        g_prev = g_next;
        if (b_prev <= b_min) break;
    }
    return out;
}

} // namespace specloc
