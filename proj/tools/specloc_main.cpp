// specloc: eigenvalues, spectral determinants, and real spectral loci of
// cubic and quartic complex oscillators, as scriptable CSV/JSON.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"

#include "specloc/io.hpp"
#include "specloc/locus.hpp"
#include "specloc/qes.hpp"
#include "specloc/spectrum.hpp"

using namespace specloc;

namespace {

// --- small input parsers ------------------------------------------------

// angle strings: "pi/3", "-pi/2", "2pi/3", "0.75", "1.5pi"
double parse_angle(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    auto pos = t.find("pi");
    if (pos == std::string::npos) return std::stod(t);
    double coef = 1.0;
    std::string head = t.substr(0, pos);
    if (head == "-") coef = -1.0;
    else if (!head.empty() && head != "+") coef = std::stod(head);
    double div = 1.0;
    std::string tail = t.substr(pos + 2);
    if (!tail.empty()) {
        if (tail[0] != '/') throw InvalidParams("bad angle: " + s);
        div = std::stod(tail.substr(1));
    }
    return coef * std::numbers::pi / div;
}

// polynomial strings in z: "z^2", "z^4-2*z^2+4z", "-z^4+25z^2"
CPoly parse_potential(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw InvalidParams("empty potential");
    std::vector<std::pair<size_t, size_t>> terms; // [begin, end)
    size_t start = 0;
    for (size_t i = 1; i < t.size(); ++i) {
        if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E' &&
            t[i - 1] != '^') {
            terms.emplace_back(start, i);
            start = i;
        }
    }
    terms.emplace_back(start, t.size());

    std::vector<Cplx> coeffs;
    auto bump = [&](int deg, double c) {
        if (static_cast<int>(coeffs.size()) <= deg) coeffs.resize(static_cast<size_t>(deg) + 1, 0.0);
        coeffs[static_cast<size_t>(deg)] += c;
    };
    for (auto [b, e] : terms) {
        std::string term = t.substr(b, e - b);
        double sign = 1.0;
        size_t i = 0;
        while (i < term.size() && (term[i] == '+' || term[i] == '-')) {
            if (term[i] == '-') sign = -sign;
            ++i;
        }
        std::string num;
        while (i < term.size() && (std::isdigit(static_cast<unsigned char>(term[i])) ||
                                   term[i] == '.' || term[i] == 'e' || term[i] == 'E' ||
                                   ((term[i] == '+' || term[i] == '-') && i > 0 &&
                                    (term[i - 1] == 'e' || term[i - 1] == 'E')))) {
            num += term[i];
            ++i;
        }
        double coef = num.empty() ? 1.0 : std::stod(num);
        if (i < term.size() && term[i] == '*') ++i;
        int deg = 0;
        if (i < term.size() && term[i] == 'z') {
            ++i;
            deg = 1;
            if (i < term.size() && term[i] == '^') {
                deg = std::stoi(term.substr(i + 1));
                i = term.size();
            }
        } else if (i != term.size()) {
            throw InvalidParams("bad potential term: " + term);
        }
        bump(deg, sign * coef);
    }
    return CPoly(std::move(coeffs));
}

std::pair<double, double> parse_range(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw InvalidParams("range must be lo,hi");
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

Rect parse_box(const std::string& s) {
    std::stringstream ss(s);
    std::string part;
    std::vector<double> v;
    while (std::getline(ss, part, ',')) v.push_back(std::stod(part));
    if (v.size() != 4) throw InvalidParams("box must be re0,re1,im0,im1");
    return {v[0], v[1], v[2], v[3]};
}

// --- shared output plumbing ----------------------------------------------

struct Output {
    std::string path;    // empty: stdout
    std::string format;  // csv | json
    std::string invocation;

    void emit(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(path);
            if (!f) throw InvalidParams("cannot open output file " + path);
            f << text;
        }
    }
};

std::string join_args(int argc, char** argv, double rtol) {
    std::ostringstream os;
    for (int i = 0; i < argc; ++i) os << (i ? " " : "") << argv[i];
    os << " | rtol=" << sci17(rtol) << " eig_tol=" << sci17(1e-8);
    return os.str();
}

Problem family_problem(const std::string& family, double a, double b, double c,
                       double J, const std::string& potential, const std::string& rays) {
    if (family == "cubic-pt") return make_cubic_pt(a);
    if (family == "quartic-i") return make_quartic_i(a, c);
    if (family == "quartic-ii") return make_quartic_ii(b, J);
    if (family == "custom") {
        if (potential.empty() || rays.empty())
            throw InvalidParams("custom family needs --potential and --rays");
        auto comma = rays.find(',');
        if (comma == std::string::npos) throw InvalidParams("--rays must be th1,th2");
        return make_custom(parse_potential(potential), parse_angle(rays.substr(0, comma)),
                           parse_angle(rays.substr(comma + 1)));
    }
    throw InvalidParams("unknown family " + family);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral loci of cubic/quartic complex oscillators"};
    app.require_subcommand(1);

    double rtol = 1e-10;
    if (const char* env = std::getenv("SPECLOC_RTOL")) rtol = std::atof(env);
    std::string out_path, format = "csv";
    app.add_option("--rtol", rtol, "ODE relative tolerance")->capture_default_str();
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.fallthrough();

    std::string family = "custom", potential, rays;
    double a = 0.0, b = 1.0, c = 0.0, J = 1.0;
    int n = 0, m = -1, nmax = 3, grid = 256, nev = 8, kmax = 5;
    double step = 0.05, bmin = -12.0, lambda_re = 0.0, lambda_im = 0.0;
    std::string range_s, box_s;
    bool want_real = false, full = false;
    int sectors_d = 3;

    auto add_family = [&](CLI::App* cmd) {
        cmd->add_option("--family", family, "cubic-pt | quartic-i | quartic-ii | custom");
        cmd->add_option("--a", a, "cubic/quartic-i parameter a");
        cmd->add_option("--b", b, "quartic-ii parameter b");
        cmd->add_option("--c", c, "quartic-i parameter c");
        cmd->add_option("--j", J, "quartic-ii parameter J");
        cmd->add_option("--potential", potential, "custom potential, e.g. \"z^2\"");
        cmd->add_option("--rays", rays, "custom boundary rays, e.g. \"0,pi\"");
    };

    auto* cmd_sectors = app.add_subcommand("sectors", "Stokes sector table");
    cmd_sectors->add_option("--d", sectors_d, "potential degree")->required();

    auto* cmd_eig = app.add_subcommand("eig", "real or complex eigenvalues");
    add_family(cmd_eig);
    cmd_eig->add_option("--range", range_s, "real lambda range lo,hi");
    cmd_eig->add_option("--box", box_s, "complex lambda box re0,re1,im0,im1");
    cmd_eig->add_option("--grid", grid, "scan grid size")->capture_default_str();

    auto* cmd_det = app.add_subcommand("det", "spectral determinant value");
    add_family(cmd_det);
    cmd_det->add_option("--lambda", lambda_re, "eigenvalue parameter (family convention)")->required();
    cmd_det->add_option("--lambda-im", lambda_im, "imaginary part");
    cmd_det->add_flag("--real", want_real, "one-shot real determinant");

    auto* cmd_trace = app.add_subcommand("trace", "real spectral locus curves");
    add_family(cmd_trace);
    cmd_trace->add_option("--n", n, "branch index");
    cmd_trace->add_option("--m", m, "QES branch sub-index");
    cmd_trace->add_option("--nmax", nmax, "number of branches")->capture_default_str();
    cmd_trace->add_option("--range", range_s, "parameter range lo,hi")->required();
    cmd_trace->add_option("--step", step, "base arclength step")->capture_default_str();
    cmd_trace->add_flag("--full", full, "quartic-ii: QES plus non-QES branches");

    auto* cmd_qes = app.add_subcommand("qes", "elementary eigenfunctions at (n, b)");
    cmd_qes->add_option("--n", n, "degree of the polynomial factor")->required();
    cmd_qes->add_option("--b", b, "parameter b")->required();

    auto* cmd_bethe = app.add_subcommand("bethe", "root system of the factor p");
    cmd_bethe->add_option("--n", n, "degree")->required();
    cmd_bethe->add_option("--b", b, "parameter b")->required();
    std::string seeds_mode = "points";
    cmd_bethe->add_option("--seeds", seeds_mode, "points | circle")
        ->check(CLI::IsMember({"points", "circle"}));

    auto* cmd_darboux = app.add_subcommand("darboux", "Wronskian transform to -J");
    cmd_darboux->add_option("--n", n, "J - 1")->required();
    cmd_darboux->add_option("--b", b, "parameter b")->required();

    auto* cmd_cross = app.add_subcommand("crossings", "level crossings for odd J");
    cmd_cross->add_option("--j", J, "odd positive integer J")->required();
    cmd_cross->add_option("--bmin", bmin, "scan down to this b")->capture_default_str();
    cmd_cross->add_option("--kmax", kmax, "number of crossings")->capture_default_str();

    auto* cmd_reality = app.add_subcommand("reality", "imaginary parts of the first N eigenvalues");
    cmd_reality->add_option("--j", J, "parameter J")->required();
    cmd_reality->add_option("--b", b, "parameter b")->required();
    cmd_reality->add_option("--nev", nev, "number of eigenvalues")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    Output out{out_path, format, join_args(argc, argv, rtol)};
    ShotOptions shot;
    shot.rtol = rtol;

    try {
        if (cmd_sectors->parsed()) {
            std::ostringstream os;
            os << "# " << out.invocation << "\n";
            os << "j,center_angle,half_width\n";
            for (const auto& s : stokes_sectors(sectors_d))
                os << s.j << ',' << sci17(s.center_angle) << ',' << sci17(s.half_width) << "\n";
            out.emit(os.str());
        } else if (cmd_eig->parsed()) {
            Problem pb = family_problem(family, a, b, c, J, potential, rays);
            validate_problem(pb);
            std::vector<EigenRecord> rows;
            if (!range_s.empty()) {
                auto [lo, hi] = parse_range(range_s);
                RealEigOptions reo;
                reo.shot = shot;
                auto eigs = real_eigenvalues(pb, lo, hi, grid, reo);
                for (size_t i = 0; i < eigs.size(); ++i) {
                    EigenRecord r;
                    r.family = pb.family_name;
                    r.params = pb.params;
                    r.lambda = eigs[i];
                    r.index = static_cast<int>(i);
                    r.method = "real-scan";
                    rows.push_back(r);
                }
            } else if (!box_s.empty()) {
                BoxOptions bo;
                bo.shot = shot;
                auto eigs = complex_eigenvalues_box(pb, parse_box(box_s), 40, bo);
                for (size_t i = 0; i < eigs.size(); ++i) {
                    EigenRecord r;
                    r.family = pb.family_name;
                    r.params = pb.params;
                    r.lambda = eigs[i];
                    r.index = static_cast<int>(i);
                    r.method = "box-count";
                    rows.push_back(r);
                }
            } else {
                throw InvalidParams("eig needs --range or --box");
            }
            if (format == "json") {
                out.emit(eigen_json(rows, out.invocation));
            } else {
                std::ostringstream os;
                write_eigen_csv(os, rows, out.invocation);
                out.emit(os.str());
            }
        } else if (cmd_det->parsed()) {
            Problem pb = family_problem(family, a, b, c, J, potential, rays);
            validate_problem(pb);
            std::ostringstream os;
            os << "# " << out.invocation << "\n";
            if (want_real) {
                double f = determinant_real(pb, pb.mu_of_lambda(lambda_re).real(), shot);
                os << "F_real\n" << sci17(f) << "\n";
            } else {
                Cplx f = determinant(pb, pb.mu_of_lambda(Cplx(lambda_re, lambda_im)), shot);
                os << "F_re,F_im,abs\n"
                   << sci17(f.real()) << ',' << sci17(f.imag()) << ',' << sci17(std::abs(f)) << "\n";
            }
            out.emit(os.str());
        } else if (cmd_trace->parsed()) {
            auto [lo, hi] = parse_range(range_s);
            std::vector<CurveTrace> traces;
            if (family == "cubic-pt") {
                GammaOptions go;
                go.shot = shot;
                traces.push_back(trace_gamma_cubic(n, lo, hi, step, go));
            } else if (family == "quartic-i") {
                SectionOptions so;
                so.shot = shot;
                traces = section_sn(a, nmax, lo, hi, step, so);
            } else if (family == "quartic-ii") {
                int nn = static_cast<int>(std::lround(J)) - 1;
                if (full) {
                    for (int mm = 0; mm <= nn / 2; ++mm)
                        traces.push_back(trace_gamma_nm(nn, mm, lo, hi, step, {}));
                    // non-QES branches continue from the large-b end
                    SpectralPoly sp = spectral_poly(nn, Cplx(hi));
                    auto qlam = roots(sp.Q);
                    Problem pbh = make_quartic_ii(hi, J);
                    RealEigOptions reo;
                    reo.shot = shot;
                    auto eigs = real_eigenvalues(pbh, -hi * hi - 2.0 * std::abs(J) - 12.0,
                                                 40.0, 800, reo);
                    int taken = 0;
                    for (double ev : eigs) {
                        bool qes = false;
                        for (const auto& ql : qlam)
                            if (std::abs(ev - ql) < 1e-5 * (1.0 + std::abs(ql))) qes = true;
                        if (qes || taken >= nmax) continue;
                        ++taken;
                        HFun H = [shot, J](double bb, double lam) {
                            Problem pb = make_quartic_ii(bb, J);
                            return determinant_real(pb, lam, shot);
                        };
                        TraceBounds bounds{lo, hi, -hi * hi - 40.0, 80.0};
                        CurveTrace tr = trace(H, hi - 1e-3, ev, step, bounds, 20000, {});
                        tr.branch = "NonQES_" + std::to_string(taken - 1);
                        traces.push_back(std::move(tr));
                    }
                } else {
                    int mm = m >= 0 ? m : 0;
                    traces.push_back(trace_gamma_nm(nn, mm, lo, hi, step, {}));
                }
            } else {
                throw InvalidParams("trace supports cubic-pt, quartic-i, quartic-ii");
            }
            if (format == "json") {
                out.emit(trace_json(traces, out.invocation));
            } else {
                std::ostringstream os;
                write_trace_csv(os, traces, out.invocation);
                out.emit(os.str());
            }
        } else if (cmd_qes->parsed()) {
            auto pts = qes_points(n, Cplx(b));
            if (format == "json") {
                out.emit(qes_json(pts, out.invocation));
            } else {
                std::ostringstream os;
                write_qes_csv(os, pts, out.invocation);
                SpectralPoly sp = spectral_poly(n, Cplx(b));
                os << "# Q coefficients (ascending):";
                for (int k = 0; k <= sp.Q.degree(); ++k) os << ' ' << sci17(sp.Q.coeff(k).real());
                os << "\n";
                for (const auto& pt : pts) {
                    if (pt.degenerate) {
                        os << "# lambda=" << sci17(pt.lambda.real()) << " degenerate\n";
                        continue;
                    }
                    auto rep = equivalence_check(pt.p, Cplx(b));
                    os << "# lambda=" << sci17(pt.lambda.real())
                       << " div=" << sci17(rep.div_norm)
                       << " residue=" << sci17(rep.max_residue)
                       << " bethe=" << sci17(rep.bethe_residual) << "\n";
                }
                out.emit(os.str());
            }
        } else if (cmd_bethe->parsed()) {
            std::vector<std::vector<Cplx>> sols;
            if (seeds_mode == "circle") {
                sols.push_back(bethe_solve(n, Cplx(b), bethe_seeds_circle(n)));
            } else {
                for (const auto& pt : qes_points(n, Cplx(b)))
                    if (!pt.degenerate)
                        sols.push_back(bethe_solve(n, Cplx(b), bethe_seeds_from_point(pt)));
            }
            std::ostringstream os;
            os << "# " << out.invocation << "\n";
            os << "solution,root_re,root_im,residual\n";
            for (size_t s = 0; s < sols.size(); ++s) {
                for (const auto& z : sols[s]) {
                    Cplx r = z * z - b;
                    for (const auto& w : sols[s])
                        if (w != z) r += 1.0 / (z - w);
                    os << s << ',' << sci17(z.real()) << ',' << sci17(z.imag()) << ','
                       << sci17(std::abs(r)) << "\n";
                }
            }
            out.emit(os.str());
        } else if (cmd_darboux->parsed()) {
            DarbouxResult res = darboux(n, Cplx(b));
            out.emit(darboux_json(res, out.invocation));
        } else if (cmd_cross->parsed()) {
            CrossingOptions co;
            co.shot = shot;
            auto rows = level_crossings(static_cast<int>(std::lround(J)), bmin, kmax, co);
            if (format == "json") {
                out.emit(crossings_json(rows, out.invocation));
            } else {
                std::ostringstream os;
                write_crossings_csv(os, rows, out.invocation);
                out.emit(os.str());
            }
        } else if (cmd_reality->parsed()) {
            RealityReport rep = reality_check(b, J, nev, shot);
            std::ostringstream os;
            os << "# " << out.invocation << "\n";
            os << "# certified=" << (rep.certified ? 1 : 0)
               << " max_im=" << sci17(rep.max_im) << " n_checked=" << rep.n_checked << "\n";
            os << "lambda_re,lambda_im,is_qes\n";
            for (const auto& r : rep.rows)
                os << sci17(r.lambda.real()) << ',' << sci17(r.lambda.imag()) << ','
                   << (r.is_qes ? 1 : 0) << "\n";
            out.emit(os.str());
        }
    } catch (const InvalidParams& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
