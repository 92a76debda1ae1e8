#include "specloc/io.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace specloc {

std::string sci17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

void write_trace_csv(std::ostream& os, const std::vector<CurveTrace>& traces,
                     const std::string& invocation) {
    os << "# " << invocation << "\n";
    os << "branch,point_index,arclength,param1,lambda,residual\n";
    for (const auto& tr : traces) {
        for (size_t i = 0; i < tr.pts.size(); ++i) {
            const auto& p = tr.pts[i];
            os << tr.branch << ',' << i << ',' << sci17(p.s) << ',' << sci17(p.x)
               << ',' << sci17(p.lambda) << ',' << sci17(p.resid) << "\n";
        }
    }
}

std::vector<CurveTrace> parse_trace_csv(std::istream& is) {
    std::vector<CurveTrace> out;
    std::map<std::string, size_t> index;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("branch,", 0) == 0) continue;
        auto f = split_csv(line);
        if (f.size() != 6) continue;
        const std::string& br = f[0];
        if (!index.count(br)) {
            index[br] = out.size();
            out.push_back(CurveTrace{});
            out.back().branch = br;
        }
        TracePoint p;
        p.s = std::stod(f[2]);
        p.x = std::stod(f[3]);
        p.lambda = std::stod(f[4]);
        p.resid = std::stod(f[5]);
        out[index[br]].pts.push_back(p);
    }
    return out;
}

void write_qes_csv(std::ostream& os, const std::vector<QESPoint>& pts,
                   const std::string& invocation) {
    os << "# " << invocation << "\n";
    os << "n,b,lambda_re,lambda_im,p_coeffs...\n";
    for (const auto& pt : pts) {
        os << pt.n << ',' << sci17(pt.b.real()) << ',' << sci17(pt.lambda.real())
           << ',' << sci17(pt.lambda.imag());
        for (int k = 0; k <= pt.p.degree(); ++k)
            os << ',' << sci17(pt.p.coeff(k).real()) << ',' << sci17(pt.p.coeff(k).imag());
        os << "\n";
    }
}

std::vector<QESPoint> parse_qes_csv(std::istream& is) {
    std::vector<QESPoint> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("n,", 0) == 0) continue;
        auto f = split_csv(line);
        if (f.size() < 4) continue;
        QESPoint pt;
        pt.n = std::stoi(f[0]);
        pt.b = std::stod(f[1]);
        pt.lambda = Cplx(std::stod(f[2]), std::stod(f[3]));
        std::vector<Cplx> coeffs;
        for (size_t i = 4; i + 1 < f.size(); i += 2)
            coeffs.emplace_back(std::stod(f[i]), std::stod(f[i + 1]));
        pt.p = CPoly(std::move(coeffs));
        if (pt.p.degree() >= 1) pt.roots = roots(pt.p);
        out.push_back(std::move(pt));
    }
    return out;
}

void write_crossings_csv(std::ostream& os, const std::vector<CrossingRow>& rows,
                         const std::string& invocation) {
    os << "# " << invocation << "\n";
    os << "k,b_k,lambda_k,b_asym,ratio\n";
    for (const auto& r : rows)
        os << r.k << ',' << sci17(r.b_k) << ',' << sci17(r.lambda_k) << ','
           << sci17(r.b_asym) << ',' << sci17(r.ratio) << "\n";
}

std::vector<CrossingRow> parse_crossings_csv(std::istream& is) {
    std::vector<CrossingRow> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("k,", 0) == 0) continue;
        auto f = split_csv(line);
        if (f.size() != 5) continue;
        CrossingRow r;
        r.k = std::stoi(f[0]);
        r.b_k = std::stod(f[1]);
        r.lambda_k = std::stod(f[2]);
        r.b_asym = std::stod(f[3]);
        r.ratio = std::stod(f[4]);
        out.push_back(r);
    }
    return out;
}

void write_eigen_csv(std::ostream& os, const std::vector<EigenRecord>& rows,
                     const std::string& invocation) {
    os << "# " << invocation << "\n";
    os << "index,lambda_re,lambda_im,n_real_zeros,n_nonreal_zeros,method\n";
    for (const auto& r : rows)
        os << r.index << ',' << sci17(r.lambda.real()) << ',' << sci17(r.lambda.imag())
           << ',' << r.n_real_zeros << ',' << r.n_nonreal_zeros << ',' << r.method << "\n";
}

namespace {

nlohmann::json trace_to_json(const CurveTrace& tr) {
    nlohmann::json j;
    j["branch"] = tr.branch;
    j["closed"] = tr.closed;
    j["points"] = nlohmann::json::array();
    for (const auto& p : tr.pts)
        j["points"].push_back({{"s", p.s}, {"param1", p.x}, {"lambda", p.lambda},
                               {"residual", p.resid}});
    j["turning_indices"] = tr.turning_indices;
    j["singular_events"] = nlohmann::json::array();
    for (const auto& e : tr.singular_events)
        j["singular_events"].push_back({{"param1", e.first}, {"lambda", e.second}});
    return j;
}

} // namespace

std::string trace_json(const std::vector<CurveTrace>& traces, const std::string& invocation) {
    nlohmann::json j;
    j["invocation"] = invocation;
    j["traces"] = nlohmann::json::array();
    for (const auto& tr : traces) j["traces"].push_back(trace_to_json(tr));
    return j.dump(2);
}

std::string qes_json(const std::vector<QESPoint>& pts, const std::string& invocation) {
    nlohmann::json j;
    j["invocation"] = invocation;
    j["points"] = nlohmann::json::array();
    for (const auto& pt : pts) {
        nlohmann::json e;
        e["n"] = pt.n;
        e["b"] = pt.b.real();
        e["lambda"] = {pt.lambda.real(), pt.lambda.imag()};
        e["degenerate"] = pt.degenerate;
        e["p"] = nlohmann::json::array();
        for (int k = 0; k <= pt.p.degree(); ++k)
            e["p"].push_back({pt.p.coeff(k).real(), pt.p.coeff(k).imag()});
        e["roots"] = nlohmann::json::array();
        for (const auto& r : pt.roots) e["roots"].push_back({r.real(), r.imag()});
        j["points"].push_back(e);
    }
    return j.dump(2);
}

std::string crossings_json(const std::vector<CrossingRow>& rows, const std::string& invocation) {
    nlohmann::json j;
    j["invocation"] = invocation;
    j["crossings"] = nlohmann::json::array();
    for (const auto& r : rows)
        j["crossings"].push_back({{"k", r.k}, {"b_k", r.b_k}, {"lambda_k", r.lambda_k},
                                  {"b_asym", r.b_asym}, {"ratio", r.ratio}});
    return j.dump(2);
}

std::string eigen_json(const std::vector<EigenRecord>& rows, const std::string& invocation) {
    nlohmann::json j;
    j["invocation"] = invocation;
    j["eigenvalues"] = nlohmann::json::array();
    for (const auto& r : rows)
        j["eigenvalues"].push_back({{"index", r.index},
                                    {"lambda", {r.lambda.real(), r.lambda.imag()}},
                                    {"n_real_zeros", r.n_real_zeros},
                                    {"n_nonreal_zeros", r.n_nonreal_zeros},
                                    {"method", r.method}});
    return j.dump(2);
}

std::string darboux_json(const DarbouxResult& res, const std::string& invocation) {
    nlohmann::json j;
    j["invocation"] = invocation;
    j["W_poly"] = nlohmann::json::array();
    for (int k = 0; k <= res.W_poly.degree(); ++k)
        j["W_poly"].push_back({res.W_poly.coeff(k).real(), res.W_poly.coeff(k).imag()});
    j["V_new"] = nlohmann::json::array();
    for (int k = 0; k <= res.V_new.degree(); ++k)
        j["V_new"].push_back({res.V_new.coeff(k).real(), res.V_new.coeff(k).imag()});
    j["shift"] = {res.shift.real(), res.shift.imag()};
    j["deviation"] = res.deviation;
    return j.dump(2);
}

} // namespace specloc
