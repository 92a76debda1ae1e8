#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "specloc/locus.hpp"
#include "specloc/qes.hpp"
#include "specloc/spectrum.hpp"

namespace specloc {

/// Full-precision scientific formatting (17 significant digits): values
/// round-trip to the identical double.
std::string sci17(double x);

/// Every emitted file starts with one '#' comment line carrying the exact
/// invocation and tolerance set, then a header line, then data rows.
void write_trace_csv(std::ostream& os, const std::vector<CurveTrace>& traces,
                     const std::string& invocation);
std::vector<CurveTrace> parse_trace_csv(std::istream& is);

void write_qes_csv(std::ostream& os, const std::vector<QESPoint>& pts,
                   const std::string& invocation);
std::vector<QESPoint> parse_qes_csv(std::istream& is);

void write_crossings_csv(std::ostream& os, const std::vector<CrossingRow>& rows,
                         const std::string& invocation);
std::vector<CrossingRow> parse_crossings_csv(std::istream& is);

void write_eigen_csv(std::ostream& os, const std::vector<EigenRecord>& rows,
                     const std::string& invocation);

std::string trace_json(const std::vector<CurveTrace>& traces, const std::string& invocation);
std::string qes_json(const std::vector<QESPoint>& pts, const std::string& invocation);
std::string crossings_json(const std::vector<CrossingRow>& rows, const std::string& invocation);
std::string eigen_json(const std::vector<EigenRecord>& rows, const std::string& invocation);
std::string darboux_json(const DarbouxResult& res, const std::string& invocation);

} // namespace specloc
