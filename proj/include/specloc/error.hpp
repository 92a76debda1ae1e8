#pragma once

#include <stdexcept>
#include <string>

namespace specloc {

// Base class for all contract/numerical failures. `kind()` is a stable
// identifier that the CLI prints on stderr for scripted matching.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct NonConvergence : Error {
    explicit NonConvergence(const std::string& m) : Error("NonConvergence", m) {}
};
struct RootNotSimple : Error {
    explicit RootNotSimple(const std::string& m) : Error("RootNotSimple", m) {}
};
struct RadiusTooLarge : Error {
    explicit RadiusTooLarge(const std::string& m) : Error("RadiusTooLarge", m) {}
};
struct NoSolution : Error {
    NoSolution(const std::string& m, double resid)
        : Error("NoSolution", m), residual(resid) {}
    double residual;
};
struct InvalidParams : Error {
    explicit InvalidParams(const std::string& m) : Error("InvalidParams", m) {}
};
struct AdjacentSectors : Error {
    explicit AdjacentSectors(const std::string& m) : Error("AdjacentSectors", m) {}
};
struct NotNormalized : Error {
    explicit NotNormalized(const std::string& m) : Error("NotNormalized", m) {}
};
struct RayNotRecessive : Error {
    explicit RayNotRecessive(const std::string& m) : Error("RayNotRecessive", m) {}
};
struct BranchAmbiguous : Error {
    explicit BranchAmbiguous(const std::string& m) : Error("BranchAmbiguous", m) {}
};
struct StepFailure : Error {
    explicit StepFailure(const std::string& m) : Error("StepFailure", m) {}
};
struct NotSymmetric : Error {
    explicit NotSymmetric(const std::string& m) : Error("NotSymmetric", m) {}
};
struct ContourThroughZero : Error {
    explicit ContourThroughZero(const std::string& m) : Error("ContourThroughZero", m) {}
};
struct SubdivisionLimit : Error {
    explicit SubdivisionLimit(const std::string& m) : Error("SubdivisionLimit", m) {}
};
struct BoundaryZero : Error {
    explicit BoundaryZero(const std::string& m) : Error("BoundaryZero", m) {}
};
struct SingularPoint : Error {
    SingularPoint(const std::string& m, double x_, double lambda_)
        : Error("SingularPoint", m), x(x_), lambda(lambda_) {}
    double x, lambda;
};
struct CorrectorDiverged : Error {
    explicit CorrectorDiverged(const std::string& m) : Error("CorrectorDiverged", m) {}
};
struct Collision : Error {
    explicit Collision(const std::string& m) : Error("Collision", m) {}
};
struct DegenerateEigenvalue : Error {
    explicit DegenerateEigenvalue(const std::string& m) : Error("DegenerateEigenvalue", m) {}
};
struct WronskianNotConstant : Error {
    explicit WronskianNotConstant(const std::string& m) : Error("WronskianNotConstant", m) {}
};
struct BranchTrackingLost : Error {
    explicit BranchTrackingLost(const std::string& m) : Error("BranchTrackingLost", m) {}
};

} // namespace specloc
