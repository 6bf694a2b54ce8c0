#pragma once

#include <stdexcept>
#include <string>

namespace slabgreen {

// Domain error carrying a short machine-readable kind tag.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SLABGREEN_ERROR(Name)                                               \
    struct Name : Error {                                                   \
        explicit Name(const std::string& what) : Error(#Name, what) {}      \
    }

SLABGREEN_ERROR(SingularPoint);
SLABGREEN_ERROR(TruncationFailure);
SLABGREEN_ERROR(QuadratureFailure);
SLABGREEN_ERROR(PathDisagreement);
SLABGREEN_ERROR(GridTooCoarse);
SLABGREEN_ERROR(ModeMismatch);
SLABGREEN_ERROR(BallOutsideDomain);
SLABGREEN_ERROR(RadiusTooSmall);
SLABGREEN_ERROR(SupportMismatch);
SLABGREEN_ERROR(DegenerateSample);
SLABGREEN_ERROR(RegimeEmpty);
SLABGREEN_ERROR(NoConvergence);
SLABGREEN_ERROR(BlowUp);
SLABGREEN_ERROR(NotConverged);
SLABGREEN_ERROR(WindowDegenerate);
SLABGREEN_ERROR(ManifestUnreadable);
SLABGREEN_ERROR(InvalidArgument);

#undef SLABGREEN_ERROR

}  // namespace slabgreen
