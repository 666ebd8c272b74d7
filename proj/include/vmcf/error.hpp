#ifndef VMCF_ERROR_HPP
#define VMCF_ERROR_HPP

#include <stdexcept>
#include <string>

namespace vmcf {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define VMCF_DEFINE_ERROR(Name)                                     \
    struct Name : Error {                                           \
        explicit Name(const std::string& msg) : Error(std::string(#Name) + ": " + msg) {} \
    }

VMCF_DEFINE_ERROR(NonFinite);
VMCF_DEFINE_ERROR(StepUnderflow);
VMCF_DEFINE_ERROR(SingularEndpoint);
VMCF_DEFINE_ERROR(IllConditioned);
VMCF_DEFINE_ERROR(TooFewNodes);
VMCF_DEFINE_ERROR(GridMismatch);
VMCF_DEFINE_ERROR(InvariantViolation);
VMCF_DEFINE_ERROR(MissingLayer);
VMCF_DEFINE_ERROR(MissingTailCoefficient);
VMCF_DEFINE_ERROR(SingularMatchingSystem);
VMCF_DEFINE_ERROR(InsufficientSmoothness);
VMCF_DEFINE_ERROR(DivisionNearZero);
VMCF_DEFINE_ERROR(RegionGap);
VMCF_DEFINE_ERROR(HyperbolicityLoss);
VMCF_DEFINE_ERROR(PositivityLoss);
VMCF_DEFINE_ERROR(CflViolation);
VMCF_DEFINE_ERROR(ParseError);

#undef VMCF_DEFINE_ERROR

} // namespace vmcf

#endif
