#include "vnmeter/error.hpp"

#include <sstream>

namespace vnmeter {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::GridTooCoarse: return "GridTooCoarse";
        case ErrorKind::GridTooNarrow: return "GridTooNarrow";
        case ErrorKind::DegenerateKernel: return "DegenerateKernel";
        case ErrorKind::ZeroCoupling: return "ZeroCoupling";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::AsymmetricCoupling: return "AsymmetricCoupling";
        case ErrorKind::Caustic: return "Caustic";
        case ErrorKind::BoundaryLeak: return "BoundaryLeak";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

namespace {

std::string leak_message(std::size_t step, double time, char axis, double mass, double tolerance) {
    std::ostringstream os;
    os.precision(6);
    os << "boundary mass " << mass << " on axis " << axis << " exceeds " << tolerance
       << " at step " << step << " (t = " << time << ")";
    return os.str();
}

}  // namespace

BoundaryLeakError::BoundaryLeakError(std::size_t step, double time, char axis, double mass,
                                     double tolerance)
    : Error(ErrorKind::BoundaryLeak, leak_message(step, time, axis, mass, tolerance)),
      step_(step),
      time_(time),
      axis_(axis),
      mass_(mass) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace vnmeter
