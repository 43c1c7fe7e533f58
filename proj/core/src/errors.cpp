#include "tdc/errors.hpp"

namespace tdc {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::Dimension: return "dimension mismatch";
    case ErrorKind::Singular: return "singular matrix";
    case ErrorKind::Configuration: return "configuration error";
    case ErrorKind::WrongCase: return "wrong synthesis case";
    case ErrorKind::NoFreedom: return "no design freedom";
    case ErrorKind::Inconsistent: return "synthesis inconsistency";
    case ErrorKind::Unsupported: return "unsupported case";
    case ErrorKind::Ordering: return "delay ordering violation";
    case ErrorKind::Extraction: return "gain extraction failed";
    case ErrorKind::NoFeasibleStart: return "no feasible start";
    case ErrorKind::Internal: return "internal error";
    }
    return "unknown error";
}

} // namespace tdc
