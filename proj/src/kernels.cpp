#include "mmdscan/kernels.hpp"

#include <cmath>

#include "mmdscan/errors.hpp"

namespace mmdscan {

const char* kernel_kind_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::gaussian: return "gaussian";
        case KernelKind::laplace: return "laplace";
    }
    return "unknown";
}

KernelKind kernel_kind_from_name(const std::string& name) {
    if (name == "gaussian") return KernelKind::gaussian;
    if (name == "laplace") return KernelKind::laplace;
    raise(ErrorCode::invalid_argument, "unknown kernel kind '" + name + "' (expected gaussian or laplace)");
}

Kernel::Kernel(KernelKind kind, double sigma, double bound)
    : kind_(kind), sigma_(sigma), bound_(bound) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        raise(ErrorCode::invalid_argument, "kernel bandwidth must be a positive finite real");
    }
}

Kernel Kernel::gaussian(double sigma) { return Kernel(KernelKind::gaussian, sigma, 1.0); }

Kernel Kernel::laplace(double sigma) { return Kernel(KernelKind::laplace, sigma, 1.0); }

Kernel Kernel::make(KernelKind kind, double sigma) {
    return kind == KernelKind::gaussian ? gaussian(sigma) : laplace(sigma);
}

double Kernel::evaluate(double x, double y) const {
    if (!std::isfinite(x) || !std::isfinite(y)) {
        raise(ErrorCode::invalid_argument, "kernel inputs must be finite");
    }
    return evaluate_unchecked(x, y);
}

double Kernel::evaluate_unchecked(double x, double y) const {
    const double d = x - y;
    if (kind_ == KernelKind::gaussian) {
        return std::exp(-(d * d) / (2.0 * sigma_ * sigma_));
    }
    return std::exp(-std::abs(d) / (2.0 * sigma_));
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::insufficient_samples: return "insufficient_samples";
        case ErrorCode::bounds: return "bounds";
        case ErrorCode::capacity: return "capacity";
        case ErrorCode::io: return "io";
        case ErrorCode::parse: return "parse";
        case ErrorCode::internal: return "internal";
    }
    return "unknown";
}

}  // namespace mmdscan
