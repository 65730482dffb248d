#pragma once

#include <string>

namespace mmdscan {

enum class KernelKind { gaussian, laplace };

const char* kernel_kind_name(KernelKind kind);
KernelKind kernel_kind_from_name(const std::string& name);

// Bounded symmetric similarity kernel on scalar observations.
// Values satisfy 0 <= k(x,y) <= bound(), k(x,y) = k(y,x) and k(x,x) = bound().
// Both built-in kernels have bound 1; the bound is stored explicitly so that
// formulas containing the square of the bound stay correct for other kernels.
class Kernel {
public:
    static Kernel gaussian(double sigma);
    static Kernel laplace(double sigma);
    static Kernel make(KernelKind kind, double sigma);

    // Checked evaluation; rejects non-finite inputs.
    double evaluate(double x, double y) const;

    // Hot-path evaluation for inputs already validated as finite.
    double evaluate_unchecked(double x, double y) const;

    KernelKind kind() const { return kind_; }
    double bandwidth() const { return sigma_; }
    double bound() const { return bound_; }

private:
    Kernel(KernelKind kind, double sigma, double bound);

    KernelKind kind_;
    double sigma_;
    double bound_;
};

}  // namespace mmdscan
