#ifndef TKIT_KERNEL_HPP
#define TKIT_KERNEL_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "tkit/normal.hpp"

namespace tkit {

// All three families are symmetric probability densities with either compact
// support or exponentially decaying tails, so kernel-based test statistics
// stay asymptotically normal.
enum class KernelFamily { Gaussian, Epanechnikov, Uniform };

inline const char* kernel_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::Gaussian: return "gaussian";
        case KernelFamily::Epanechnikov: return "epanechnikov";
        case KernelFamily::Uniform: return "uniform";
    }
    return "?";
}

// Roughness constant \int K(u)^2 du of the unscaled kernel.
inline double kernel_k2bar(KernelFamily f) {
    switch (f) {
        case KernelFamily::Gaussian: return 0.28209479177387814347;  // 1/(2*sqrt(pi))
        case KernelFamily::Epanechnikov: return 0.6;                 // 3/5
        case KernelFamily::Uniform: return 0.5;                      // 1/2
    }
    return 0.0;
}

// Smallest radius r with K(u) == 0 (in double precision) for |u| >= r.
// exp(-u^2/2) underflows to exactly 0 past u ~ 38.97, so truncating the
// Gaussian there changes no bits of any kernel sum.
inline double kernel_support_radius(KernelFamily f) {
    return f == KernelFamily::Gaussian ? 39.0 : 1.0;
}

struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    double bandwidth = 1.0;
    double k2bar = kernel_k2bar(KernelFamily::Gaussian);

    KernelSpec() = default;
    KernelSpec(KernelFamily f, double h)
        : family(f), bandwidth(h), k2bar(kernel_k2bar(f)) {
        if (!(h > 0.0) || !std::isfinite(h))
            throw std::invalid_argument("kernel bandwidth must be positive, got " +
                                        std::to_string(h));
    }
};

// Unscaled kernel K(u): the standard density of the family, independent of
// the bandwidth. Sums over data use K((x - X_i)/h).
inline double kernel_eval(const KernelSpec& spec, double u) {
    switch (spec.family) {
        case KernelFamily::Gaussian:
            return normal_pdf(u);
        case KernelFamily::Epanechnikov:
            return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
        case KernelFamily::Uniform:
            return std::abs(u) <= 1.0 ? 0.5 : 0.0;
    }
    return 0.0;
}

}  // namespace tkit

#endif  // TKIT_KERNEL_HPP
