#ifndef TKIT_NORMAL_HPP
#define TKIT_NORMAL_HPP

#include <cmath>
#include <limits>

namespace tkit {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2*pi)
inline constexpr double kInvSqrt2 = 0.7071067811865475244;    // 1/sqrt(2)

// Standard normal CDF via the complementary error function.
// |z| > 38 is clamped to {0,1}: the true tail mass there is below 1e-300
// and erfc would underflow anyway.
inline double normal_cdf(double z) {
    if (std::isnan(z)) return std::numeric_limits<double>::quiet_NaN();
    if (z < -38.0) return 0.0;
    if (z > 38.0) return 1.0;
    return 0.5 * std::erfc(-z * kInvSqrt2);
}

inline double normal_pdf(double z) {
    return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

}  // namespace tkit

#endif  // TKIT_NORMAL_HPP
