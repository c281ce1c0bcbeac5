#ifndef TKIT_PVALUES_HPP
#define TKIT_PVALUES_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tkit/dataset.hpp"
#include "tkit/errors.hpp"
#include "tkit/kernel.hpp"
#include "tkit/normal.hpp"
#include "tkit/smoothing.hpp"

namespace tkit {

enum class PValueMethod { DoseReplicates, Smoothed, TimeSeries };

struct PValuePoint {
    double x = 0.0;
    double p = 0.0;
};

// Approximate p-values of H0: mu(x) = tau vs H1: mu(x) > tau, one per dose,
// sorted by x. On the baseline stretch they behave like Uniform(0,1) draws;
// past the threshold they collapse to 0.
struct PValueProfile {
    std::vector<PValuePoint> points;
    PValueMethod method = PValueMethod::DoseReplicates;
    bool normalized = false;
    double tau_used = 0.0;
    std::optional<double> bandwidth_used;
};

namespace detail {

// z -> 1 - Phi(z) with the degenerate-sigma convention: sigma == 0 gives
// z = 0 when the numerator is exactly 0 and z = +-inf otherwise, so p lands
// on {0, 1/2, 1} instead of NaN.
inline double upper_p(double num, double sigma) {
    if (sigma == 0.0) {
        if (num == 0.0) return 0.5;
        return num > 0.0 ? 0.0 : 1.0;
    }
    return 1.0 - normal_cdf(num / sigma);
}

}  // namespace detail

// Replicate-based p-values: p_i = 1 - Phi(sqrt(m_i) (Ybar_i - tau) / sigma_i).
// VarianceModel::Kind::None produces the unnormalized variant (sigma == 1).
inline PValueProfile pvalues_dose(const DoseDataset& data, double tau,
                                  const VarianceModel& variance) {
    using Kind = VarianceModel::Kind;
    if (variance.kind == Kind::SmoothedResiduals)
        throw std::invalid_argument(
            "dose p-values take pooled, per-dose, or no variance normalization");
    if (variance.kind != Kind::None && variance.values.size() != data.n_groups())
        throw std::invalid_argument("variance model does not match the dataset");

    PValueProfile out;
    out.method = PValueMethod::DoseReplicates;
    out.normalized = variance.kind != Kind::None;
    out.tau_used = tau;
    out.points.reserve(data.n_groups());
    for (std::size_t i = 0; i < data.n_groups(); ++i) {
        const auto& grp = data.groups[i];
        const double num = std::sqrt(static_cast<double>(grp.size())) * (grp.mean() - tau);
        out.points.push_back({grp.x, detail::upper_p(num, variance.at(i))});
    }
    return out;
}

// Smoothed p-values at each design point:
//   T_i = sqrt(n h) (mu_hat(X_i) - tau)
//   normalized:   p_i = 1 - Phi(T_i / V_i),  V_i^2 = sigma_i^2 k2bar / (m_i f(X_i))
//   unnormalized: p_i = 1 - Phi(T_i)
// f is the estimated design density f_hat unless known_density is supplied
// (e.g. the true density in a simulation with known variance).
inline PValueProfile pvalues_smooth(
    const DoseDataset& data, double tau, const KernelSpec& kernel,
    const VarianceModel& variance,
    const std::function<double(double)>& known_density = {}) {
    using Kind = VarianceModel::Kind;
    const bool normalized = variance.kind != Kind::None;
    if (normalized && variance.values.size() != data.n_groups())
        throw std::invalid_argument("variance model does not match the dataset");

    const SmoothEstimate sm(data, kernel);
    const double n = static_cast<double>(data.n_groups());
    const double rate = std::sqrt(n * kernel.bandwidth);

    PValueProfile out;
    out.method = PValueMethod::Smoothed;
    out.normalized = normalized;
    out.tau_used = tau;
    out.bandwidth_used = kernel.bandwidth;
    out.points.reserve(data.n_groups());
    for (std::size_t i = 0; i < data.n_groups(); ++i) {
        const double x = data.groups[i].x;
        const NwEval e = sm.mu_and_f(x);
        const double t = rate * (e.mu - tau);
        if (!normalized) {
            out.points.push_back({x, 1.0 - normal_cdf(t)});
            continue;
        }
        if (e.f <= 0.0) throw ZeroDensity(x);
        const double m_i = static_cast<double>(data.groups[i].size());
        const double sigma = variance.at(i);
        const double v = sigma * std::sqrt(kernel.k2bar / (m_i * e.f));
        out.points.push_back({x, detail::upper_p(t, v)});
    }
    return out;
}

// Fixed uniform design x_i = i/n with one response per point:
//   mu_tilde(x) = (n h)^-1 sum_j Y_j K((x - j/n)/h)
//   p_i = 1 - Phi(sqrt(n h) (mu_tilde(x_i) - tau))
// Deliberately unnormalized: normalizing under dependent errors would
// require the autocorrelation function.
inline PValueProfile pvalues_timeseries(const std::vector<double>& y, double tau,
                                        const KernelSpec& kernel) {
    const std::size_t n = y.size();
    if (n < 2) throw std::invalid_argument("time-series p-values need n >= 2");

    const double h = kernel.bandwidth;
    const double nd = static_cast<double>(n);
    const double rate = std::sqrt(nd * h);
    const double radius = kernel_support_radius(kernel.family) * h;

    PValueProfile out;
    out.method = PValueMethod::TimeSeries;
    out.normalized = false;
    out.tau_used = tau;
    out.bandwidth_used = h;
    out.points.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = static_cast<double>(i) / nd;
        const std::size_t j_lo =
            static_cast<std::size_t>(std::max(1.0, std::ceil((x - radius) * nd)));
        const std::size_t j_hi =
            static_cast<std::size_t>(std::min(nd, std::floor((x + radius) * nd)));
        double s = 0.0;
        for (std::size_t j = j_lo; j <= j_hi; ++j) {
            s += y[j - 1] * kernel_eval(kernel, (x - static_cast<double>(j) / nd) / h);
        }
        const double mu = s / (nd * h);
        out.points.push_back({x, 1.0 - normal_cdf(rate * (mu - tau))});
    }
    return out;
}

// Bernoulli responses: the null variance tau(1-tau) replaces the variance
// estimate, so doses with Ybar on {0,1} still produce finite z-scores.
inline PValueProfile pvalues_binary(const DoseDataset& data, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw TauOutOfRange(tau);
    for (std::size_t i = 0; i < data.n_groups(); ++i) {
        for (double y : data.groups[i].ys)
            if (y != 0.0 && y != 1.0) throw NonBinaryResponse(i);
    }

    const double sd = std::sqrt(tau * (1.0 - tau));
    PValueProfile out;
    out.method = PValueMethod::DoseReplicates;
    out.normalized = true;
    out.tau_used = tau;
    out.points.reserve(data.n_groups());
    for (const auto& grp : data.groups) {
        const double num = std::sqrt(static_cast<double>(grp.size())) * (grp.mean() - tau);
        out.points.push_back({grp.x, 1.0 - normal_cdf(num / sd)});
    }
    return out;
}

}  // namespace tkit

#endif  // TKIT_PVALUES_HPP
