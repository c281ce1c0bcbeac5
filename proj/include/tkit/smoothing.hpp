#ifndef TKIT_SMOOTHING_HPP
#define TKIT_SMOOTHING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tkit/dataset.hpp"
#include "tkit/errors.hpp"
#include "tkit/kernel.hpp"

namespace tkit {

struct NwEval {
    double mu = 0.0;
    double f = 0.0;
};

// Nadaraya-Watson machinery over the group means:
//   mu_hat(x) = sum_i Ybar_i K((x-X_i)/h) / sum_i K((x-X_i)/h)
//   f_hat(x)  = (n h)^-1 sum_i K((x-X_i)/h)
// Each dose enters with unit weight regardless of its replicate count;
// replicate-count weighting would change the limit variance V^2(x).
class SmoothEstimate {
public:
    SmoothEstimate(const DoseDataset& data, const KernelSpec& kernel)
        : xs_(data.xs()), ybars_(data.group_means()), kernel_(kernel) {
        if (xs_.empty()) throw EmptyInput();
    }

    const KernelSpec& kernel() const { return kernel_; }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ybars() const { return ybars_; }

    NwEval mu_and_f(double x) const {
        auto [num, den] = weighted_sums(x, ybars_.data());
        if (den == 0.0) throw ZeroKernelMass(x);
        const double n = static_cast<double>(xs_.size());
        return NwEval{num / den, den / (n * kernel_.bandwidth)};
    }

    double mu(double x) const { return mu_and_f(x).mu; }
    double f(double x) const { return mu_and_f(x).f; }

    // NW-smooth of arbitrary per-group values, e.g. squared residuals.
    double smooth(const std::vector<double>& values, double x) const {
        auto [num, den] = weighted_sums(x, values.data());
        if (den == 0.0) throw ZeroKernelMass(x);
        return num / den;
    }

private:
    // Kernel sums restricted to the window where K is nonzero; the groups
    // are sorted so the window is a contiguous index range. Summation runs
    // left to right, which keeps results independent of the call site.
    std::pair<double, double> weighted_sums(double x, const double* vals) const {
        const double h = kernel_.bandwidth;
        const double radius = kernel_support_radius(kernel_.family) * h;
        auto lo = std::lower_bound(xs_.begin(), xs_.end(), x - radius);
        auto hi = std::upper_bound(lo, xs_.end(), x + radius);
        double num = 0.0, den = 0.0;
        for (auto it = lo; it != hi; ++it) {
            const double w = kernel_eval(kernel_, (x - *it) / h);
            den += w;
            num += w * vals[static_cast<std::size_t>(it - xs_.begin())];
        }
        return {num, den};
    }

    std::vector<double> xs_;
    std::vector<double> ybars_;
    KernelSpec kernel_;
};

inline NwEval nw_estimate(const DoseDataset& data, const KernelSpec& kernel, double x) {
    return SmoothEstimate(data, kernel).mu_and_f(x);
}

inline VarianceModel variance_estimate(const DoseDataset& data, VarianceModel::Kind kind,
                                       const std::optional<KernelSpec>& kernel = {}) {
    using Kind = VarianceModel::Kind;
    const std::size_t g = data.n_groups();
    VarianceModel out;
    out.kind = kind;

    switch (kind) {
        case Kind::None:
            return VarianceModel::none();

        case Kind::PooledHomoscedastic: {
            double ss = 0.0;
            std::size_t total = 0;
            for (const auto& grp : data.groups) {
                if (grp.size() < 2)
                    throw InsufficientReplicates(
                        "pooled variance needs at least 2 replicates per dose");
                const double m = grp.mean();
                for (double y : grp.ys) ss += (y - m) * (y - m);
                total += grp.size();
            }
            const double sigma = std::sqrt(ss / static_cast<double>(total - g));
            out.values.assign(g, sigma);
            return out;
        }

        case Kind::PerDose: {
            out.values.reserve(g);
            for (const auto& grp : data.groups) {
                if (grp.size() < 2)
                    throw InsufficientReplicates(
                        "per-dose variance needs at least 2 replicates per dose");
                const double m = grp.mean();
                double ss = 0.0;
                for (double y : grp.ys) ss += (y - m) * (y - m);
                out.values.push_back(std::sqrt(ss / static_cast<double>(grp.size() - 1)));
            }
            return out;
        }

        case Kind::SmoothedResiduals: {
            if (!kernel)
                throw std::invalid_argument("smoothed-residual variance needs a kernel");
            SmoothEstimate sm(data, *kernel);
            std::vector<double> z(g);
            for (std::size_t i = 0; i < g; ++i) {
                const double r = data.groups[i].mean() - sm.mu(data.groups[i].x);
                z[i] = static_cast<double>(data.groups[i].size()) * r * r;
            }
            out.values.reserve(g);
            for (std::size_t i = 0; i < g; ++i) {
                const double s2 = std::max(0.0, sm.smooth(z, data.groups[i].x));
                out.values.push_back(std::sqrt(s2));
            }
            return out;
        }
    }
    throw std::invalid_argument("unknown variance kind");
}

struct CvResult {
    double h_star = 0.0;
    // (h, leave-one-out score); score is +inf where some held-out point had
    // no kernel mass.
    std::vector<std::pair<double, double>> scores;
};

// Leave-one-out bandwidth selection on the group means: the score of h is
// sum_i (Ybar_i - mu_hat_{-i}(X_i))^2. Ties pick the smallest h.
inline CvResult cv_bandwidth(const DoseDataset& data, KernelFamily family,
                             const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("bandwidth grid is empty");
    if (data.n_groups() < 3)
        throw std::invalid_argument("cross-validation needs at least 3 dose groups");
    for (double h : grid)
        if (!(h > 0.0)) throw std::invalid_argument("bandwidths must be positive");

    const auto xs = data.xs();
    const auto ybars = data.group_means();
    const std::size_t n = xs.size();
    const double inf = std::numeric_limits<double>::infinity();

    CvResult result;
    result.scores.reserve(grid.size());
    for (double h : grid) {
        const KernelSpec spec(family, h);
        const double radius = kernel_support_radius(family) * h;
        double score = 0.0;
        bool degenerate = false;
        for (std::size_t i = 0; i < n && !degenerate; ++i) {
            const double x = xs[i];
            auto lo = std::lower_bound(xs.begin(), xs.end(), x - radius);
            auto hi = std::upper_bound(lo, xs.end(), x + radius);
            double num = 0.0, den = 0.0;
            for (auto it = lo; it != hi; ++it) {
                const std::size_t j = static_cast<std::size_t>(it - xs.begin());
                if (j == i) continue;
                const double w = kernel_eval(spec, (x - *it) / h);
                den += w;
                num += w * ybars[j];
            }
            if (den == 0.0) {
                degenerate = true;
            } else {
                const double e = ybars[i] - num / den;
                score += e * e;
            }
        }
        result.scores.emplace_back(h, degenerate ? inf : score);
    }

    double best_score = inf;
    double best_h = 0.0;
    bool found = false;
    for (const auto& [h, s] : result.scores) {
        if (s == inf) continue;
        if (!found || s < best_score || (s == best_score && h < best_h)) {
            best_score = s;
            best_h = h;
            found = true;
        }
    }
    if (!found) throw AllBandwidthsDegenerate();
    result.h_star = best_h;
    return result;
}

// h = c * n^(-1/(2p+1)) for a cusp of order p.
inline double bandwidth_rule(double c, std::size_t n, int cusp_order) {
    if (!(c > 0.0)) throw std::invalid_argument("bandwidth constant must be positive");
    if (n < 1) throw std::invalid_argument("sample size must be at least 1");
    if (cusp_order < 1) throw std::invalid_argument("cusp order must be at least 1");
    const double beta = 1.0 / (2.0 * cusp_order + 1.0);
    return c * std::pow(static_cast<double>(n), -beta);
}

}  // namespace tkit

#endif  // TKIT_SMOOTHING_HPP
