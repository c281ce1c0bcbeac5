#ifndef TKIT_BASELINE_HPP
#define TKIT_BASELINE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tkit/dataset.hpp"
#include "tkit/errors.hpp"
#include "tkit/kernel.hpp"
#include "tkit/pvalues.hpp"
#include "tkit/smoothing.hpp"

namespace tkit {

struct SearchConfig {
    std::size_t grid_points = 512;
    double refine_tol = 1e-8;
};

enum class TauRegime { Dose, Smoothed };

struct TauFit {
    double tau_hat = 0.0;
    // (tau, objective) over the coarse grid.
    std::vector<std::pair<double, double>> objective_trace;
};

namespace detail {

// Coarse grid scan followed by golden-section refinement in the cell around
// the best grid point. g is smooth but can be multimodal in noisy small
// samples; the grid locates the global basin, golden-section polishes it.
// Grid ties resolve to the smallest argument.
inline TauFit minimize_scalar(const std::function<double(double)>& g, double lo, double hi,
                              const SearchConfig& cfg) {
    TauFit out;
    if (!(hi > lo)) {
        out.tau_hat = lo;
        out.objective_trace.emplace_back(lo, g(lo));
        return out;
    }
    const std::size_t npts = std::max<std::size_t>(cfg.grid_points, 2);
    const double step = (hi - lo) / static_cast<double>(npts - 1);

    out.objective_trace.reserve(npts);
    std::size_t best_k = 0;
    double best_val = 0.0;
    for (std::size_t k = 0; k < npts; ++k) {
        const double t = lo + step * static_cast<double>(k);
        const double v = g(t);
        out.objective_trace.emplace_back(t, v);
        if (k == 0 || v < best_val) {
            best_val = v;
            best_k = k;
        }
    }

    double a = out.objective_trace[best_k > 0 ? best_k - 1 : 0].first;
    double b = out.objective_trace[std::min(best_k + 1, npts - 1)].first;
    constexpr double invphi = 0.6180339887498948482;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = g(x1), f2 = g(x2);
    while (b - a > cfg.refine_tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = g(x2);
        }
    }
    // Strict improvement only: a flat objective keeps the smallest grid tau.
    const double mid = 0.5 * (a + b);
    out.tau_hat = g(mid) < best_val ? mid : out.objective_trace[best_k].first;
    return out;
}

inline double variance_pad(const VarianceModel& variance) {
    if (variance.kind == VarianceModel::Kind::None || variance.values.empty()) return 0.0;
    double s = 0.0;
    for (double v : variance.values) s += v;
    return 3.0 * s / static_cast<double>(variance.values.size());
}

}  // namespace detail

// Average of the raw responses with X_i <= eta; valid whenever the threshold
// can safely be assumed to lie beyond eta.
inline double tau_interval_average(const DoseDataset& data, double eta) {
    double s = 0.0;
    std::size_t count = 0;
    for (const auto& grp : data.groups) {
        if (grp.x > eta) break;
        for (double y : grp.ys) s += y;
        count += grp.size();
    }
    if (count == 0) throw NoDataInInterval(eta);
    return s / static_cast<double>(count);
}

// Baseline estimate from the p-values themselves: tau_hat minimizes
// g(tau) = sum_i (p_i(tau) - 1/2)^2 -- only at the true baseline do the
// p-values hover around 1/2 on a substantial stretch. The search covers the
// group-mean range, padded by three sigma when a variance estimate exists.
inline TauFit tau_pvalue_fit(const DoseDataset& data, TauRegime regime,
                             const VarianceModel& variance,
                             const std::optional<KernelSpec>& kernel = {},
                             const SearchConfig& search = {}) {
    const std::size_t g = data.n_groups();
    if (g == 0) throw EmptyInput();
    if (variance.kind != VarianceModel::Kind::None && variance.values.size() != g)
        throw std::invalid_argument("variance model does not match the dataset");

    const auto ybars = data.group_means();
    const double pad = detail::variance_pad(variance);
    const double lo = *std::min_element(ybars.begin(), ybars.end()) - pad;
    const double hi = *std::max_element(ybars.begin(), ybars.end()) + pad;

    std::function<double(double)> objective;
    if (regime == TauRegime::Dose) {
        std::vector<double> root_m(g);
        for (std::size_t i = 0; i < g; ++i)
            root_m[i] = std::sqrt(static_cast<double>(data.groups[i].size()));
        objective = [&, root_m, ybars](double tau) {
            double acc = 0.0;
            for (std::size_t i = 0; i < g; ++i) {
                const double z = detail::upper_p(root_m[i] * (ybars[i] - tau), variance.at(i));
                acc += (z - 0.5) * (z - 0.5);
            }
            return acc;
        };
    } else {
        if (!kernel) throw std::invalid_argument("smoothed-regime tau fit needs a kernel");
        const SmoothEstimate sm(data, *kernel);
        const double rate = std::sqrt(static_cast<double>(g) * kernel->bandwidth);
        const bool normalized = variance.kind != VarianceModel::Kind::None;
        std::vector<double> mu(g), denom(g, 1.0);
        for (std::size_t i = 0; i < g; ++i) {
            const NwEval e = sm.mu_and_f(data.groups[i].x);
            mu[i] = e.mu;
            if (normalized) {
                if (e.f <= 0.0) throw ZeroDensity(data.groups[i].x);
                const double m_i = static_cast<double>(data.groups[i].size());
                denom[i] = variance.at(i) * std::sqrt(kernel->k2bar / (m_i * e.f));
            }
        }
        objective = [&, mu, denom, rate](double tau) {
            double acc = 0.0;
            for (std::size_t i = 0; i < g; ++i) {
                const double z = detail::upper_p(rate * (mu[i] - tau), denom[i]);
                acc += (z - 0.5) * (z - 0.5);
            }
            return acc;
        };
    }

    return detail::minimize_scalar(objective, lo, hi, search);
}

}  // namespace tkit

#endif  // TKIT_BASELINE_HPP
