#ifndef TKIT_STUMP_HPP
#define TKIT_STUMP_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tkit/errors.hpp"
#include "tkit/pvalues.hpp"

namespace tkit {

struct StumpLevels {
    double alpha = 0.0;  // left level
    double beta = 0.0;   // right level
};

struct StumpFit {
    double d_hat = 0.0;
    // (candidate d, objective value) for every candidate, in candidate order.
    // The objective is the prefix criterion for fit_stump and the residual
    // sum of squares for fit_stump_adaptive.
    std::vector<std::pair<double, double>> objective_trace;
    std::optional<StumpLevels> levels;
};

namespace detail {

struct SortedProfile {
    std::vector<double> xs;
    std::vector<double> ps;
    double empty_prefix_candidate = 0.0;
};

// The objective only changes at data points, so the candidate set is the
// empty prefix plus each observed x. The empty prefix is labelled 0 when all
// covariates are positive (the canonical [0,1] setting, where d_hat = 0 reads
// as "no baseline stretch detected"); otherwise one unit below the smallest x.
inline SortedProfile sort_profile(const PValueProfile& profile) {
    if (profile.points.empty()) throw EmptyInput();
    SortedProfile s;
    s.xs.reserve(profile.points.size());
    s.ps.reserve(profile.points.size());
    std::vector<std::size_t> order(profile.points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return profile.points[a].x < profile.points[b].x;
    });
    for (std::size_t k : order) {
        s.xs.push_back(profile.points[k].x);
        s.ps.push_back(profile.points[k].p);
    }
    s.empty_prefix_candidate = s.xs.front() > 0.0 ? 0.0 : s.xs.front() - 1.0;
    return s;
}

}  // namespace detail

// Prefix criterion n^-1 sum_{X_i <= d} (p_i - 1/4), a right-continuous step
// function of d.
inline double stump_objective(const PValueProfile& profile, double d) {
    if (profile.points.empty()) throw EmptyInput();
    double s = 0.0;
    for (const auto& pt : profile.points)
        if (pt.x <= d) s += pt.p - 0.25;
    return s / static_cast<double>(profile.points.size());
}

// Break-point of the best least-squares stump with fixed levels (1/2, 0),
// computed through the equivalent prefix-criterion maximization. Ties take
// the smallest candidate: both estimators are right-biased, so the leftmost
// maximizer is the natural representative.
inline StumpFit fit_stump(const PValueProfile& profile) {
    const auto s = detail::sort_profile(profile);
    const std::size_t n = s.xs.size();
    const double nd = static_cast<double>(n);

    StumpFit fit;
    fit.objective_trace.reserve(n + 1);
    fit.objective_trace.emplace_back(s.empty_prefix_candidate, 0.0);
    double prefix = 0.0;
    double best = 0.0;
    std::size_t best_k = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        prefix += s.ps[k - 1] - 0.25;
        const double value = prefix / nd;
        fit.objective_trace.emplace_back(s.xs[k - 1], value);
        if (value > best) {
            best = value;
            best_k = k;
        }
    }
    fit.d_hat = fit.objective_trace[best_k].first;
    return fit;
}

// Stump fit with free levels: for a split at d the optimal levels are the
// side means, so the search reduces to one pass over the candidates.
// An empty side contributes nothing to the SSE; its reported level is the
// other side's mean on the left and 0 on the right (the limit stump's
// right level).
inline StumpFit fit_stump_adaptive(const PValueProfile& profile) {
    if (profile.points.size() < 2)
        throw std::invalid_argument("adaptive stump needs at least 2 points");
    const auto s = detail::sort_profile(profile);
    const std::size_t n = s.xs.size();

    std::vector<double> sum(n + 1, 0.0), sumsq(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        sum[k] = sum[k - 1] + s.ps[k - 1];
        sumsq[k] = sumsq[k - 1] + s.ps[k - 1] * s.ps[k - 1];
    }

    const auto clamp01 = [](double v) { return std::min(1.0, std::max(0.0, v)); };

    StumpFit fit;
    fit.objective_trace.reserve(n + 1);
    double best_sse = 0.0;
    std::size_t best_k = 0;
    StumpLevels best_levels;
    for (std::size_t k = 0; k <= n; ++k) {
        const double nl = static_cast<double>(k);
        const double nr = static_cast<double>(n - k);
        const double left_mean = k > 0 ? sum[k] / nl : 0.0;
        const double right_mean = k < n ? (sum[n] - sum[k]) / nr : 0.0;
        double sse = sumsq[n];
        if (k > 0) sse -= nl * left_mean * left_mean;
        if (k < n) sse -= nr * right_mean * right_mean;
        fit.objective_trace.emplace_back(
            k == 0 ? s.empty_prefix_candidate : s.xs[k - 1], sse);
        if (k == 0 || sse < best_sse) {
            best_sse = sse;
            best_k = k;
            best_levels.alpha = clamp01(k > 0 ? left_mean : right_mean);
            best_levels.beta = clamp01(k < n ? right_mean : 0.0);
        }
    }
    fit.d_hat = fit.objective_trace[best_k].first;
    fit.levels = best_levels;
    return fit;
}

// Self-test: the direct SSE minimization with levels (1/2, 0) and the prefix
// criterion must select the same candidate, tie-break included.
inline bool equivalence_check(const PValueProfile& profile) {
    const auto s = detail::sort_profile(profile);
    const std::size_t n = s.xs.size();

    // suffix[k] = sum_{i > k} p_i^2, prefix[k] = sum_{i <= k} (p_i - 1/2)^2
    std::vector<double> left(n + 1, 0.0), right(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        const double d = s.ps[k - 1] - 0.5;
        left[k] = left[k - 1] + d * d;
    }
    for (std::size_t k = n; k-- > 0;) {
        right[k] = right[k + 1] + s.ps[k] * s.ps[k];
    }

    std::size_t sse_k = 0;
    double best = left[0] + right[0];
    for (std::size_t k = 1; k <= n; ++k) {
        const double sse = left[k] + right[k];
        if (sse < best) {
            best = sse;
            sse_k = k;
        }
    }

    const StumpFit via_prefix = fit_stump(profile);
    const double sse_d = sse_k == 0 ? s.empty_prefix_candidate : s.xs[sse_k - 1];
    return sse_d == via_prefix.d_hat;
}

}  // namespace tkit

#endif  // TKIT_STUMP_HPP
