#ifndef TKIT_DATASET_HPP
#define TKIT_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "tkit/errors.hpp"

namespace tkit {

enum class Design { Random, FixedGrid };

// One dose/covariate level with its replicate responses.
struct DoseGroup {
    double x = 0.0;
    std::vector<double> ys;

    std::size_t size() const { return ys.size(); }
    double mean() const {
        double s = 0.0;
        for (double y : ys) s += y;
        return s / static_cast<double>(ys.size());
    }
};

// Grouped observations {(X_i, Y_i1..Y_im_i)}, sorted strictly ascending in x.
// Ties in x are merged into a single group, so the replicate count m_i is
// well defined for every dose.
struct DoseDataset {
    std::vector<DoseGroup> groups;
    Design design = Design::Random;

    std::size_t n_groups() const { return groups.size(); }
    std::size_t total_n() const {
        std::size_t n = 0;
        for (const auto& g : groups) n += g.size();
        return n;
    }
    std::vector<double> xs() const {
        std::vector<double> v(groups.size());
        for (std::size_t i = 0; i < groups.size(); ++i) v[i] = groups[i].x;
        return v;
    }
    std::vector<double> group_means() const {
        std::vector<double> v(groups.size());
        for (std::size_t i = 0; i < groups.size(); ++i) v[i] = groups[i].mean();
        return v;
    }
};

// Groups raw (x, y) pairs by exact x and sorts ascending.
inline DoseDataset validate_dataset(const std::vector<std::pair<double, double>>& raw,
                                    Design design = Design::Random) {
    if (raw.empty()) throw EmptyInput();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(raw[i].first) || !std::isfinite(raw[i].second))
            throw NonFiniteValue(i);
    }

    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return raw[a].first < raw[b].first;
    });

    DoseDataset out;
    out.design = design;
    for (std::size_t k : order) {
        if (out.groups.empty() || out.groups.back().x != raw[k].first) {
            out.groups.push_back(DoseGroup{raw[k].first, {}});
        }
        out.groups.back().ys.push_back(raw[k].second);
    }
    return out;
}

// Per-group standard deviation estimates sigma_hat(X_i).
// PooledHomoscedastic replicates one pooled value across all groups;
// None means "do not normalize" (sigma == 1 wherever a divisor is needed).
struct VarianceModel {
    enum class Kind { PooledHomoscedastic, PerDose, SmoothedResiduals, None };

    Kind kind = Kind::None;
    std::vector<double> values;  // empty for None

    double at(std::size_t i) const { return kind == Kind::None ? 1.0 : values[i]; }

    static VarianceModel none() { return VarianceModel{}; }

    // Known homoscedastic sigma, e.g. the true value in a simulation.
    static VarianceModel known(double sigma, std::size_t n_groups) {
        VarianceModel m;
        m.kind = Kind::PooledHomoscedastic;
        m.values.assign(n_groups, sigma);
        return m;
    }
};

}  // namespace tkit

#endif  // TKIT_DATASET_HPP
