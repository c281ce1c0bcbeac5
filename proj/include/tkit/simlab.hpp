#ifndef TKIT_SIMLAB_HPP
#define TKIT_SIMLAB_HPP

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tkit/baseline.hpp"
#include "tkit/dataset.hpp"
#include "tkit/errors.hpp"
#include "tkit/kernel.hpp"
#include "tkit/pvalues.hpp"
#include "tkit/rng.hpp"
#include "tkit/smoothing.hpp"
#include "tkit/stump.hpp"

namespace tkit {

// Benchmark regression functions on [0,1]. All sit at tau0 up to d0.
// M1 rises with unit slope, M2 like a quadratic (cusp order 2), M3 is
// tent-shaped with unit slopes and a peak 0.3 above baseline.
enum class SimModelName { M1, M2, M3, FlatNull, JumpStump };

inline const char* model_name(SimModelName m) {
    switch (m) {
        case SimModelName::M1: return "M1";
        case SimModelName::M2: return "M2";
        case SimModelName::M3: return "M3";
        case SimModelName::FlatNull: return "FlatNull";
        case SimModelName::JumpStump: return "JumpStump";
    }
    return "?";
}

struct SimModel {
    SimModelName name = SimModelName::M1;
    double d0 = 0.5;
    double tau0 = 0.0;
};

inline double eval_model(const SimModel& model, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError(x);
    const double t = x - model.d0;
    if (t <= 0.0) return model.tau0;
    switch (model.name) {
        case SimModelName::M1:
            return model.tau0 + t;
        case SimModelName::M2:
            return model.tau0 + 2.0 * t * t;
        case SimModelName::M3:
            return t <= 0.3 ? model.tau0 + t : model.tau0 + 0.3 - (t - 0.3);
        case SimModelName::FlatNull:
            return model.tau0;
        case SimModelName::JumpStump:
            return model.tau0 + 1.0;
    }
    return model.tau0;
}

enum class ErrorKind { GaussianIID, GaussianHetero, AR1 };

struct ErrorSpec {
    ErrorKind kind = ErrorKind::GaussianIID;
    double sigma = 0.3;
    std::function<double(double)> sigma_fn;  // per-x sigma for GaussianHetero
    double rho = 0.3;                        // AR(1) coefficient

    static ErrorSpec iid(double sigma) { return {ErrorKind::GaussianIID, sigma, {}, 0.0}; }
    static ErrorSpec ar1(double sigma, double rho) {
        return {ErrorKind::AR1, sigma, {}, rho};
    }
};

// Deterministic for a fixed seed. Random design draws X_i ~ Uniform(0,1);
// FixedGrid uses x_i = i/n. AR(1) errors use the stationary recursion
// eps_i = rho eps_{i-1} + sqrt(1-rho^2) sigma eta_i with eps_1 ~ N(0, sigma^2),
// so rho = 0 reproduces the i.i.d. stream bit for bit.
inline DoseDataset generate(const SimModel& model, const ErrorSpec& error, std::size_t m,
                            std::size_t n, Design design, std::uint64_t seed) {
    if (m < 1 || n < 1) throw InvalidCombination("need m >= 1 and n >= 1");
    if (error.kind == ErrorKind::AR1) {
        if (design != Design::FixedGrid || m != 1)
            throw InvalidCombination("AR(1) errors require the fixed grid design with m = 1");
        if (!(error.rho > -1.0 && error.rho < 1.0))
            throw InvalidCombination("AR(1) coefficient must lie in (-1,1)");
    }
    if (error.kind == ErrorKind::GaussianHetero && !error.sigma_fn)
        throw InvalidCombination("heteroscedastic errors need a sigma function");

    SplitMixRng rng(seed);
    std::vector<double> xs(n);
    if (design == Design::Random) {
        for (auto& x : xs) x = rng.next_uniform();
    } else {
        for (std::size_t i = 0; i < n; ++i)
            xs[i] = static_cast<double>(i + 1) / static_cast<double>(n);
    }

    std::vector<std::pair<double, double>> raw;
    raw.reserve(n * m);
    if (error.kind == ErrorKind::AR1) {
        const double innov = std::sqrt(1.0 - error.rho * error.rho) * error.sigma;
        double eps = error.sigma * rng.next_normal();
        raw.emplace_back(xs[0], eval_model(model, xs[0]) + eps);
        for (std::size_t i = 1; i < n; ++i) {
            eps = error.rho * eps + innov * rng.next_normal();
            raw.emplace_back(xs[i], eval_model(model, xs[i]) + eps);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double mu = eval_model(model, xs[i]);
            const double sd =
                error.kind == ErrorKind::GaussianHetero ? error.sigma_fn(xs[i]) : error.sigma;
            for (std::size_t j = 0; j < m; ++j)
                raw.emplace_back(xs[i], mu + sd * rng.next_normal());
        }
    }
    return validate_dataset(raw, design);
}

enum class MethodKind { DoseReplicates, Smoothed };
enum class TauMode { Known, PValueFit };
enum class SigmaMode { Known, Pooled, SmoothedResiduals };

struct RowConfig {
    SimModel model;
    ErrorSpec error = ErrorSpec::iid(0.3);
    std::size_t m = 1;
    std::size_t n = 10;
    Design design = Design::Random;
    MethodKind method = MethodKind::DoseReplicates;
    TauMode tau_mode = TauMode::Known;
    SigmaMode sigma_mode = SigmaMode::Known;
    double bandwidth_c = 0.1;  // h = c n^(-1/(2p+1)) for the smoothed method
    int cusp_order = 1;
    SearchConfig search;

    const char* method_label() const {
        return method == MethodKind::DoseReplicates ? "method1" : "method2";
    }
};

struct ReplicateOutcome {
    double d_hat = 0.0;
    std::optional<double> tau_hat;
};

namespace detail {

// The maximizing prefix of the stump criterion is an interval between
// consecutive candidates; the replication runner reports its midpoint
// (with 1 as the right edge of the design domain), which is how the
// benchmark tables behave.
inline double argmax_interval_midpoint(const StumpFit& fit, double domain_hi) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < fit.objective_trace.size(); ++k)
        if (fit.objective_trace[k].second > fit.objective_trace[best].second) best = k;
    const double left = fit.objective_trace[best].first;
    const double right =
        best + 1 < fit.objective_trace.size() ? fit.objective_trace[best + 1].first : domain_hi;
    return 0.5 * (left + right);
}

// z_i(tau) = (mu_hat(X_i) - tau) / SE_hat(mu_hat(X_i)) with the plug-in
// standard error SE^2 = sigma_hat^2 k2bar / (m_i n h f_hat). This carries an
// extra sqrt(n h) against the limit statistic T/V; it is what the reference
// benchmark results for the fully estimated smoothed pipeline use.
struct StudentizedSmooth {
    std::vector<double> xs;
    std::vector<double> mu;
    std::vector<double> se;

    StudentizedSmooth(const DoseDataset& data, const KernelSpec& kernel,
                      const VarianceModel& variance) {
        const SmoothEstimate sm(data, kernel);
        const std::size_t g = data.n_groups();
        const double nh = static_cast<double>(g) * kernel.bandwidth;
        xs.resize(g);
        mu.resize(g);
        se.resize(g);
        for (std::size_t i = 0; i < g; ++i) {
            xs[i] = data.groups[i].x;
            const NwEval e = sm.mu_and_f(xs[i]);
            if (e.f <= 0.0) throw ZeroDensity(xs[i]);
            mu[i] = e.mu;
            const double m_i = static_cast<double>(data.groups[i].size());
            se[i] = variance.at(i) * std::sqrt(kernel.k2bar / (m_i * nh * e.f));
        }
    }

    PValueProfile profile(double tau, double bandwidth) const {
        PValueProfile out;
        out.method = PValueMethod::Smoothed;
        out.normalized = true;
        out.tau_used = tau;
        out.bandwidth_used = bandwidth;
        out.points.reserve(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            out.points.push_back({xs[i], upper_p(mu[i] - tau, se[i])});
        return out;
    }

    TauFit fit_tau(const DoseDataset& data, const VarianceModel& variance,
                   const SearchConfig& search) const {
        const auto ybars = data.group_means();
        const double pad = variance_pad(variance);
        const double lo = *std::min_element(ybars.begin(), ybars.end()) - pad;
        const double hi = *std::max_element(ybars.begin(), ybars.end()) + pad;
        return minimize_scalar(
            [this](double tau) {
                double acc = 0.0;
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    const double z = upper_p(mu[i] - tau, se[i]);
                    acc += (z - 0.5) * (z - 0.5);
                }
                return acc;
            },
            lo, hi, search);
    }
};

}  // namespace detail

inline ReplicateOutcome run_replicate(const RowConfig& cfg, std::uint64_t seed) {
    const DoseDataset data = generate(cfg.model, cfg.error, cfg.m, cfg.n, cfg.design, seed);

    std::optional<KernelSpec> kernel;
    if (cfg.method == MethodKind::Smoothed)
        kernel = KernelSpec(KernelFamily::Gaussian,
                            bandwidth_rule(cfg.bandwidth_c, cfg.n, cfg.cusp_order));

    VarianceModel variance;
    switch (cfg.sigma_mode) {
        case SigmaMode::Known:
            variance = VarianceModel::known(cfg.error.sigma, data.n_groups());
            break;
        case SigmaMode::Pooled:
            variance = variance_estimate(data, VarianceModel::Kind::PooledHomoscedastic);
            break;
        case SigmaMode::SmoothedResiduals:
            variance = variance_estimate(data, VarianceModel::Kind::SmoothedResiduals, kernel);
            break;
    }

    ReplicateOutcome out;

    if (cfg.method == MethodKind::DoseReplicates) {
        double tau = cfg.model.tau0;
        if (cfg.tau_mode == TauMode::PValueFit) {
            tau = tau_pvalue_fit(data, TauRegime::Dose, variance, {}, cfg.search).tau_hat;
            out.tau_hat = tau;
        }
        const PValueProfile profile = pvalues_dose(data, tau, variance);
        out.d_hat = detail::argmax_interval_midpoint(fit_stump(profile), 1.0);
        return out;
    }

    if (cfg.sigma_mode == SigmaMode::Known) {
        // Known-variance protocol: the limit statistic T/V with the true
        // sigma and the true (uniform) design density.
        double tau = cfg.model.tau0;
        if (cfg.tau_mode == TauMode::PValueFit) {
            tau = tau_pvalue_fit(data, TauRegime::Smoothed, variance, kernel, cfg.search).tau_hat;
            out.tau_hat = tau;
        }
        const PValueProfile profile =
            pvalues_smooth(data, tau, *kernel, variance, [](double) { return 1.0; });
        out.d_hat = detail::argmax_interval_midpoint(fit_stump(profile), 1.0);
        return out;
    }

    // Fully estimated protocol: studentize by the plug-in standard error.
    const detail::StudentizedSmooth stat(data, *kernel, variance);
    double tau = cfg.model.tau0;
    if (cfg.tau_mode == TauMode::PValueFit) {
        tau = stat.fit_tau(data, variance, cfg.search).tau_hat;
        out.tau_hat = tau;
    }
    const PValueProfile profile = stat.profile(tau, kernel->bandwidth);
    out.d_hat = detail::argmax_interval_midpoint(fit_stump(profile), 1.0);
    return out;
}

struct ReportRow {
    std::string model;
    std::size_t m = 0;
    std::size_t n = 0;
    std::string method;
    double rmse_d = 0.0;  // x 10^2
    double bias_d = 0.0;  // x 10^2
    std::optional<double> rmse_tau;
    std::optional<double> bias_tau;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
};

struct SimReport {
    std::vector<ReportRow> rows;
};

// Runs every row for `replicates` replicates. Replicate r of every row uses
// seed base_seed + r, so rows sharing (model, m, n) see the same datasets and
// results are bit-identical for any thread count: outcomes are stored by
// replicate index and reduced in order.
inline SimReport run_table(const std::vector<RowConfig>& rows, std::size_t replicates,
                           std::uint64_t base_seed, unsigned threads = 0) {
    if (replicates < 1) throw std::invalid_argument("need at least 1 replicate");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

    SimReport report;
    report.rows.reserve(rows.size());
    for (const auto& cfg : rows) {
        std::vector<ReplicateOutcome> outcomes(replicates);
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t r = next.fetch_add(1); r < replicates; r = next.fetch_add(1))
                outcomes[r] = run_replicate(cfg, base_seed + r);
        };
        if (threads == 1 || replicates == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            const unsigned use = std::min<unsigned>(threads, static_cast<unsigned>(replicates));
            pool.reserve(use);
            for (unsigned t = 0; t < use; ++t) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }

        ReportRow row;
        row.model = model_name(cfg.model.name);
        row.m = cfg.m;
        row.n = cfg.n;
        row.method = cfg.method_label();
        row.reps = replicates;
        row.seed = base_seed;

        double sum_d = 0.0, sumsq_d = 0.0;
        double sum_t = 0.0, sumsq_t = 0.0;
        for (const auto& o : outcomes) {
            const double ed = o.d_hat - cfg.model.d0;
            sum_d += ed;
            sumsq_d += ed * ed;
            if (o.tau_hat) {
                const double et = *o.tau_hat - cfg.model.tau0;
                sum_t += et;
                sumsq_t += et * et;
            }
        }
        const double nr = static_cast<double>(replicates);
        row.rmse_d = 100.0 * std::sqrt(sumsq_d / nr);
        row.bias_d = 100.0 * (sum_d / nr);
        if (cfg.tau_mode == TauMode::PValueFit) {
            row.rmse_tau = 100.0 * std::sqrt(sumsq_t / nr);
            row.bias_tau = 100.0 * (sum_t / nr);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

// --- Benchmark table presets ---------------------------------------------

inline RowConfig table1_row(SimModelName model, std::size_t m, std::size_t n,
                            MethodKind method) {
    RowConfig cfg;
    cfg.model = SimModel{model, 0.5, 0.0};
    cfg.error = ErrorSpec::iid(0.3);
    cfg.m = m;
    cfg.n = n;
    cfg.method = method;
    cfg.tau_mode = TauMode::Known;
    cfg.sigma_mode = SigmaMode::Known;
    if (model == SimModelName::M2) {
        cfg.bandwidth_c = 0.08;
        cfg.cusp_order = 2;
    } else {
        cfg.bandwidth_c = 0.04;
        cfg.cusp_order = 1;
    }
    return cfg;
}

inline RowConfig table2_row(SimModelName model, std::size_t m, std::size_t n) {
    RowConfig cfg;
    cfg.model = SimModel{model, 0.5, 0.0};
    cfg.error = ErrorSpec::iid(0.3);
    cfg.m = m;
    cfg.n = n;
    cfg.method = MethodKind::DoseReplicates;
    cfg.tau_mode = TauMode::PValueFit;
    cfg.sigma_mode = SigmaMode::Pooled;
    return cfg;
}

inline RowConfig table3_row(SimModelName model, std::size_t n) {
    RowConfig cfg;
    cfg.model = SimModel{model, 0.5, 0.0};
    cfg.error = ErrorSpec::iid(0.3);
    cfg.m = 1;
    cfg.n = n;
    cfg.method = MethodKind::Smoothed;
    cfg.tau_mode = TauMode::PValueFit;
    cfg.sigma_mode = SigmaMode::SmoothedResiduals;
    if (model == SimModelName::M2) {
        cfg.bandwidth_c = 0.15;
        cfg.cusp_order = 2;
    } else {
        cfg.bandwidth_c = 0.1;
        cfg.cusp_order = 1;
    }
    return cfg;
}

inline const std::vector<SimModelName>& benchmark_models() {
    static const std::vector<SimModelName> models{SimModelName::M1, SimModelName::M2,
                                                  SimModelName::M3};
    return models;
}

inline std::vector<RowConfig> table1_rows() {
    static const std::vector<std::pair<std::size_t, std::size_t>> pairs{
        {5, 5},   {5, 10},  {10, 10}, {10, 15}, {10, 20},
        {15, 10}, {15, 15}, {15, 20}, {20, 10}, {20, 15},
        {20, 20}, {3, 80},  {3, 100}, {4, 80},  {4, 100}};
    std::vector<RowConfig> rows;
    for (auto [m, n] : pairs)
        for (SimModelName model : benchmark_models())
            for (MethodKind method : {MethodKind::DoseReplicates, MethodKind::Smoothed})
                rows.push_back(table1_row(model, m, n, method));
    return rows;
}

inline std::vector<RowConfig> table2_rows() {
    static const std::vector<std::pair<std::size_t, std::size_t>> pairs{
        {5, 5}, {5, 10}, {10, 10}, {10, 20}, {10, 50}, {20, 50}, {50, 100}};
    std::vector<RowConfig> rows;
    for (auto [m, n] : pairs)
        for (SimModelName model : benchmark_models()) rows.push_back(table2_row(model, m, n));
    return rows;
}

inline std::vector<RowConfig> table3_rows() {
    static const std::vector<std::size_t> ns{20, 30, 50, 80, 100, 200, 500, 1000, 1500, 2000};
    std::vector<RowConfig> rows;
    for (std::size_t n : ns)
        for (SimModelName model : benchmark_models()) rows.push_back(table3_row(model, n));
    return rows;
}

}  // namespace tkit

#endif  // TKIT_SIMLAB_HPP
