#pragma once
// Monte Carlo harness: paired populations are generated under one of three
// effect types, both models are fitted, and all six comparison methods
// (three equivalence tests, three significance tests) are scored for how
// often they identify the models as equivalent. Replicate r always draws
// from RngStream(seed, r), so a scenario is bit-reproducible and its result
// is identical whether replicates run serially or across threads.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "equilog/baseline.hpp"
#include "equilog/dataset.hpp"
#include "equilog/equivalence.hpp"
#include "equilog/errors.hpp"
#include "equilog/glm.hpp"
#include "equilog/rng.hpp"

namespace equilog {

enum class EffectType { None, LogOddsMultiplicative, LogOddsAdditive, ProbabilityMultiplicative };

inline std::string to_string(EffectType e) {
    switch (e) {
        case EffectType::None: return "none";
        case EffectType::LogOddsMultiplicative: return "logodds-multiplicative";
        case EffectType::LogOddsAdditive: return "logodds-additive";
        case EffectType::ProbabilityMultiplicative: return "probability-multiplicative";
    }
    return "?";
}

inline EffectType effect_from_string(const std::string& s) {
    if (s == "none") return EffectType::None;
    if (s == "logodds-multiplicative") return EffectType::LogOddsMultiplicative;
    if (s == "logodds-additive") return EffectType::LogOddsAdditive;
    if (s == "probability-multiplicative") return EffectType::ProbabilityMultiplicative;
    throw ValidationError("unknown effect type: " + s);
}

struct ScenarioConfig {
    std::size_t n = 1000;        // per-population sample size (train and test)
    std::size_t p = 3;           // covariate count, excluding the intercept
    EffectType effect = EffectType::None;
    double k = 1.0;              // effect size
    double k_sd = 0.1;           // sd of the per-observation effect draw k_i
    std::size_t replicates = 1000;
    double alpha = 0.05;
    SensitivityLevels levels;
    std::optional<double> epsilon_b;  // direct eps_B; when unset, delta_b^2 is used
    PeAlphaConvention pe_convention = PeAlphaConvention::PerEq4;
    std::uint64_t seed = 0;
};

inline void validate_config(const ScenarioConfig& cfg) {
    if (cfg.n < 20) throw ValidationError("scenario: n must be >= 20");
    if (cfg.replicates < 1) throw ValidationError("scenario: replicates must be >= 1");
    validate_levels(cfg.levels);
    if (cfg.levels.delta_beta.size() != cfg.p + 1)
        throw ValidationError("scenario: delta_beta must have p+1 entries (intercept included)");
    detail::check_probability(cfg.alpha, "scenario alpha");
    if (!(cfg.k_sd >= 0.0)) throw ValidationError("scenario: k_sd must be >= 0");
    switch (cfg.effect) {
        case EffectType::None:
            break;
        case EffectType::LogOddsMultiplicative:
        case EffectType::ProbabilityMultiplicative:
            if (!(cfg.k > 0.0)) throw ValidationError("scenario: k must be > 0 for this effect");
            break;
        case EffectType::LogOddsAdditive:
            if (!std::isfinite(cfg.k)) throw ValidationError("scenario: k must be finite");
            break;
    }
    if (cfg.epsilon_b && !(*cfg.epsilon_b > 1.0))
        throw ValidationError("scenario: epsilon_b must be > 1");
}

struct BasePopulation {
    Dataset data;
    Vector theta;  // true linear predictors 1 + sum_j x_ij
};

namespace detail {

struct CovariateDraw {
    Matrix x;      // n x (p+1) with intercept column
    Vector theta;  // 1 + sum of covariates
};

inline CovariateDraw draw_covariates(std::size_t n, std::size_t p, RngStream& rng) {
    CovariateDraw d;
    d.x = Matrix(n, p + 1);
    d.theta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.x(i, 0) = 1.0;
        double s = 1.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double z = rng.normal();
            d.x(i, j + 1) = z;
            s += z;
        }
        d.theta[i] = s;
    }
    return d;
}

}  // namespace detail

/// Standard-normal covariates with linear predictor theta_i = 1 + sum_j x_ij
/// and y_i ~ Bernoulli(sigmoid(theta_i)).
inline BasePopulation gen_base_population(std::size_t n, std::size_t p, RngStream& rng) {
    if (n < 1) throw ValidationError("gen_base_population: n must be >= 1");
    detail::CovariateDraw d = detail::draw_covariates(n, p, rng);
    BasePopulation pop;
    pop.theta = std::move(d.theta);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = rng.bernoulli(sigmoid(pop.theta[i])) ? 1 : 0;
    pop.data.X = std::move(d.x);
    pop.data.y = std::move(y);
    pop.data.feature_names.push_back("(Intercept)");
    for (std::size_t j = 0; j < p; ++j) pop.data.feature_names.push_back("x" + std::to_string(j + 1));
    validate_dataset(pop.data);
    return pop;
}

struct EffectOutcome {
    Vector theta_b;
    Vector pi_b;
};

/// Applies the configured effect to a base linear predictor vector, drawing
/// k_i ~ N(k, k_sd^2) per observation. EffectType::None consumes no random
/// draws. The probability-multiplicative effect leaves theta at its base
/// value and clips pi to [1e-6, 1 - 1e-6].
inline EffectOutcome apply_effect(EffectType effect, double k, double k_sd,
                                  const Vector& base_theta, RngStream& rng) {
    const std::size_t n = base_theta.size();
    EffectOutcome out;
    out.theta_b.resize(n);
    out.pi_b.resize(n);
    switch (effect) {
        case EffectType::None:
            for (std::size_t i = 0; i < n; ++i) {
                out.theta_b[i] = base_theta[i];
                out.pi_b[i] = sigmoid(base_theta[i]);
            }
            break;
        case EffectType::LogOddsMultiplicative:
            for (std::size_t i = 0; i < n; ++i) {
                out.theta_b[i] = rng.normal(k, k_sd) * base_theta[i];
                out.pi_b[i] = sigmoid(out.theta_b[i]);
            }
            break;
        case EffectType::LogOddsAdditive:
            for (std::size_t i = 0; i < n; ++i) {
                out.theta_b[i] = rng.normal(k, k_sd) + base_theta[i];
                out.pi_b[i] = sigmoid(out.theta_b[i]);
            }
            break;
        case EffectType::ProbabilityMultiplicative:
            for (std::size_t i = 0; i < n; ++i) {
                out.theta_b[i] = base_theta[i];
                double pi = rng.normal(k, k_sd) * sigmoid(base_theta[i]);
                pi = std::min(std::max(pi, 1e-6), 1.0 - 1e-6);
                out.pi_b[i] = pi;
            }
            break;
    }
    return out;
}

// Method indices within ScenarioResult. Equivalence methods identify
// equivalence by rejecting their null; significance methods by failing to
// reject theirs.
inline constexpr std::size_t kMethodCount = 6;
inline constexpr const char* kMethodNames[kMethodCount] = {
    "DE", "IPE", "PE", "Deviance", "HosmerLemeshow", "BrierT"};

struct ScenarioResult {
    std::array<std::size_t, kMethodCount> identified{};
    std::size_t replicates_done = 0;  // replicates entering the rates
    std::size_t failures = 0;         // excluded fit failures
    double mean_xi_bar = std::numeric_limits<double>::quiet_NaN();
    double mean_epsilon_theta = std::numeric_limits<double>::quiet_NaN();
    ScenarioConfig config;

    double rate(std::size_t method) const {
        return static_cast<double>(identified[method]) /
               static_cast<double>(replicates_done);
    }
};

namespace detail {

struct ReplicateOutcome {
    bool ok = false;
    std::array<bool, kMethodCount> identified{};
    double xi_bar = 0.0;
    double eps_theta = 0.0;
};

// Draw order within a replicate: population A (X then y), population B
// (X, then k_i effect draws, then y), test population (X then y). All from
// stream r.
inline ReplicateOutcome run_replicate(const ScenarioConfig& cfg, std::uint64_t r) {
    RngStream rng(cfg.seed, r);
    ReplicateOutcome out;

    BasePopulation pop_a = gen_base_population(cfg.n, cfg.p, rng);

    CovariateDraw draw_b = draw_covariates(cfg.n, cfg.p, rng);
    EffectOutcome eff = apply_effect(cfg.effect, cfg.k, cfg.k_sd, draw_b.theta, rng);
    Dataset data_b;
    data_b.X = std::move(draw_b.x);
    data_b.y.resize(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i)
        data_b.y[i] = rng.bernoulli(eff.pi_b[i]) ? 1 : 0;
    data_b.feature_names = pop_a.data.feature_names;

    BasePopulation pop_test = gen_base_population(cfg.n, cfg.p, rng);

    std::optional<FittedModel> fit_a, fit_b;
    try {
        fit_a = fit_logistic(pop_a.data);
        fit_b = fit_logistic(data_b);
    } catch (const SeparationError&) {
        return out;  // excluded, counted as a failure
    } catch (const NumericError&) {
        return out;
    }
    const FittedModel& model_a = *fit_a;
    const FittedModel& model_b = *fit_b;

    const PredictionSet pred_a = predict(model_a, pop_test.data.X);
    const PredictionSet pred_b = predict(model_b, pop_test.data.X);

    const double eps_beta_sq =
        de_threshold(cfg.levels.delta_beta, coefficient_diff_cov(model_a, model_b));
    const EquivTestResult de =
        descriptive_equivalence(model_a, model_b, eps_beta_sq, cfg.alpha);

    const double eps_theta = ipe_threshold(pred_a.theta, cfg.levels.delta_theta);
    const IpeResult ipe =
        individual_predictive_equivalence(pred_a.theta, pred_b.theta, eps_theta, cfg.alpha);

    const double eps_b = cfg.epsilon_b ? *cfg.epsilon_b : pe_threshold(cfg.levels.delta_b);
    const PeResult pe = performance_equivalence(pred_a.pi, pred_b.pi, pop_test.data.y,
                                                eps_b, cfg.alpha, cfg.pe_convention);

    const SignifTestResult dev = deviance_test(pop_a.data, data_b, cfg.alpha);
    const SignifTestResult hl = hosmer_lemeshow(pred_b.pi, pop_test.data.y, 10, cfg.alpha);
    const SignifTestResult bt =
        brier_t_test(pred_a.pi, pred_b.pi, pop_test.data.y, cfg.alpha);

    out.ok = true;
    out.identified[0] = de.equivalent();
    out.identified[1] = ipe.result.equivalent();
    out.identified[2] = pe.combined.equivalent();
    out.identified[3] = !dev.rejected();
    out.identified[4] = !hl.rejected();
    out.identified[5] = !bt.rejected();
    out.xi_bar = ipe.sample.mean;
    out.eps_theta = eps_theta;
    return out;
}

}  // namespace detail

/// Runs every replicate of a scenario and aggregates identification rates.
/// Replicate r owns RngStream(seed, r); aggregation walks the replicate
/// array in index order, so the result is identical for any thread count.
/// Fit failures are excluded from the rates; more than 1% of them is an
/// error.
inline ScenarioResult run_scenario(const ScenarioConfig& cfg, unsigned threads = 1) {
    validate_config(cfg);
    std::vector<detail::ReplicateOutcome> outcomes(cfg.replicates);

    if (threads <= 1) {
        for (std::size_t r = 0; r < cfg.replicates; ++r)
            outcomes[r] = detail::run_replicate(cfg, r);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&]() {
            while (true) {
                const std::size_t r = next.fetch_add(1);
                if (r >= cfg.replicates) return;
                try {
                    outcomes[r] = detail::run_replicate(cfg, r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        const unsigned n_workers = std::min<unsigned>(threads, 64);
        pool.reserve(n_workers);
        for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    ScenarioResult result;
    result.config = cfg;
    double xi_sum = 0.0, eps_sum = 0.0;
    for (const auto& o : outcomes) {
        if (!o.ok) {
            ++result.failures;
            continue;
        }
        ++result.replicates_done;
        for (std::size_t m = 0; m < kMethodCount; ++m)
            result.identified[m] += o.identified[m] ? 1 : 0;
        xi_sum += o.xi_bar;
        eps_sum += o.eps_theta;
    }
    if (result.failures * 100 >= cfg.replicates)
        throw NumericError("scenario: more than 1% of replicates failed to fit (" +
                           std::to_string(result.failures) + " of " +
                           std::to_string(cfg.replicates) + ")");
    if (result.replicates_done > 0) {
        result.mean_xi_bar = xi_sum / static_cast<double>(result.replicates_done);
        result.mean_epsilon_theta = eps_sum / static_cast<double>(result.replicates_done);
    }
    return result;
}

struct SweepResult {
    std::vector<ScenarioResult> cells;  // successful cells, grid order
    std::vector<std::pair<std::size_t, std::string>> errors;  // (grid index, message)
};

/// Runs each grid cell in order; per-cell errors are recorded and the sweep
/// continues.
inline SweepResult sweep(const std::vector<ScenarioConfig>& grid, unsigned threads = 1) {
    if (grid.empty()) throw ValidationError("sweep: empty grid");
    SweepResult out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            out.cells.push_back(run_scenario(grid[i], threads));
        } catch (const std::exception& e) {
            out.errors.emplace_back(i, e.what());
        }
    }
    return out;
}

}  // namespace equilog
