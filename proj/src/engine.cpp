#include "drpt/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "drpt/numeric.hpp"
#include "drpt/parallel.hpp"

namespace drpt {

void TestConfig::validate() const {
    require(copies >= 1, ErrorCode::InvalidArgument, "need H >= 1 copies");
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha must be in (0,1)");
}

namespace {

constexpr double kExactLatticeGuard = 1e6;

double assemble_p_value(double t_obs, const std::vector<double>& t_perm) {
    std::size_t count = 0;
    for (double t : t_perm) {
        if (t >= t_obs) ++count;
    }
    return static_cast<double>(1 + count) / static_cast<double>(1 + t_perm.size());
}

std::vector<double> category_ratio_values(const RatioFunction& ratio,
                                          const PooledSample& sample, std::size_t cats) {
    std::vector<double> r(cats);
    if (ratio.kind() == RatioFunction::Kind::Table) {
        require(ratio.table_values().size() >= cats, ErrorCode::DomainMismatch,
                "ratio table does not cover all observed categories");
        for (std::size_t j = 0; j < cats; ++j) r[j] = ratio.eval_category(static_cast<int>(j));
        return r;
    }
    // Precomputed variants must be constant within each category for the
    // count-level path to be well defined.
    std::vector<char> seen(cats, 0);
    const auto values = ratio.values_for(sample);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto j = static_cast<std::size_t>(sample.category(i));
        if (!seen[j]) {
            r[j] = values[i];
            seen[j] = 1;
        } else {
            require(r[j] == values[i], ErrorCode::DomainMismatch,
                    "ratio is not constant within a category");
        }
    }
    for (std::size_t j = 0; j < cats; ++j) {
        require(seen[j], ErrorCode::DomainMismatch,
                "category " + std::to_string(j) + " not present in the data");
    }
    return r;
}

TestResult run_discrete_exact(const PooledSample& sample, const RatioFunction& ratio,
                              const TestConfig& config);

// Count-level evaluation plan for categorical data. Statistics of a copy
// depend on the copy only through its count table, and evaluating through
// counts keeps mathematically tied copies bitwise tied, so the comparison in
// the p-value treats ties exactly like the discrete-exact path does.
struct CountPlan {
    std::size_t cats = 0;
    std::vector<double> r_by_cat;
    std::vector<double> q_by_cat;
    std::vector<double> cat_kernel;  // V/U only
    std::vector<double> phi_by_cat;  // IPM only, dictionary_size x cats
    std::size_t dict_size = 0;
    double bandwidth = 0.0;
    double ipm_norm = 0.0;

    double evaluate(const CountTable& table, StatKind kind) const {
        switch (kind) {
            case StatKind::VStat:
            case StatKind::UStat:
                return shifted_mmd_from_counts(table, q_by_cat, cat_kernel, kind);
            case StatKind::DiscreteAbs:
                return discrete_abs_statistic(table, r_by_cat);
            case StatKind::GenericIpm: {
                double best = 0.0;
                for (std::size_t d = 0; d < dict_size; ++d) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < cats; ++j) {
                        const double first = static_cast<double>(table.tots[j] - table.w[j]);
                        const double second = static_cast<double>(table.w[j]);
                        acc += (q_by_cat[j] * first - (1.0 - q_by_cat[j]) * second) *
                               phi_by_cat[d * cats + j];
                    }
                    best = std::max(best, std::abs(ipm_norm * acc));
                }
                return best;
            }
        }
        fail(ErrorCode::Internal, "unreachable statistic kind");
    }
};

CountPlan make_count_plan(const PooledSample& sample, const RatioFunction& ratio,
                          const TestConfig& config, double lambda) {
    CountPlan plan;
    plan.cats = sample.num_categories();
    plan.r_by_cat = category_ratio_values(ratio, sample, plan.cats);
    plan.q_by_cat = point_weights(sample.n(), sample.m(), lambda, plan.r_by_cat);
    plan.ipm_norm = static_cast<double>(sample.n() + sample.m()) /
                    (static_cast<double>(sample.n()) * static_cast<double>(sample.m()));
    if (config.statistic == StatKind::VStat || config.statistic == StatKind::UStat) {
        plan.bandwidth = resolve_bandwidth(config.kernel, sample);
        plan.cat_kernel = category_kernel_table(plan.cats, config.kernel, plan.bandwidth);
    }
    if (config.statistic == StatKind::GenericIpm) {
        const auto dict = config.ipm_dictionary.empty() ? default_ipm_dictionary(sample)
                                                        : config.ipm_dictionary;
        require(!dict.empty(), ErrorCode::EmptyDictionary,
                "the IPM statistic needs a nonempty dictionary");
        plan.dict_size = dict.size();
        std::vector<std::size_t> representative(plan.cats, 0);
        for (std::size_t i = sample.size(); i-- > 0;) {
            representative[static_cast<std::size_t>(sample.category(i))] = i;
        }
        plan.phi_by_cat.resize(plan.dict_size * plan.cats);
        for (std::size_t d = 0; d < plan.dict_size; ++d) {
            for (std::size_t j = 0; j < plan.cats; ++j) {
                plan.phi_by_cat[d * plan.cats + j] = dict[d](sample, representative[j]);
            }
        }
    }
    return plan;
}

CountTable table_of_permutation(const PooledSample& sample, const Permutation& sigma,
                                std::size_t cats) {
    CountTable t;
    t.n = sample.n();
    t.m = sample.m();
    t.tots.assign(cats, 0);
    t.w.assign(cats, 0);
    for (std::size_t p = 0; p < sigma.size(); ++p) {
        const auto j = static_cast<std::size_t>(sample.category(sigma[p]));
        t.tots[j] += 1;
        if (p >= sample.n()) t.w[j] += 1;
    }
    return t;
}

TestResult run_discrete_exact(const PooledSample& sample, const RatioFunction& ratio,
                              const TestConfig& config) {
    const CountTable observed = tabulate(sample);
    std::vector<double> tot_weights(observed.tots.size());
    for (std::size_t j = 0; j < tot_weights.size(); ++j) {
        tot_weights[j] = static_cast<double>(observed.tots[j]);
    }
    const auto r_by_cat = category_ratio_values(ratio, sample, observed.tots.size());
    const auto lambda = solve_lambda_hat_counts(sample.n(), sample.m(), tot_weights, r_by_cat);
    const CountPlan plan = make_count_plan(sample, ratio, config, lambda.value);

    FisherNcmh law(observed.tots, r_by_cat, sample.n(), sample.m());
    RngStream root(config.seed, 0x4643'5054ull);
    const auto tables = law.sample_tables(config.copies, root, config.threads);

    TestResult result;
    result.t_observed = plan.evaluate(observed, config.statistic);
    result.t_permuted.resize(tables.size());
    parallel_for(tables.size(), config.threads, [&](std::size_t h) {
        result.t_permuted[h] = plan.evaluate(tables[h], config.statistic);
    });
    result.lambda_hat = lambda.value;
    result.bandwidth = plan.bandwidth;
    result.path_used = ResamplingPath::DiscreteExact;
    result.sweeps_used = 0;
    return result;
}

TestResult run_mcmc(const PooledSample& sample, const RatioFunction& ratio,
                    const TestConfig& config) {
    if (config.statistic == StatKind::UStat) {
        require(sample.n() >= 2 && sample.m() >= 2, ErrorCode::TooFewPoints,
                "the U-statistic needs n >= 2 and m >= 2");
    }
    require(config.statistic != StatKind::DiscreteAbs || sample.is_categorical(),
            ErrorCode::DomainMismatch, "the discrete statistic requires categorical data");

    const auto rvalues = ratio.values_for(sample);
    const auto lambda = solve_lambda_hat(sample.n(), sample.m(), rvalues);

    ChainConfig chain;
    chain.sweeps = config.sweeps > 0 ? config.sweeps : default_sweeps(sample.n(), sample.m());
    chain.copies = config.copies;
    chain.variant = config.variant;
    chain.seed = config.seed;
    chain.threads = config.threads;

    const StarDraw draw = run_star_scheme(sample.n(), sample.m(), rvalues, chain, lambda.value);

    TestResult result;
    result.lambda_hat = lambda.value;
    result.sweeps_used = chain.sweeps;
    result.path_used = ResamplingPath::Mcmc;
    result.t_permuted.resize(draw.copies.size());

    const Permutation id = identity_permutation(sample.size());

    if (sample.is_categorical()) {
        bool count_level = true;
        CountPlan plan;
        try {
            plan = make_count_plan(sample, ratio, config, lambda.value);
        } catch (const Error&) {
            // e.g. a ratio that varies within a category: evaluate densely
            count_level = false;
        }
        if (count_level) {
            result.bandwidth = plan.bandwidth;
            result.t_observed =
                plan.evaluate(table_of_permutation(sample, id, plan.cats), config.statistic);
            parallel_for(draw.copies.size(), config.threads, [&](std::size_t h) {
                result.t_permuted[h] = plan.evaluate(
                    table_of_permutation(sample, draw.copies[h], plan.cats), config.statistic);
            });
            return result;
        }
    }

    switch (config.statistic) {
        case StatKind::VStat:
        case StatKind::UStat: {
            const MmdContext ctx = make_mmd_context(sample, rvalues, lambda.value, config.kernel);
            result.bandwidth = ctx.bandwidth;
            result.t_observed = shifted_mmd_permuted(ctx, id, config.statistic);
            parallel_for(draw.copies.size(), config.threads, [&](std::size_t h) {
                result.t_permuted[h] =
                    shifted_mmd_permuted(ctx, draw.copies[h], config.statistic);
            });
            break;
        }
        case StatKind::DiscreteAbs:
            fail(ErrorCode::DomainMismatch,
                 "the discrete statistic requires a per-category ratio");
        case StatKind::GenericIpm: {
            const auto dict = config.ipm_dictionary.empty() ? default_ipm_dictionary(sample)
                                                            : config.ipm_dictionary;
            const IpmContext ctx = make_ipm_context(sample, rvalues, lambda.value, dict);
            result.t_observed = ipm_permuted(ctx, id);
            parallel_for(draw.copies.size(), config.threads, [&](std::size_t h) {
                result.t_permuted[h] = ipm_permuted(ctx, draw.copies[h]);
            });
            break;
        }
    }
    return result;
}

} // namespace

TestResult run_drpt(const PooledSample& sample, const RatioFunction& ratio,
                    const TestConfig& config) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();

    ResamplingPath path = config.path;
    if (path == ResamplingPath::Auto) {
        path = ResamplingPath::Mcmc;
        if (sample.is_categorical()) {
            try {
                const CountTable observed = tabulate(sample);
                const auto r_by_cat =
                    category_ratio_values(ratio, sample, observed.tots.size());
                const FisherNcmh law(observed.tots, r_by_cat, sample.n(), sample.m());
                if (law.lattice_size() <= kExactLatticeGuard) {
                    path = ResamplingPath::DiscreteExact;
                }
            } catch (const Error&) {
                // e.g. a ratio that is not constant per category: MCMC handles it
            }
        }
    }
    require(path != ResamplingPath::DiscreteExact || sample.is_categorical(),
            ErrorCode::DomainMismatch, "the exact path requires categorical data");

    TestResult result = path == ResamplingPath::DiscreteExact
                            ? run_discrete_exact(sample, ratio, config)
                            : run_mcmc(sample, ratio, config);
    result.p_value = assemble_p_value(result.t_observed, result.t_permuted);
    result.alpha = config.alpha;
    result.reject = result.p_value <= config.alpha;
    result.statistic = config.statistic;
    result.seed = config.seed;
    result.elapsed_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - started)
                            .count();
    return result;
}

std::string TestResult::to_json() const {
    nlohmann::json j;
    j["p_value"] = p_value;
    j["t_observed"] = t_observed;
    j["t_permuted"] = t_permuted;
    j["lambda_hat"] = lambda_hat;
    if (bandwidth > 0.0) j["bandwidth"] = bandwidth;
    j["statistic"] = stat_kind_name(statistic);
    j["path"] = path_name(path_used);
    j["sweeps"] = sweeps_used;
    j["copies"] = t_permuted.size();
    j["alpha"] = alpha;
    j["reject"] = reject;
    j["seed"] = seed;
    return j.dump(2);
}

std::vector<CandidateOutcome> invert_confidence_set(const PooledSample& sample,
                                                    const std::vector<RatioFunction>& candidates,
                                                    double alpha, const TestConfig& config) {
    require(!candidates.empty(), ErrorCode::EmptyCandidates, "no candidate ratios supplied");
    RngStream seeder(config.seed, 0x494E'5645ull);
    std::vector<CandidateOutcome> outcomes(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        TestConfig per = config;
        per.alpha = alpha;
        per.seed = seeder.child(k).next_u64();
        const TestResult res = run_drpt(sample, candidates[k], per);
        outcomes[k] = {res.p_value, res.p_value > alpha};
    }
    return outcomes;
}

std::pair<double, double> wald_odds_interval(std::int64_t x1, std::int64_t n,
                                             std::int64_t y1, std::int64_t m, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha must be in (0,1)");
    require(x1 >= 1 && n - x1 >= 1 && y1 >= 1 && m - y1 >= 1, ErrorCode::ZeroCell,
            "all four cells must contain at least one observation");
    const double b1 = static_cast<double>(x1) / static_cast<double>(n);
    const double w1 = static_cast<double>(y1) / static_cast<double>(m);
    const double log_rho = std::log(w1 / (1.0 - w1)) - std::log(b1 / (1.0 - b1));
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    const double se = std::sqrt(1.0 / (mm * w1) + 1.0 / (mm * (1.0 - w1)) +
                                1.0 / (nn * b1) + 1.0 / (nn * (1.0 - b1)));
    const double z = normal_quantile(1.0 - alpha / 2.0);
    return {std::exp(log_rho - z * se), std::exp(log_rho + z * se)};
}

CompositeResult composite_drpt(const PooledSample& train, const PooledSample& test,
                               const RatioEstimator& estimator, const TestConfig& config) {
    std::vector<double> predicted;
    try {
        predicted = estimator(train, test);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail(ErrorCode::EstimatorFailure, std::string("ratio estimator failed: ") + e.what());
    }
    require(predicted.size() == test.size(), ErrorCode::EstimatorFailure,
            "estimator returned the wrong number of values");

    CompositeResult out;
    out.clipped = 0;
    for (double& v : predicted) {
        require(std::isfinite(v), ErrorCode::EstimatorFailure,
                "estimator produced a non-finite ratio");
        if (v < 1e-6) {
            v = 1e-6;
            ++out.clipped;
        } else if (v > 1e6) {
            v = 1e6;
            ++out.clipped;
        }
    }
    out.ratio_min = *std::min_element(predicted.begin(), predicted.end());
    out.ratio_max = *std::max_element(predicted.begin(), predicted.end());
    out.ratio_values = predicted;
    out.test = run_drpt(test, RatioFunction::precomputed(std::move(predicted)), config);
    return out;
}

std::pair<PooledSample, PooledSample> train_test_split(const PooledSample& sample,
                                                       double train_fraction,
                                                       std::uint64_t seed) {
    require(train_fraction > 0.0 && train_fraction < 1.0, ErrorCode::InvalidArgument,
            "train fraction must be in (0,1)");
    RngStream rng(seed, 0x53'504C'4954ull);
    auto pick = [&](std::size_t offset, std::size_t count) {
        auto order = rng.shuffle_prefix(static_cast<std::uint32_t>(offset),
                                        static_cast<std::uint32_t>(count),
                                        static_cast<std::uint32_t>(count));
        std::size_t keep = static_cast<std::size_t>(
            std::round(train_fraction * static_cast<double>(count)));
        keep = std::min(std::max<std::size_t>(keep, 1), count - 1);
        std::vector<std::size_t> train_idx(order.begin(),
                                           order.begin() + static_cast<std::ptrdiff_t>(keep));
        std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(keep),
                                          order.end());
        return std::make_pair(train_idx, test_idx);
    };
    auto [train_first, test_first] = pick(0, sample.n());
    auto [train_second, test_second] = pick(sample.n(), sample.m());
    return {sample.subset(train_first, train_second), sample.subset(test_first, test_second)};
}

const char* stat_kind_name(StatKind kind) noexcept {
    switch (kind) {
        case StatKind::VStat: return "v";
        case StatKind::UStat: return "u";
        case StatKind::DiscreteAbs: return "discrete";
        case StatKind::GenericIpm: return "ipm";
    }
    return "unknown";
}

const char* path_name(ResamplingPath path) noexcept {
    switch (path) {
        case ResamplingPath::Auto: return "auto";
        case ResamplingPath::Mcmc: return "mcmc";
        case ResamplingPath::DiscreteExact: return "exact";
    }
    return "unknown";
}

} // namespace drpt
