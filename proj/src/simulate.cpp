#include "drpt/simulate.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "drpt/logistic.hpp"
#include "drpt/numeric.hpp"
#include "drpt/parallel.hpp"
#include "drpt/statistic.hpp"
#include "drpt/svg.hpp"

namespace drpt {

Scenario scenario_from_name(const std::string& name) {
    if (name == "e1") return Scenario::E1;
    if (name == "e1prime") return Scenario::E1Prime;
    if (name == "e2") return Scenario::E2;
    if (name == "e3") return Scenario::E3;
    if (name == "misspec") return Scenario::Misspec;
    if (name == "causal") return Scenario::Causal;
    if (name == "gamma1") return Scenario::Gamma1;
    fail(ErrorCode::InvalidArgument, "unknown scenario '" + name + "'");
}

const char* scenario_name(Scenario scenario) noexcept {
    switch (scenario) {
        case Scenario::E1: return "e1";
        case Scenario::E1Prime: return "e1prime";
        case Scenario::E2: return "e2";
        case Scenario::E3: return "e3";
        case Scenario::Misspec: return "misspec";
        case Scenario::Causal: return "causal";
        case Scenario::Gamma1: return "gamma1";
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    require(!grid.empty(), ErrorCode::InvalidArgument, "parameter grid must be nonempty");
    require(replicates >= 1, ErrorCode::InvalidArgument, "need at least one replicate");
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha must be in (0,1)");
    require(n >= 1 && m >= 1, ErrorCode::InvalidArgument, "need n, m >= 1");
    require(estimator == "ll" || estimator == "klr", ErrorCode::InvalidArgument,
            "estimator must be 'll' or 'klr'");
}

namespace {

// Inverse-CDF draw from the density 2x on [0,1].
double draw_q(RngStream& rng) { return std::sqrt(rng.uniform01()); }

// Arcsine law Beta(1/2,1/2) via sin^2(pi*u/2).
double draw_arcsine(RngStream& rng) {
    const double s = std::sin(1.5707963267948966 * rng.uniform01());
    return s * s;
}

} // namespace

GeneratedData gen_bivariate_e1(double eta, std::size_t n, std::size_t m, RngStream& rng,
                               bool prime_variant) {
    require(eta >= 0.0 && eta <= 0.8, ErrorCode::OutOfRange, "eta must lie in [0, 0.8]");
    std::vector<double> coords;
    coords.reserve((n + m) * 2);
    for (std::size_t i = 0; i < n; ++i) {
        coords.push_back(rng.uniform01());
        coords.push_back(rng.uniform01());
    }
    const double mix_weight = 1.0 / (1.0 + eta);
    for (std::size_t j = 0; j < m; ++j) {
        if (rng.uniform01() < mix_weight) {
            coords.push_back(draw_q(rng));
            coords.push_back(prime_variant ? rng.uniform01() : draw_q(rng));
        } else {
            coords.push_back(draw_arcsine(rng));
            coords.push_back(draw_arcsine(rng));
        }
    }
    return {PooledSample::continuous(std::move(coords), 2, n, m),
            RatioFunction::expression(prime_variant ? "2*x1" : "4*x1*x2")};
}

GeneratedData gen_binary_e3(double eta, std::size_t n, std::size_t m, RngStream& rng) {
    const double g1 = 3.0 * (1.0 - eta) / 4.0 + eta / 4.0;
    std::vector<int> codes;
    codes.reserve(n + m);
    for (std::size_t i = 0; i < n; ++i) codes.push_back(rng.uniform01() < 0.5 ? 1 : 0);
    for (std::size_t j = 0; j < m; ++j) codes.push_back(rng.uniform01() < g1 ? 1 : 0);
    return {PooledSample::categorical(std::move(codes), n, m),
            RatioFunction::table({1.0, 3.0})};
}

GeneratedData gen_gaussian_misspec(double mu, double nu, std::size_t n, std::size_t m,
                                   RngStream& rng) {
    std::vector<double> coords;
    coords.reserve(n + m);
    for (std::size_t i = 0; i < n; ++i) coords.push_back(rng.normal());
    for (std::size_t j = 0; j < m; ++j) coords.push_back(mu + rng.normal());
    return {PooledSample::continuous(std::move(coords), 1, n, m),
            RatioFunction::expression("exp(nu*x1 - nu^2/2)", {{"nu", nu}})};
}

double misspec_size_bound(double mu, double nu, std::size_t m) {
    return 2.0 * normal_cdf(std::sqrt(static_cast<double>(m)) * std::abs(mu - nu) / 2.0) - 1.0;
}

double causal_beta0() { return 0.2; }

const std::vector<double>& causal_beta() {
    static const std::vector<double> beta = {0.5, -0.4, 0.3, -0.2, 0.1,
                                             0.1, -0.2, 0.3, -0.4, 0.5};
    return beta;
}

const std::vector<double>& causal_sigma_diag() {
    // The two covariates entering the interaction term carry most of the
    // scenario's spread; with an isotropic cloud the interaction signal is
    // drowned by the global kernel bandwidth at test size 200.
    static const std::vector<double> diag = {1.0, 2.5, 2.5, 1.0, 1.0,
                                             1.0, 1.0, 1.0, 1.0, 1.0};
    return diag;
}

PooledSample gen_causal_propensity(double gamma, std::size_t total, RngStream& rng) {
    require(total >= 4, ErrorCode::InvalidArgument, "need at least 4 individuals");
    const auto& beta = causal_beta();
    const auto& sigma = causal_sigma_diag();
    const std::size_t dim = beta.size();

    for (;;) {
        std::vector<double> untreated, treated;
        std::vector<double> z(dim);
        std::size_t n0 = 0, n1 = 0;
        for (std::size_t i = 0; i < total; ++i) {
            for (std::size_t d = 0; d < dim; ++d) z[d] = sigma[d] * rng.normal();
            double eta = causal_beta0();
            for (std::size_t d = 0; d < dim; ++d) eta += beta[d] * z[d];
            eta += gamma * (std::sin(10.0 * z[0]) + z[1] * z[2]);
            const double p_treat = 1.0 / (1.0 + std::exp(eta));
            if (rng.uniform01() < p_treat) {
                treated.insert(treated.end(), z.begin(), z.end());
                ++n1;
            } else {
                untreated.insert(untreated.end(), z.begin(), z.end());
                ++n0;
            }
        }
        if (n0 < 2 || n1 < 2) continue; // degenerate allocation; draw again
        untreated.insert(untreated.end(), treated.begin(), treated.end());
        return PooledSample::continuous(std::move(untreated), dim, n0, n1);
    }
}

RejectionBaselineResult rejection_sample_baseline(const PooledSample& sample,
                                                  const RatioFunction& ratio,
                                                  std::size_t copies, RngStream& rng) {
    require(copies >= 1, ErrorCode::InvalidArgument, "need at least one permutation");
    const auto rvalues = ratio.values_for(sample);
    double r_max = 0.0;
    for (std::size_t i = 0; i < sample.n(); ++i) r_max = std::max(r_max, rvalues[i]);

    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < sample.n(); ++i) {
        if (rng.uniform01() < rvalues[i] / r_max) kept.push_back(i);
    }
    RejectionBaselineResult out;
    out.n_effective = kept.size();
    if (kept.empty()) {
        out.p_value = 1.0;
        out.all_rejected = true;
        return out;
    }

    std::vector<std::size_t> second_idx;
    for (std::size_t j = sample.n(); j < sample.size(); ++j) second_idx.push_back(j);
    const PooledSample reduced = sample.subset(kept, second_idx);

    // Classical MMD^2 permutation test: shifted MMD at r == 1 (lambda = 1)
    // calibrated by exact uniform shuffles.
    const std::vector<double> ones(reduced.size(), 1.0);
    const MmdContext ctx = make_mmd_context(reduced, ones, 1.0, KernelSpec::gaussian_median());
    const Permutation id = identity_permutation(reduced.size());
    const double t_obs = shifted_mmd_permuted(ctx, id, StatKind::VStat);

    std::size_t exceed = 0;
    for (std::size_t h = 0; h < copies; ++h) {
        const auto sigma = rng.shuffle_prefix(0, static_cast<std::uint32_t>(reduced.size()),
                                              static_cast<std::uint32_t>(reduced.size()));
        if (shifted_mmd_permuted(ctx, sigma, StatKind::VStat) >= t_obs) ++exceed;
    }
    out.p_value = static_cast<double>(1 + exceed) / static_cast<double>(1 + copies);
    return out;
}

namespace {

struct ReplicateOutcome {
    bool reject = false;
    double value = 0.0; // gamma1: mean permuted fraction of ones
    double elapsed_ms = 0.0;
};

TestConfig scenario_test_config(const ExperimentConfig& cfg) {
    TestConfig test;
    test.sweeps = cfg.sweeps;
    test.copies = cfg.copies;
    test.alpha = cfg.alpha;
    test.threads = 1; // replicates are the parallel axis
    switch (cfg.scenario) {
        case Scenario::E1:
        case Scenario::E1Prime:
        case Scenario::Misspec:
        case Scenario::Causal:
            test.statistic = StatKind::UStat;
            test.kernel = KernelSpec::gaussian_median();
            test.path = ResamplingPath::Mcmc;
            break;
        case Scenario::E3:
            test.statistic = StatKind::VStat;
            test.kernel = KernelSpec::collision();
            test.path = ResamplingPath::Auto;
            break;
        case Scenario::E2:
        case Scenario::Gamma1:
            break; // handled outside run_drpt
    }
    return test;
}

ReplicateOutcome run_replicate(const ExperimentConfig& cfg, double param, RngStream stream) {
    const auto started = std::chrono::steady_clock::now();
    RngStream data_rng = stream.child(0);
    const std::uint64_t test_seed = stream.child(1).next_u64();

    ReplicateOutcome out;
    TestConfig test = scenario_test_config(cfg);
    test.seed = test_seed;

    switch (cfg.scenario) {
        case Scenario::E1:
        case Scenario::E1Prime: {
            const auto data = gen_bivariate_e1(param, cfg.n, cfg.m, data_rng,
                                               cfg.scenario == Scenario::E1Prime);
            out.reject = run_drpt(data.sample, data.ratio, test).reject;
            break;
        }
        case Scenario::E2: {
            const auto data = gen_bivariate_e1(param, cfg.n, cfg.m, data_rng, false);
            const auto res =
                rejection_sample_baseline(data.sample, data.ratio, cfg.copies, data_rng);
            out.reject = res.p_value <= cfg.alpha;
            break;
        }
        case Scenario::E3: {
            const auto data = gen_binary_e3(param, cfg.n, cfg.m, data_rng);
            out.reject = run_drpt(data.sample, data.ratio, test).reject;
            break;
        }
        case Scenario::Misspec: {
            const auto data = gen_gaussian_misspec(cfg.mu, param, cfg.n, cfg.m, data_rng);
            out.reject = run_drpt(data.sample, data.ratio, test).reject;
            break;
        }
        case Scenario::Causal: {
            const PooledSample train =
                gen_causal_propensity(param, cfg.train_size, data_rng);
            const PooledSample testset =
                gen_causal_propensity(param, cfg.n + cfg.m, data_rng);
            RatioEstimator estimator;
            const std::uint64_t est_seed = stream.child(2).next_u64();
            if (cfg.estimator == "klr") {
                estimator = [est_seed](const PooledSample& tr, const PooledSample& te) {
                    const auto model = fit_kernel_logistic(tr, KernelSpec::gaussian_median(),
                                                           default_ridge(tr), 200, est_seed);
                    return predict_ratio_on(model, te).values;
                };
            } else {
                estimator = [](const PooledSample& tr, const PooledSample& te) {
                    const auto model = fit_linear_logistic(tr, default_ridge(tr));
                    return predict_ratio_on(model, te).values;
                };
            }
            out.reject = composite_drpt(train, testset, estimator, test).test.reject;
            break;
        }
        case Scenario::Gamma1: {
            // Mean fraction of ones among the permuted second block, using
            // the star scheme on H0 binary data with shift r = param.
            const double f1 = 0.5;
            const double r = param;
            const double g1 = r * f1 / (r * f1 + (1.0 - f1));
            std::vector<int> codes;
            codes.reserve(cfg.n + cfg.m);
            for (std::size_t i = 0; i < cfg.n; ++i) {
                codes.push_back(data_rng.uniform01() < f1 ? 1 : 0);
            }
            for (std::size_t j = 0; j < cfg.m; ++j) {
                codes.push_back(data_rng.uniform01() < g1 ? 1 : 0);
            }
            const PooledSample sample =
                PooledSample::categorical(std::move(codes), cfg.n, cfg.m);
            const std::vector<double> rv = RatioFunction::table({1.0, r}).values_for(sample);
            const auto lambda = solve_lambda_hat(cfg.n, cfg.m, rv);
            ChainConfig chain;
            chain.sweeps = cfg.sweeps > 0 ? cfg.sweeps : default_sweeps(cfg.n, cfg.m);
            chain.copies = cfg.copies;
            chain.seed = test_seed;
            const StarDraw draw =
                run_star_scheme(cfg.n, cfg.m, rv, chain, lambda.value);
            double acc = 0.0;
            for (const auto& sigma : draw.copies) {
                std::size_t ones = 0;
                for (std::size_t p = cfg.n; p < sigma.size(); ++p) {
                    ones += static_cast<std::size_t>(sample.category(sigma[p]));
                }
                acc += static_cast<double>(ones) / static_cast<double>(cfg.m);
            }
            out.value = acc / static_cast<double>(draw.copies.size());
            break;
        }
    }
    out.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    return out;
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const std::string base = cfg.out_dir + "/";

    {
        std::ofstream csv(base + "power.csv", std::ios::binary);
        require(csv.good(), ErrorCode::IoError, "cannot write " + base + "power.csv");
        csv << "scenario,param,rate,se,reps\n";
        for (const auto& p : result.points) {
            csv << scenario_name(cfg.scenario) << "," << format_double(p.parameter) << ","
                << format_double(p.rate) << "," << format_double(p.se) << "," << p.replicates
                << "\n";
        }
    }
    {
        // wall-clock telemetry kept out of the reproducible outputs
        std::ofstream csv(base + "timings.csv", std::ios::binary);
        csv << "scenario,param,mean_runtime_ms\n";
        for (const auto& p : result.points) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", p.mean_runtime_ms);
            csv << scenario_name(cfg.scenario) << "," << format_double(p.parameter) << ","
                << buf << "\n";
        }
    }
    {
        nlohmann::json j;
        j["scenario"] = scenario_name(cfg.scenario);
        j["grid"] = cfg.grid;
        j["n"] = cfg.n;
        j["m"] = cfg.m;
        j["replicates"] = cfg.replicates;
        j["alpha"] = cfg.alpha;
        j["seed"] = cfg.seed;
        j["sweeps"] = cfg.sweeps;
        j["copies"] = cfg.copies;
        if (cfg.scenario == Scenario::Causal) {
            j["train_size"] = cfg.train_size;
            j["estimator"] = cfg.estimator;
            j["beta0"] = causal_beta0();
            j["beta"] = causal_beta();
            j["covariance_diag"] = causal_sigma_diag();
        }
        if (cfg.scenario == Scenario::Misspec) {
            j["mu"] = cfg.mu;
            j["size_bounds"] = result.bounds;
        }
        j["version"] = "1.0.0";
        std::ofstream out(base + "manifest.json", std::ios::binary);
        require(out.good(), ErrorCode::IoError, "cannot write " + base + "manifest.json");
        out << j.dump(2) << "\n";
    }
    {
        SvgSeries series;
        series.label = scenario_name(cfg.scenario);
        series.color = "#7b3294";
        for (const auto& p : result.points) {
            series.x.push_back(p.parameter);
            series.y.push_back(p.rate);
            series.yerr.push_back(p.se);
        }
        const bool is_gamma = cfg.scenario == Scenario::Gamma1;
        write_line_chart(base + "power.svg",
                         is_gamma ? "Permuted second-sample mean" : "Empirical power",
                         "parameter", is_gamma ? "mean fraction" : "rejection rate", {series});
    }
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    RngStream master(config.seed, 0x5349'4D55ull);
    RngStream scenario_stream = master.child(static_cast<std::uint64_t>(config.scenario));

    ExperimentResult result;
    result.points.resize(config.grid.size());

    const std::size_t total_jobs = config.grid.size() * config.replicates;
    std::vector<ReplicateOutcome> outcomes(total_jobs);
    parallel_for(total_jobs, config.threads, [&](std::size_t job) {
        const std::size_t gi = job / config.replicates;
        const std::size_t rep = job % config.replicates;
        outcomes[job] =
            run_replicate(config, config.grid[gi], scenario_stream.child(gi).child(rep));
    });

    for (std::size_t gi = 0; gi < config.grid.size(); ++gi) {
        PowerPoint point;
        point.parameter = config.grid[gi];
        point.replicates = config.replicates;
        double acc = 0.0, ms = 0.0;
        for (std::size_t rep = 0; rep < config.replicates; ++rep) {
            const auto& o = outcomes[gi * config.replicates + rep];
            acc += config.scenario == Scenario::Gamma1 ? o.value : (o.reject ? 1.0 : 0.0);
            ms += o.elapsed_ms;
        }
        point.rate = acc / static_cast<double>(config.replicates);
        point.se = config.scenario == Scenario::Gamma1
                       ? 0.0
                       : binomial_se(point.rate, config.replicates);
        if (config.scenario == Scenario::Gamma1) {
            double var = 0.0;
            for (std::size_t rep = 0; rep < config.replicates; ++rep) {
                const double d =
                    outcomes[gi * config.replicates + rep].value - point.rate;
                var += d * d;
            }
            if (config.replicates > 1) {
                var /= static_cast<double>(config.replicates - 1);
                point.se = std::sqrt(var / static_cast<double>(config.replicates));
            }
        }
        point.mean_runtime_ms = ms / static_cast<double>(config.replicates);
        result.points[gi] = point;
        if (config.scenario == Scenario::Misspec) {
            result.bounds.push_back(misspec_size_bound(config.mu, config.grid[gi], config.m));
        }
    }

    if (!config.out_dir.empty()) write_outputs(config, result);
    return result;
}

} // namespace drpt
