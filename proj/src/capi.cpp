#include "drpt/drpt.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "drpt/engine.hpp"
#include "drpt/numeric.hpp"
#include "drpt/simulate.hpp"

namespace {

thread_local std::string g_last_error;

drpt_status status_from(drpt::ErrorCode code) {
    using drpt::ErrorCode;
    switch (code) {
        case ErrorCode::Ok: return DRPT_OK;
        case ErrorCode::InvalidArgument: return DRPT_ERR_INVALID_ARGUMENT;
        case ErrorCode::ParseError: return DRPT_ERR_PARSE;
        case ErrorCode::IoError: return DRPT_ERR_IO;
        case ErrorCode::NonPositiveRatio: return DRPT_ERR_NON_POSITIVE_RATIO;
        case ErrorCode::DomainMismatch: return DRPT_ERR_DOMAIN_MISMATCH;
        case ErrorCode::NoBracket: return DRPT_ERR_NO_BRACKET;
        case ErrorCode::NoConvergence: return DRPT_ERR_NO_CONVERGENCE;
        case ErrorCode::TooLarge: return DRPT_ERR_TOO_LARGE;
        case ErrorCode::TooFewPoints: return DRPT_ERR_TOO_FEW_POINTS;
        case ErrorCode::LambdaMismatch: return DRPT_ERR_LAMBDA_MISMATCH;
        case ErrorCode::EmptyDictionary: return DRPT_ERR_EMPTY_DICTIONARY;
        case ErrorCode::DegenerateSample: return DRPT_ERR_DEGENERATE_SAMPLE;
        case ErrorCode::InvalidTable: return DRPT_ERR_INVALID_TABLE;
        case ErrorCode::InfeasibleTotals: return DRPT_ERR_INFEASIBLE_TOTALS;
        case ErrorCode::OutOfRange: return DRPT_ERR_OUT_OF_RANGE;
        case ErrorCode::ZeroCell: return DRPT_ERR_ZERO_CELL;
        case ErrorCode::EmptyCandidates: return DRPT_ERR_EMPTY_CANDIDATES;
        case ErrorCode::SeparableData: return DRPT_ERR_SEPARABLE_DATA;
        case ErrorCode::EstimatorFailure: return DRPT_ERR_ESTIMATOR_FAILURE;
        case ErrorCode::Internal: return DRPT_ERR_INTERNAL;
    }
    return DRPT_ERR_INTERNAL;
}

template <typename Fn>
drpt_status guarded(Fn&& fn) {
    try {
        fn();
        return DRPT_OK;
    } catch (const drpt::Error& e) {
        g_last_error = e.what();
        return status_from(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DRPT_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return DRPT_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& text) {
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

drpt_status invalid(const char* message) {
    g_last_error = message;
    return DRPT_ERR_INVALID_ARGUMENT;
}

} // namespace

struct drpt_sample {
    drpt::PooledSample data;
    std::vector<double> csv_ratio;
};

struct drpt_ratio {
    drpt::RatioFunction fn;
};

struct drpt_config {
    drpt::TestConfig cfg;
};

struct drpt_result {
    drpt::TestResult res;
};

extern "C" {

const char* drpt_version(void) { return "1.0.0"; }

const char* drpt_last_error(void) { return g_last_error.c_str(); }

const char* drpt_status_name(drpt_status status) {
    switch (status) {
        case DRPT_OK: return "ok";
        case DRPT_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case DRPT_ERR_PARSE: return "parse_error";
        case DRPT_ERR_IO: return "io_error";
        case DRPT_ERR_NON_POSITIVE_RATIO: return "non_positive_ratio";
        case DRPT_ERR_DOMAIN_MISMATCH: return "domain_mismatch";
        case DRPT_ERR_NO_BRACKET: return "no_bracket";
        case DRPT_ERR_NO_CONVERGENCE: return "no_convergence";
        case DRPT_ERR_TOO_LARGE: return "too_large";
        case DRPT_ERR_TOO_FEW_POINTS: return "too_few_points";
        case DRPT_ERR_LAMBDA_MISMATCH: return "lambda_mismatch";
        case DRPT_ERR_EMPTY_DICTIONARY: return "empty_dictionary";
        case DRPT_ERR_DEGENERATE_SAMPLE: return "degenerate_sample";
        case DRPT_ERR_INVALID_TABLE: return "invalid_table";
        case DRPT_ERR_INFEASIBLE_TOTALS: return "infeasible_totals";
        case DRPT_ERR_OUT_OF_RANGE: return "out_of_range";
        case DRPT_ERR_ZERO_CELL: return "zero_cell";
        case DRPT_ERR_EMPTY_CANDIDATES: return "empty_candidates";
        case DRPT_ERR_SEPARABLE_DATA: return "separable_data";
        case DRPT_ERR_ESTIMATOR_FAILURE: return "estimator_failure";
        case DRPT_ERR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

void drpt_string_free(char* text) { delete[] text; }

drpt_status drpt_sample_continuous(const double* coords, size_t dim, size_t n, size_t m,
                                   drpt_sample** out) {
    if (!coords || !out) return invalid("null pointer argument");
    return guarded([&] {
        std::vector<double> buf(coords, coords + (n + m) * dim);
        *out = new drpt_sample{drpt::PooledSample::continuous(std::move(buf), dim, n, m), {}};
    });
}

drpt_status drpt_sample_categorical(const int* codes, size_t n, size_t m, drpt_sample** out) {
    if (!codes || !out) return invalid("null pointer argument");
    return guarded([&] {
        std::vector<int> buf(codes, codes + n + m);
        *out = new drpt_sample{drpt::PooledSample::categorical(std::move(buf), n, m), {}};
    });
}

drpt_status drpt_sample_from_csv(const char* path, drpt_sample** out) {
    if (!path || !out) return invalid("null pointer argument");
    return guarded([&] {
        auto csv = drpt::read_sample_csv(path);
        *out = new drpt_sample{std::move(csv.sample), std::move(csv.ratio_column)};
    });
}

void drpt_sample_free(drpt_sample* sample) { delete sample; }

size_t drpt_sample_n(const drpt_sample* sample) { return sample ? sample->data.n() : 0; }
size_t drpt_sample_m(const drpt_sample* sample) { return sample ? sample->data.m() : 0; }
size_t drpt_sample_dim(const drpt_sample* sample) { return sample ? sample->data.dim() : 0; }
int drpt_sample_is_categorical(const drpt_sample* sample) {
    return sample && sample->data.is_categorical() ? 1 : 0;
}
int drpt_sample_has_csv_ratio(const drpt_sample* sample) {
    return sample && !sample->csv_ratio.empty() ? 1 : 0;
}

drpt_status drpt_sample_csv_ratio(const drpt_sample* sample, drpt_ratio** out) {
    if (!sample || !out) return invalid("null pointer argument");
    return guarded([&] {
        drpt::require(!sample->csv_ratio.empty(), drpt::ErrorCode::InvalidArgument,
                      "the csv had no `r` column");
        *out = new drpt_ratio{drpt::RatioFunction::precomputed(sample->csv_ratio)};
    });
}

drpt_status drpt_ratio_expression(const char* text, drpt_ratio** out) {
    if (!text || !out) return invalid("null pointer argument");
    return guarded([&] { *out = new drpt_ratio{drpt::RatioFunction::expression(text)}; });
}

drpt_status drpt_ratio_table(const double* values, size_t count, drpt_ratio** out) {
    if (!values || !out) return invalid("null pointer argument");
    return guarded([&] {
        *out = new drpt_ratio{
            drpt::RatioFunction::table(std::vector<double>(values, values + count))};
    });
}

drpt_status drpt_ratio_precomputed(const double* values, size_t count, drpt_ratio** out) {
    if (!values || !out) return invalid("null pointer argument");
    return guarded([&] {
        *out = new drpt_ratio{
            drpt::RatioFunction::precomputed(std::vector<double>(values, values + count))};
    });
}

drpt_status drpt_ratio_table_from_json_file(const char* path, drpt_ratio** out) {
    if (!path || !out) return invalid("null pointer argument");
    return guarded([&] {
        std::ifstream in(path, std::ios::binary);
        drpt::require(in.good(), drpt::ErrorCode::IoError,
                      std::string("cannot open ratio file: ") + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            drpt::fail(drpt::ErrorCode::ParseError,
                       std::string("bad ratio json: ") + e.what());
        }
        std::vector<double> values;
        if (j.is_array()) {
            values = j.get<std::vector<double>>();
        } else if (j.is_object() && j.contains("r")) {
            values = j.at("r").get<std::vector<double>>();
        } else {
            drpt::fail(drpt::ErrorCode::ParseError,
                       "ratio json must be an array or an object with key 'r'");
        }
        *out = new drpt_ratio{drpt::RatioFunction::table(std::move(values))};
    });
}

drpt_status drpt_ratio_eval(const drpt_ratio* ratio, const drpt_sample* sample, size_t index,
                            double* out) {
    if (!ratio || !sample || !out) return invalid("null pointer argument");
    return guarded([&] { *out = ratio->fn.eval(sample->data, index); });
}

void drpt_ratio_free(drpt_ratio* ratio) { delete ratio; }

drpt_status drpt_config_new(drpt_config** out) {
    if (!out) return invalid("null pointer argument");
    return guarded([&] { *out = new drpt_config{}; });
}

drpt_status drpt_config_set_sweeps(drpt_config* config, size_t sweeps) {
    if (!config) return invalid("null config");
    config->cfg.sweeps = sweeps;
    return DRPT_OK;
}

drpt_status drpt_config_set_copies(drpt_config* config, size_t copies) {
    if (!config) return invalid("null config");
    if (copies < 1) return invalid("need H >= 1 copies");
    config->cfg.copies = copies;
    return DRPT_OK;
}

drpt_status drpt_config_set_seed(drpt_config* config, uint64_t seed) {
    if (!config) return invalid("null config");
    config->cfg.seed = seed;
    return DRPT_OK;
}

drpt_status drpt_config_set_alpha(drpt_config* config, double alpha) {
    if (!config) return invalid("null config");
    if (!(alpha > 0.0 && alpha < 1.0)) return invalid("alpha must be in (0,1)");
    config->cfg.alpha = alpha;
    return DRPT_OK;
}

drpt_status drpt_config_set_statistic(drpt_config* config, drpt_statistic statistic) {
    if (!config) return invalid("null config");
    switch (statistic) {
        case DRPT_STAT_V: config->cfg.statistic = drpt::StatKind::VStat; return DRPT_OK;
        case DRPT_STAT_U: config->cfg.statistic = drpt::StatKind::UStat; return DRPT_OK;
        case DRPT_STAT_DISCRETE:
            config->cfg.statistic = drpt::StatKind::DiscreteAbs;
            return DRPT_OK;
        case DRPT_STAT_IPM: config->cfg.statistic = drpt::StatKind::GenericIpm; return DRPT_OK;
    }
    return invalid("unknown statistic");
}

drpt_status drpt_config_set_kernel(drpt_config* config, drpt_kernel kernel) {
    if (!config) return invalid("null config");
    const bool median = config->cfg.kernel.median_heuristic;
    const double zeta = config->cfg.kernel.bandwidth;
    switch (kernel) {
        case DRPT_KERNEL_GAUSSIAN:
            config->cfg.kernel = drpt::KernelSpec{drpt::KernelFamily::Gaussian, median, zeta};
            return DRPT_OK;
        case DRPT_KERNEL_LAPLACE:
            config->cfg.kernel = drpt::KernelSpec{drpt::KernelFamily::Laplace, median, zeta};
            return DRPT_OK;
        case DRPT_KERNEL_COLLISION:
            config->cfg.kernel = drpt::KernelSpec::collision();
            return DRPT_OK;
    }
    return invalid("unknown kernel");
}

drpt_status drpt_config_set_bandwidth(drpt_config* config, double bandwidth) {
    if (!config) return invalid("null config");
    if (bandwidth > 0.0) {
        config->cfg.kernel.median_heuristic = false;
        config->cfg.kernel.bandwidth = bandwidth;
    } else {
        config->cfg.kernel.median_heuristic = true;
        config->cfg.kernel.bandwidth = 0.0;
    }
    return DRPT_OK;
}

drpt_status drpt_config_set_path(drpt_config* config, drpt_path path) {
    if (!config) return invalid("null config");
    switch (path) {
        case DRPT_PATH_AUTO: config->cfg.path = drpt::ResamplingPath::Auto; return DRPT_OK;
        case DRPT_PATH_MCMC: config->cfg.path = drpt::ResamplingPath::Mcmc; return DRPT_OK;
        case DRPT_PATH_EXACT:
            config->cfg.path = drpt::ResamplingPath::DiscreteExact;
            return DRPT_OK;
    }
    return invalid("unknown path");
}

drpt_status drpt_config_set_variant(drpt_config* config, int weighted) {
    if (!config) return invalid("null config");
    config->cfg.variant = weighted ? drpt::AcceptanceVariant::LambdaWeighted
                                   : drpt::AcceptanceVariant::Plain;
    return DRPT_OK;
}

drpt_status drpt_config_set_threads(drpt_config* config, unsigned threads) {
    if (!config) return invalid("null config");
    config->cfg.threads = threads;
    return DRPT_OK;
}

void drpt_config_free(drpt_config* config) { delete config; }

drpt_status drpt_run_test(const drpt_sample* sample, const drpt_ratio* ratio,
                          const drpt_config* config, drpt_result** out) {
    if (!sample || !ratio || !config || !out) return invalid("null pointer argument");
    return guarded([&] {
        *out = new drpt_result{drpt::run_drpt(sample->data, ratio->fn, config->cfg)};
    });
}

drpt_status drpt_result_p_value(const drpt_result* result, double* out) {
    if (!result || !out) return invalid("null pointer argument");
    *out = result->res.p_value;
    return DRPT_OK;
}

drpt_status drpt_result_statistic(const drpt_result* result, double* out) {
    if (!result || !out) return invalid("null pointer argument");
    *out = result->res.t_observed;
    return DRPT_OK;
}

drpt_status drpt_result_lambda_hat(const drpt_result* result, double* out) {
    if (!result || !out) return invalid("null pointer argument");
    *out = result->res.lambda_hat;
    return DRPT_OK;
}

drpt_status drpt_result_reject(const drpt_result* result, int* out) {
    if (!result || !out) return invalid("null pointer argument");
    *out = result->res.reject ? 1 : 0;
    return DRPT_OK;
}

drpt_status drpt_result_elapsed_ms(const drpt_result* result, double* out) {
    if (!result || !out) return invalid("null pointer argument");
    *out = result->res.elapsed_ms;
    return DRPT_OK;
}

drpt_status drpt_result_permuted_count(const drpt_result* result, size_t* out) {
    if (!result || !out) return invalid("null pointer argument");
    *out = result->res.t_permuted.size();
    return DRPT_OK;
}

drpt_status drpt_result_permuted(const drpt_result* result, double* buffer, size_t capacity,
                                 size_t* written) {
    if (!result || !buffer || !written) return invalid("null pointer argument");
    const std::size_t count = std::min(capacity, result->res.t_permuted.size());
    std::memcpy(buffer, result->res.t_permuted.data(), count * sizeof(double));
    *written = count;
    return DRPT_OK;
}

drpt_status drpt_result_to_json(const drpt_result* result, char** out) {
    if (!result || !out) return invalid("null pointer argument");
    return guarded([&] { *out = dup_string(result->res.to_json()); });
}

void drpt_result_free(drpt_result* result) { delete result; }

drpt_status drpt_invert_grid(const drpt_sample* sample, const char* expr_template,
                             const double* grid, size_t grid_len, const drpt_config* config,
                             double alpha, char** csv_out) {
    if (!sample || !expr_template || !grid || !config || !csv_out) {
        return invalid("null pointer argument");
    }
    return guarded([&] {
        std::vector<drpt::RatioFunction> candidates;
        candidates.reserve(grid_len);
        for (size_t k = 0; k < grid_len; ++k) {
            candidates.push_back(
                drpt::RatioFunction::expression(expr_template, {{"t", grid[k]}}));
        }
        const auto outcomes =
            drpt::invert_confidence_set(sample->data, candidates, alpha, config->cfg);
        std::ostringstream csv;
        csv << "candidate,p_value,accepted\n";
        for (size_t k = 0; k < grid_len; ++k) {
            csv << drpt::format_double(grid[k]) << ","
                << drpt::format_double(outcomes[k].p_value) << ","
                << (outcomes[k].accepted ? 1 : 0) << "\n";
        }
        *csv_out = dup_string(csv.str());
    });
}

drpt_status drpt_wald_odds_interval(int64_t x1, int64_t n, int64_t y1, int64_t m, double alpha,
                                    double* lo, double* hi) {
    if (!lo || !hi) return invalid("null pointer argument");
    return guarded([&] {
        const auto interval = drpt::wald_odds_interval(x1, n, y1, m, alpha);
        *lo = interval.first;
        *hi = interval.second;
    });
}

drpt_status drpt_run_scenario(const char* scenario, const char* config_json,
                              const char* out_dir, char** summary_json) {
    if (!scenario || !config_json || !out_dir) return invalid("null pointer argument");
    return guarded([&] {
        drpt::ExperimentConfig cfg;
        cfg.scenario = drpt::scenario_from_name(scenario);
        cfg.out_dir = out_dir;
        try {
            const auto j = nlohmann::json::parse(config_json);
            if (j.contains("grid")) cfg.grid = j.at("grid").get<std::vector<double>>();
            if (j.contains("n")) cfg.n = j.at("n").get<std::size_t>();
            if (j.contains("m")) cfg.m = j.at("m").get<std::size_t>();
            if (j.contains("replicates")) {
                cfg.replicates = j.at("replicates").get<std::size_t>();
            }
            if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
            if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
            if (j.contains("sweeps")) cfg.sweeps = j.at("sweeps").get<std::size_t>();
            if (j.contains("copies")) cfg.copies = j.at("copies").get<std::size_t>();
            if (j.contains("threads")) cfg.threads = j.at("threads").get<unsigned>();
            if (j.contains("train_size")) {
                cfg.train_size = j.at("train_size").get<std::size_t>();
            }
            if (j.contains("estimator")) cfg.estimator = j.at("estimator").get<std::string>();
            if (j.contains("mu")) cfg.mu = j.at("mu").get<double>();
        } catch (const nlohmann::json::exception& e) {
            drpt::fail(drpt::ErrorCode::ParseError,
                       std::string("bad scenario config json: ") + e.what());
        }
        const auto result = drpt::run_experiment(cfg);
        if (summary_json) {
            nlohmann::json j;
            j["scenario"] = scenario;
            nlohmann::json points = nlohmann::json::array();
            for (const auto& p : result.points) {
                points.push_back({{"param", p.parameter},
                                  {"rate", p.rate},
                                  {"se", p.se},
                                  {"reps", p.replicates}});
            }
            j["points"] = points;
            if (!result.bounds.empty()) j["size_bounds"] = result.bounds;
            *summary_json = dup_string(j.dump(2));
        }
    });
}

} // extern "C"
