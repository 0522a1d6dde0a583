// Command-line front end for the density ratio permutation test library.
// Talks to the library exclusively through the C API in drpt/drpt.h.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drpt/drpt.h"

namespace {

[[noreturn]] void die(const std::string& context) {
    std::cerr << "error: " << context;
    const char* detail = drpt_last_error();
    if (detail && *detail) std::cerr << ": " << detail;
    std::cerr << "\n";
    std::exit(1);
}

void check(drpt_status status, const std::string& context) {
    if (status != DRPT_OK) die(context + " (" + drpt_status_name(status) + ")");
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        double start = 0.0, stop = 0.0, step = 0.0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 ||
            step <= 0.0) {
            die("grid must be start:stop:step with step > 0");
        }
        for (double v = start; v <= stop + 1e-12 * step; v += step) values.push_back(v);
        return values;
    }
    std::string token;
    std::stringstream ss(text);
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) values.push_back(std::stod(token));
    }
    if (values.empty()) die("empty grid");
    return values;
}

drpt_sample* load_sample(const std::string& path) {
    drpt_sample* sample = nullptr;
    check(drpt_sample_from_csv(path.c_str(), &sample), "reading " + path);
    return sample;
}

drpt_ratio* load_ratio(const std::string& spec, drpt_sample* sample) {
    drpt_ratio* ratio = nullptr;
    if (spec == "column:r") {
        if (!drpt_sample_has_csv_ratio(sample)) die("the csv has no `r` column");
        check(drpt_sample_csv_ratio(sample, &ratio), "loading ratio column");
        return ratio;
    }
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
        check(drpt_ratio_table_from_json_file(spec.c_str(), &ratio), "reading " + spec);
        return ratio;
    }
    check(drpt_ratio_expression(spec.c_str(), &ratio), "parsing ratio expression");
    return ratio;
}

struct EngineOptions {
    std::size_t sweeps = 0;
    std::size_t copies = 99;
    double alpha = 0.05;
    std::uint64_t seed = 20250801;
    std::string stat = "u";
    std::string kernel = "gaussian";
    std::string bandwidth = "median";
    std::string path = "auto";
    unsigned threads = 1;
    bool weighted_acceptance = false;
};

void add_engine_options(CLI::App* cmd, EngineOptions& opt) {
    cmd->add_option("--S", opt.sweeps, "MCMC sweeps per chain (0 = automatic)");
    cmd->add_option("--H", opt.copies, "number of permutation copies");
    cmd->add_option("--alpha", opt.alpha, "test level in (0,1)");
    cmd->add_option("--seed", opt.seed, "master random seed");
    cmd->add_option("--stat", opt.stat, "test statistic: v, u, discrete, ipm");
    cmd->add_option("--kernel", opt.kernel, "kernel: gaussian, laplace, collision");
    cmd->add_option("--bandwidth", opt.bandwidth, "kernel bandwidth: median or a float");
    cmd->add_option("--path", opt.path, "resampling path: auto, mcmc, exact");
    cmd->add_option("--threads", opt.threads, "worker threads (results are thread-count invariant)");
    cmd->add_flag("--weighted-acceptance", opt.weighted_acceptance,
                  "use the lambda-weighted acceptance probabilities");
}

drpt_config* build_config(const EngineOptions& opt) {
    drpt_config* config = nullptr;
    check(drpt_config_new(&config), "allocating config");
    check(drpt_config_set_sweeps(config, opt.sweeps), "setting S");
    check(drpt_config_set_copies(config, opt.copies), "setting H");
    check(drpt_config_set_alpha(config, opt.alpha), "setting alpha");
    check(drpt_config_set_seed(config, opt.seed), "setting seed");
    check(drpt_config_set_threads(config, opt.threads), "setting threads");
    check(drpt_config_set_variant(config, opt.weighted_acceptance ? 1 : 0), "setting variant");

    if (opt.stat == "v") {
        check(drpt_config_set_statistic(config, DRPT_STAT_V), "setting statistic");
    } else if (opt.stat == "u") {
        check(drpt_config_set_statistic(config, DRPT_STAT_U), "setting statistic");
    } else if (opt.stat == "discrete") {
        check(drpt_config_set_statistic(config, DRPT_STAT_DISCRETE), "setting statistic");
    } else if (opt.stat == "ipm") {
        check(drpt_config_set_statistic(config, DRPT_STAT_IPM), "setting statistic");
    } else {
        die("unknown statistic '" + opt.stat + "'");
    }

    if (opt.kernel == "gaussian") {
        check(drpt_config_set_kernel(config, DRPT_KERNEL_GAUSSIAN), "setting kernel");
    } else if (opt.kernel == "laplace") {
        check(drpt_config_set_kernel(config, DRPT_KERNEL_LAPLACE), "setting kernel");
    } else if (opt.kernel == "collision") {
        check(drpt_config_set_kernel(config, DRPT_KERNEL_COLLISION), "setting kernel");
    } else {
        die("unknown kernel '" + opt.kernel + "'");
    }

    if (opt.bandwidth == "median") {
        check(drpt_config_set_bandwidth(config, 0.0), "setting bandwidth");
    } else {
        check(drpt_config_set_bandwidth(config, std::stod(opt.bandwidth)),
              "setting bandwidth");
    }

    if (opt.path == "auto") {
        check(drpt_config_set_path(config, DRPT_PATH_AUTO), "setting path");
    } else if (opt.path == "mcmc") {
        check(drpt_config_set_path(config, DRPT_PATH_MCMC), "setting path");
    } else if (opt.path == "exact") {
        check(drpt_config_set_path(config, DRPT_PATH_EXACT), "setting path");
    } else {
        die("unknown path '" + opt.path + "'");
    }
    return config;
}

int run_test(const std::string& data_path, const std::string& ratio_spec,
             const EngineOptions& opt, const std::string& json_out) {
    drpt_sample* sample = load_sample(data_path);
    drpt_ratio* ratio = load_ratio(ratio_spec, sample);
    drpt_config* config = build_config(opt);

    drpt_result* result = nullptr;
    check(drpt_run_test(sample, ratio, config, &result), "running the test");

    double p = 0.0, t = 0.0, lambda = 0.0, ms = 0.0;
    int reject = 0;
    drpt_result_p_value(result, &p);
    drpt_result_statistic(result, &t);
    drpt_result_lambda_hat(result, &lambda);
    drpt_result_reject(result, &reject);
    drpt_result_elapsed_ms(result, &ms);

    std::printf("p-value     %.10g\n", p);
    std::printf("statistic   %.10g\n", t);
    std::printf("lambda-hat  %.10g\n", lambda);
    std::printf("decision    %s at alpha=%g\n", reject ? "reject" : "fail to reject",
                opt.alpha);
    std::fprintf(stderr, "runtime     %.1f ms\n", ms);

    if (!json_out.empty()) {
        char* json = nullptr;
        check(drpt_result_to_json(result, &json), "serializing the result");
        std::ofstream out(json_out, std::ios::binary);
        if (!out.good()) die("cannot write " + json_out);
        out << json << "\n";
        drpt_string_free(json);
    }

    drpt_result_free(result);
    drpt_config_free(config);
    drpt_ratio_free(ratio);
    drpt_sample_free(sample);
    return 0;
}

int run_invert(const std::string& data_path, const std::string& ratio_template,
               const std::string& grid_text, const EngineOptions& opt,
               const std::string& csv_out) {
    drpt_sample* sample = load_sample(data_path);
    drpt_config* config = build_config(opt);
    const std::vector<double> grid = parse_grid(grid_text);

    char* csv = nullptr;
    check(drpt_invert_grid(sample, ratio_template.c_str(), grid.data(), grid.size(), config,
                           opt.alpha, &csv),
          "inverting the test over the grid");
    if (csv_out.empty()) {
        std::fputs(csv, stdout);
    } else {
        std::ofstream out(csv_out, std::ios::binary);
        if (!out.good()) die("cannot write " + csv_out);
        out << csv;
    }
    drpt_string_free(csv);
    drpt_config_free(config);
    drpt_sample_free(sample);
    return 0;
}

int run_sim(const std::string& scenario, const std::string& grid_text, std::size_t n,
            std::size_t m, std::size_t reps, double alpha, std::uint64_t seed,
            const std::string& out_dir, const EngineOptions& opt, std::size_t train_size,
            const std::string& estimator, double mu) {
    const std::vector<double> grid = parse_grid(grid_text);
    std::string config = "{\"grid\":[";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i) config += ",";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", grid[i]);
        config += buf;
    }
    config += "],\"n\":" + std::to_string(n) + ",\"m\":" + std::to_string(m) +
              ",\"replicates\":" + std::to_string(reps) + ",\"alpha\":" + std::to_string(alpha) +
              ",\"seed\":" + std::to_string(seed) + ",\"sweeps\":" + std::to_string(opt.sweeps) +
              ",\"copies\":" + std::to_string(opt.copies) +
              ",\"threads\":" + std::to_string(opt.threads) +
              ",\"train_size\":" + std::to_string(train_size) + ",\"estimator\":\"" + estimator +
              "\",\"mu\":" + std::to_string(mu) + "}";

    char* summary = nullptr;
    check(drpt_run_scenario(scenario.c_str(), config.c_str(), out_dir.c_str(), &summary),
          "running scenario " + scenario);
    std::fputs(summary, stdout);
    std::fputs("\n", stdout);
    drpt_string_free(summary);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"drpt: density ratio permutation tests"};
    app.require_subcommand(1);

    // test
    auto* test_cmd = app.add_subcommand("test", "run one hypothesis test");
    std::string data_path, ratio_spec, json_out;
    EngineOptions test_opt;
    test_cmd->add_option("--data", data_path, "input csv")->required();
    test_cmd->add_option("--ratio", ratio_spec,
                         "ratio: expression, table.json, or column:r")->required();
    test_cmd->add_option("--json-out", json_out, "write the result as json");
    add_engine_options(test_cmd, test_opt);

    // invert
    auto* invert_cmd = app.add_subcommand("invert", "invert the test over a parameter grid");
    std::string inv_data, inv_template, inv_grid, inv_csv;
    EngineOptions inv_opt;
    invert_cmd->add_option("--data", inv_data, "input csv")->required();
    invert_cmd->add_option("--ratio", inv_template,
                           "ratio expression with free parameter t")->required();
    invert_cmd->add_option("--grid", inv_grid, "start:stop:step or comma list")->required();
    invert_cmd->add_option("--csv-out", inv_csv, "write candidate,p_value,accepted csv");
    add_engine_options(invert_cmd, inv_opt);

    // sim
    auto* sim_cmd = app.add_subcommand("sim", "run a simulation scenario");
    std::string scenario, sim_grid, out_dir, estimator = "ll";
    std::size_t sim_n = 150, sim_m = 150, reps = 200, train_size = 1000;
    double sim_alpha = 0.05, mu = 1.0;
    std::uint64_t sim_seed = 20250801;
    EngineOptions sim_opt;
    sim_cmd->add_option("--scenario", scenario,
                        "e1, e1prime, e2, e3, misspec, causal, gamma1")->required();
    sim_cmd->add_option("--grid", sim_grid, "start:stop:step or comma list")->required();
    sim_cmd->add_option("--n", sim_n, "first-sample size");
    sim_cmd->add_option("--m", sim_m, "second-sample size");
    sim_cmd->add_option("--reps", reps, "replicates per grid point");
    sim_cmd->add_option("--alpha", sim_alpha, "test level");
    sim_cmd->add_option("--seed", sim_seed, "master seed");
    sim_cmd->add_option("--out-dir", out_dir, "output directory")->required();
    sim_cmd->add_option("--train-size", train_size, "causal: training sample size");
    sim_cmd->add_option("--estimator", estimator, "causal: ll or klr");
    sim_cmd->add_option("--mu", mu, "misspec: data-generating mean");
    sim_cmd->add_option("--S", sim_opt.sweeps, "MCMC sweeps per chain");
    sim_cmd->add_option("--H", sim_opt.copies, "permutation copies");
    sim_cmd->add_option("--threads", sim_opt.threads, "worker threads");

    CLI11_PARSE(app, argc, argv);

    if (test_cmd->parsed()) return run_test(data_path, ratio_spec, test_opt, json_out);
    if (invert_cmd->parsed()) {
        return run_invert(inv_data, inv_template, inv_grid, inv_opt, inv_csv);
    }
    if (sim_cmd->parsed()) {
        if (sim_opt.sweeps == 0) sim_opt.sweeps = 50;
        return run_sim(scenario, sim_grid, sim_n, sim_m, reps, sim_alpha, sim_seed, out_dir,
                       sim_opt, train_size, estimator, mu);
    }
    return 0;
}
