#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drpt/engine.hpp"
#include "drpt/rng.hpp"

namespace drpt {

enum class Scenario { E1, E1Prime, E2, E3, Misspec, Causal, Gamma1 };

Scenario scenario_from_name(const std::string& name);
const char* scenario_name(Scenario scenario) noexcept;

struct ExperimentConfig {
    Scenario scenario = Scenario::E3;
    std::vector<double> grid;     // eta / nu / gamma / r values per scenario
    std::size_t n = 150;
    std::size_t m = 150;
    std::size_t replicates = 200;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out_dir;

    // engine settings; statistic/kernel/path defaults are scenario-specific
    std::size_t sweeps = 50;
    std::size_t copies = 99;

    // causal scenario
    std::size_t train_size = 1000;
    std::string estimator = "ll"; // "ll" or "klr"

    // misspecification scenario: the data-generating mean
    double mu = 1.0;

    void validate() const;
};

struct PowerPoint {
    double parameter = 0.0;
    double rate = 0.0;          // rejection rate (mean fraction for gamma1)
    double se = 0.0;
    std::size_t replicates = 0;
    double mean_runtime_ms = 0.0; // telemetry only; kept out of power.csv
};

struct GeneratedData {
    PooledSample sample;
    RatioFunction ratio;
};

// X ~ Unif([0,1]^2)^n; Y is the (1+eta)^-1 P_q x P_q + eta/(1+eta) arcsine
// mixture (or the P_q x Unif variant). At eta = 0 the null holds with ratio
// 4*x1*x2 (2*x1 for the variant).
GeneratedData gen_bivariate_e1(double eta, std::size_t n, std::size_t m, RngStream& rng,
                               bool prime_variant = false);

// Binary scenario: f = Ber(1/2), g = Ber(3(1-eta)/4 + eta/4), ratio (1,3).
GeneratedData gen_binary_e3(double eta, std::size_t n, std::size_t m, RngStream& rng);

// H0 Gaussian data f = N(0,1), g = N(mu,1) paired with the misspecified
// ratio exp(nu*x - nu^2/2).
GeneratedData gen_gaussian_misspec(double mu, double nu, std::size_t n, std::size_t m,
                                   RngStream& rng);

// Type-I-error bound alpha inflation for the misspecified Gaussian ratio:
// 2*Phi(sqrt(m)|mu-nu|/2) - 1.
double misspec_size_bound(double mu, double nu, std::size_t m);

// Propensity scenario: covariates N(0, I_10), treatment D with
// P(D=1|z) = 1/(1+exp(eta_gamma(z))), eta_gamma = beta0 + beta'z +
// gamma*(sin(10 z1) + z2 z3). Untreated points form the first sample.
// Regenerates until both groups have at least two points.
PooledSample gen_causal_propensity(double gamma, std::size_t total, RngStream& rng);

// Published coefficients of the propensity model and the (diagonal)
// covariate standard deviations.
double causal_beta0();
const std::vector<double>& causal_beta();
const std::vector<double>& causal_sigma_diag();

struct RejectionBaselineResult {
    std::size_t n_effective = 0;
    double p_value = 1.0;
    bool all_rejected = false;
};

// Rejection-sampling baseline: thin the first sample with acceptance
// r(x)/max r over the observed points, then run a classical uniform
// permutation MMD test on the reduced data.
RejectionBaselineResult rejection_sample_baseline(const PooledSample& sample,
                                                  const RatioFunction& ratio,
                                                  std::size_t copies, RngStream& rng);

struct ExperimentResult {
    std::vector<PowerPoint> points;
    std::vector<double> bounds; // misspec: theoretical size bound per grid point
};

// Runs the replicate grid and writes power.csv, power.svg, manifest.json and
// timings.csv (telemetry) into out_dir when it is nonempty.
ExperimentResult run_experiment(const ExperimentConfig& config);

} // namespace drpt
