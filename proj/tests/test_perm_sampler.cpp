#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "drpt/lambda.hpp"
#include "drpt/permutation.hpp"
#include "drpt/rng.hpp"

#include "support/datasets.hpp"
#include "support/oracles.hpp"
#include "support/stat_checks.hpp"

using namespace drpt;

TEST_CASE("plain acceptance probabilities") {
    CHECK(acceptance_plain(3.0, 1.0) == 0.75);
    for (double c : {0.1, 1.0, 42.0}) CHECK(acceptance_plain(c, c) == 0.5);
    const double p = acceptance_plain(5.0, 2.0);
    CHECK(p / (1.0 - p) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK_THROWS_AS((void)acceptance_plain(0.0, 1.0), Error);
}

TEST_CASE("plain acceptance is invariant under relabel + reciprocal") {
    RngStream rng(17, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const double r_i = 0.05 + 10.0 * rng.uniform01();
        const double r_j = 0.05 + 10.0 * rng.uniform01();
        const double direct = acceptance_plain(r_i, r_j);
        // swapped roles use reciprocals with the j-value leading
        const double relabelled = (1.0 / r_j) / (1.0 / r_i + 1.0 / r_j);
        CHECK(std::fabs(direct - relabelled) <= 1e-15);
    }
}

TEST_CASE("weighted acceptance probabilities") {
    // n=m=1, lambda=1/2, r=(1,4): 0.5*1*1 / ((1+0.5)(1+2)) = 1/9
    CHECK(acceptance_weighted(1.0, 4.0, 0.5, 1, 1) ==
          doctest::Approx(0.5 / 4.5).epsilon(1e-15));
    // equal ratios at lambda = 1/c give mn/(n+m)^2
    for (std::size_t n : {2ul, 5ul}) {
        for (std::size_t m : {3ul, 5ul}) {
            const double c = 2.5;
            const double expected = static_cast<double>(n * m) /
                                    (static_cast<double>(n + m) * static_cast<double>(n + m));
            CHECK(acceptance_weighted(c, c, 1.0 / c, n, m) ==
                  doctest::Approx(expected).epsilon(1e-14));
        }
    }
    // swap odds p(i,j)/p(j,i) equal r_i/r_j
    const double pij = acceptance_weighted(5.0, 2.0, 0.7, 4, 6);
    const double pji = acceptance_weighted(2.0, 5.0, 0.7, 4, 6);
    CHECK(pij / pji == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(pij > 0.0);
    CHECK(pij < 1.0);
}

TEST_CASE("sweep preserves the bijection") {
    const std::size_t n = 6, m = 9;
    const auto rvalues = datasets::random_positive(n + m, 5);
    const double lambda = solve_lambda_hat(n, m, rvalues).value;
    Permutation sigma = identity_permutation(n + m);
    RngStream rng(1, 2);
    for (int t = 0; t < 50; ++t) {
        sweep(sigma, rvalues, AcceptanceVariant::Plain, n, m, lambda, rng);
        REQUIRE(is_permutation(sigma));
    }
    for (int t = 0; t < 50; ++t) {
        sweep(sigma, rvalues, AcceptanceVariant::LambdaWeighted, n, m, lambda, rng);
        REQUIRE(is_permutation(sigma));
    }
}

TEST_CASE("n=m=1 sweep swaps with probability r1/(r1+r2) from identity") {
    // data (a,b) with r(a)=1, r(b)=3; identity has a in the first slot
    const std::vector<double> rvalues = {1.0, 3.0};
    CHECK(acceptance_plain(rvalues[0], rvalues[1]) == 0.25);

    RngStream rng(7, 7);
    int swaps = 0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
        Permutation sigma = identity_permutation(2);
        RngStream sub = rng.child(t);
        sweep(sigma, rvalues, AcceptanceVariant::Plain, 1, 1, 1.0, sub);
        if (sigma[0] == 1) ++swaps;
    }
    const double freq = static_cast<double>(swaps) / trials;
    CHECK(std::fabs(freq - 0.25) < 3.0 * std::sqrt(0.25 * 0.75 / trials));
}

TEST_CASE("exact permutation distribution") {
    SUBCASE("n=m=1, r=(1,3)") {
        const auto dist = exact_permutation_distribution(1, 1, {1.0, 3.0});
        REQUIRE(dist.size() == 2);
        CHECK(dist.at({1}) == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(dist.at({0}) == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("constant r gives the uniform split law") {
        const auto dist = exact_permutation_distribution(2, 3, std::vector<double>(5, 2.0));
        REQUIRE(dist.size() == 10); // C(5,3)
        for (const auto& [split, prob] : dist) {
            CHECK(prob == doctest::Approx(0.1).epsilon(1e-12));
        }
    }
    SUBCASE("n=m=2, r=(1,1,2,2)") {
        const auto dist = exact_permutation_distribution(2, 2, {1.0, 1.0, 2.0, 2.0});
        REQUIRE(dist.size() == 6);
        CHECK(dist.at({2, 3}) == doctest::Approx(4.0 / 13.0).epsilon(1e-12));
        CHECK(dist.at({0, 1}) == doctest::Approx(1.0 / 13.0).epsilon(1e-12));
        for (const auto& split : {std::vector<std::uint32_t>{0, 2}, {0, 3}, {1, 2}, {1, 3}}) {
            CHECK(dist.at(split) == doctest::Approx(2.0 / 13.0).epsilon(1e-12));
        }
    }
    SUBCASE("normalization and the size guard") {
        const auto rvalues = datasets::random_positive(10, 3);
        const auto dist = exact_permutation_distribution(4, 6, rvalues);
        double total = 0.0;
        for (const auto& [split, prob] : dist) total += prob;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        CHECK_THROWS_AS((void)exact_permutation_distribution(6, 7, datasets::random_positive(13, 3)),
                        Error);
    }
}

TEST_CASE("one-sweep kernel satisfies detailed balance") {
    struct Instance {
        std::size_t n, m;
        std::uint64_t seed;
    };
    for (const auto& inst : {Instance{1, 1, 1}, {1, 2, 2}, {2, 2, 3}, {2, 3, 4}, {3, 3, 5}}) {
        const auto rvalues = datasets::random_positive(inst.n + inst.m, inst.seed, 0.3, 4.0);
        const double lambda = solve_lambda_hat(inst.n, inst.m, rvalues).value;
        const auto pi = oracles::permutation_law(inst.n, inst.m, rvalues);

        for (auto variant : {AcceptanceVariant::Plain, AcceptanceVariant::LambdaWeighted}) {
            std::map<Permutation, std::map<Permutation, double>> kernel;
            for (const auto& [p, prob] : pi) {
                kernel[p] = oracles::sweep_kernel_row(p, inst.n, inst.m, rvalues, variant,
                                                      lambda);
                double row_total = 0.0;
                for (const auto& [q, t] : kernel[p]) row_total += t;
                REQUIRE(row_total == doctest::Approx(1.0).epsilon(1e-12));
            }
            for (const auto& [p, row] : kernel) {
                for (const auto& [q, forward] : row) {
                    const auto& back_row = kernel.at(q);
                    const auto it = back_row.find(p);
                    const double backward = it == back_row.end() ? 0.0 : it->second;
                    CHECK(std::fabs(pi.at(p) * forward - pi.at(q) * backward) <= 1e-10);
                }
            }
        }
    }
}

namespace {

std::map<std::vector<std::uint32_t>, double> empirical_split_law(
    std::size_t n, std::size_t m, const std::vector<double>& rvalues,
    AcceptanceVariant variant, std::size_t sweeps, std::size_t draws, std::uint64_t seed) {
    const double lambda = solve_lambda_hat(n, m, rvalues).value;
    std::map<std::vector<std::uint32_t>, double> counts;
    for (std::size_t d = 0; d < draws; ++d) {
        ChainConfig config;
        config.sweeps = sweeps;
        config.copies = 1;
        config.variant = variant;
        config.seed = seed + d;
        const auto star = run_star_scheme(n, m, rvalues, config, lambda);
        counts[second_block_split(star.copies[0], n)] += 1.0;
    }
    for (auto& [split, c] : counts) c /= static_cast<double>(draws);
    return counts;
}

} // namespace

TEST_CASE("star scheme reaches the exact split law (smoke)") {
    const std::size_t n = 2, m = 2;
    const std::vector<double> rvalues = {1.0, 2.0, 3.0, 4.0};
    const auto exact = exact_permutation_distribution(n, m, rvalues);
    for (auto variant : {AcceptanceVariant::Plain, AcceptanceVariant::LambdaWeighted}) {
        const auto empirical =
            empirical_split_law(n, m, rvalues, variant, 60, 20000, 1234);
        CHECK(checks::tv_distance(exact, empirical) < 0.02);
    }
}

TEST_CASE("one sweep started at stationarity stays stationary") {
    const std::size_t n = 2, m = 2;
    const std::vector<double> rvalues = {1.0, 2.0, 3.0, 4.0};
    const double lambda = solve_lambda_hat(n, m, rvalues).value;
    const auto exact = exact_permutation_distribution(n, m, rvalues);

    std::vector<std::vector<std::uint32_t>> splits;
    std::vector<double> probs, cumulative;
    double acc = 0.0;
    for (const auto& [split, prob] : exact) {
        splits.push_back(split);
        probs.push_back(prob);
        acc += prob;
        cumulative.push_back(acc);
    }

    RngStream rng(88, 1);
    std::map<std::vector<std::uint32_t>, double> counts;
    const std::size_t replicates = 100000;
    for (std::size_t rep = 0; rep < replicates; ++rep) {
        RngStream sub = rng.child(rep);
        const double u = sub.uniform01();
        std::size_t idx = 0;
        while (idx + 1 < cumulative.size() && u >= cumulative[idx]) ++idx;

        // canonical permutation with the drawn split
        Permutation sigma;
        std::vector<bool> in_second(n + m, false);
        for (std::uint32_t v : splits[idx]) in_second[v] = true;
        for (std::uint32_t v = 0; v < n + m; ++v) {
            if (!in_second[v]) sigma.push_back(v);
        }
        sigma.insert(sigma.end(), splits[idx].begin(), splits[idx].end());

        sweep(sigma, rvalues, AcceptanceVariant::Plain, n, m, lambda, sub);
        counts[second_block_split(sigma, n)] += 1.0;
    }

    std::vector<double> observed;
    for (const auto& split : splits) observed.push_back(counts[split]);
    CHECK(checks::chi_square_gof_p(observed, probs) > 0.01);
}

TEST_CASE("star scheme is deterministic and thread-count invariant") {
    const std::size_t n = 8, m = 12;
    const auto rvalues = datasets::random_positive(n + m, 21);
    const double lambda = solve_lambda_hat(n, m, rvalues).value;

    ChainConfig config;
    config.sweeps = 25;
    config.copies = 7;
    config.seed = 555;
    config.threads = 1;
    const auto base = run_star_scheme(n, m, rvalues, config, lambda);
    for (unsigned threads : {2u, 8u}) {
        config.threads = threads;
        const auto again = run_star_scheme(n, m, rvalues, config, lambda);
        CHECK(again.hub == base.hub);
        CHECK(again.copies == base.copies);
    }
    for (const auto& copy : base.copies) CHECK(is_permutation(copy));

    config.seed = 556;
    const auto different = run_star_scheme(n, m, rvalues, config, lambda);
    CHECK(different.copies != base.copies);
}

TEST_CASE("default sweep count follows the imbalance rule") {
    CHECK(default_sweeps(100, 100) ==
          static_cast<std::size_t>(std::ceil(8.0 * std::log(200.0))));
    CHECK(default_sweeps(100, 2000) ==
          static_cast<std::size_t>(std::ceil(8.0 * 20.0 * std::log(2100.0))));
    CHECK(default_sweeps(1, 1) >= 1);
}
