#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "drpt/numeric.hpp"
#include "drpt/parallel.hpp"
#include "drpt/rng.hpp"

#include "support/stat_checks.hpp"

using drpt::RngStream;

TEST_CASE("streams are reproducible and distinct") {
    RngStream a(42, 7);
    RngStream b(42, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream base(42, 7);
    RngStream other_stream(42, 8);
    RngStream other_seed(43, 7);
    bool differs_stream = false, differs_seed = false;
    for (int i = 0; i < 10; ++i) {
        const auto v = base.next_u64();
        if (other_stream.next_u64() != v) differs_stream = true;
        if (other_seed.next_u64() != v) differs_seed = true;
    }
    CHECK(differs_stream);
    CHECK(differs_seed);
}

TEST_CASE("child streams are distinct from parents and siblings") {
    RngStream root(1, 0);
    RngStream c0 = root.child(0);
    RngStream c1 = root.child(1);
    RngStream nested = root.child(0).child(1);
    std::vector<std::uint64_t> draws;
    for (auto* s : {&c0, &c1, &nested}) draws.push_back(s->next_u64());
    CHECK(draws[0] != draws[1]);
    CHECK(draws[0] != draws[2]);
    CHECK(draws[1] != draws[2]);
}

TEST_CASE("uniform01 lands in [0,1) with the right mean") {
    RngStream rng(7, 1);
    double acc = 0.0;
    const int trials = 200000;
    for (int i = 0; i < trials; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        acc += u;
    }
    const double mean = acc / trials;
    CHECK(std::fabs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / trials));
}

TEST_CASE("below is unbiased across its range") {
    RngStream rng(11, 3);
    std::vector<double> counts(7, 0.0);
    const int trials = 140000;
    for (int i = 0; i < trials; ++i) counts[rng.below(7)] += 1.0;
    const std::vector<double> expected(7, 1.0 / 7.0);
    CHECK(checks::chi_square_gof_p(counts, expected) > 1e-4);
}

TEST_CASE("normal moments") {
    RngStream rng(5, 9);
    const int trials = 200000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < trials; ++i) {
        const double x = rng.normal();
        s1 += x;
        s2 += x * x;
    }
    const double mean = s1 / trials;
    const double var = s2 / trials - mean * mean;
    CHECK(std::fabs(mean) < 3.0 / std::sqrt(static_cast<double>(trials)));
    CHECK(std::fabs(var - 1.0) < 3.0 * std::sqrt(2.0 / trials));
}

TEST_CASE("shuffle_prefix draws uniform ordered prefixes") {
    RngStream rng(3, 2);
    std::map<std::vector<std::uint32_t>, double> counts;
    const int trials = 60000;
    for (int i = 0; i < trials; ++i) counts[rng.shuffle_prefix(10, 3, 2)] += 1.0;
    CHECK(counts.size() == 6);
    std::vector<double> observed;
    for (const auto& [key, c] : counts) {
        for (std::uint32_t v : key) {
            REQUIRE(v >= 10);
            REQUIRE(v < 13);
        }
        observed.push_back(c);
    }
    CHECK(checks::chi_square_gof_p(observed, std::vector<double>(6, 1.0 / 6.0)) > 1e-4);
}

TEST_CASE("parallel_for fills identical slots for any thread count") {
    auto run = [](unsigned threads) {
        std::vector<double> out(1000);
        drpt::parallel_for(out.size(), threads, [&](std::size_t i) {
            RngStream rng(99, 0);
            out[i] = rng.child(i).uniform01();
        });
        return out;
    };
    const auto t1 = run(1);
    CHECK(run(2) == t1);
    CHECK(run(8) == t1);
}

TEST_CASE("normal quantile matches the cdf") {
    for (double p : {0.001, 0.025, 0.2, 0.5, 0.8, 0.975, 0.999}) {
        CHECK(drpt::normal_cdf(drpt::normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
    }
    CHECK(drpt::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 12345.678901234567, -2.5e-11, 0.0}) {
        CHECK(std::stod(drpt::format_double(v)) == v);
    }
}
