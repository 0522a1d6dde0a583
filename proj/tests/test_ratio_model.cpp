#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "drpt/expression.hpp"
#include "drpt/lambda.hpp"
#include "drpt/permutation.hpp"
#include "drpt/ratio.hpp"
#include "drpt/rng.hpp"
#include "drpt/sample.hpp"

#include "support/datasets.hpp"

using namespace drpt;

namespace {

double equation_residual(std::size_t n, std::size_t m, double lambda,
                         const std::vector<double>& rvalues) {
    double s = 0.0;
    for (double r : rvalues) {
        s += 1.0 / (static_cast<double>(n) + lambda * static_cast<double>(m) * r);
    }
    return s - 1.0;
}

} // namespace

TEST_CASE("expression parser handles the ratio grammar") {
    const double x[2] = {0.25, 0.5};
    const std::span<const double> pt(x, 2);

    CHECK(Expression::parse("2+3*4").eval(pt) == 14.0);
    CHECK(Expression::parse("2^3^2").eval(pt) == 512.0); // right-associative
    CHECK(Expression::parse("-x1 + 1").eval(pt) == 0.75);
    CHECK(Expression::parse("4*x1*x2").eval(pt) == doctest::Approx(0.5));
    CHECK(Expression::parse("x*y").eval(pt) == doctest::Approx(0.125)); // aliases
    CHECK(Expression::parse("abs(-3)").eval(pt) == 3.0);
    CHECK(Expression::parse("log(exp(2))").eval(pt) == doctest::Approx(2.0));
    CHECK(Expression::parse("exp(mu*x1 - mu^2/2)", {{"mu", 2.0}}).eval(pt) ==
          doctest::Approx(std::exp(2.0 * 0.25 - 2.0)));
    CHECK(Expression::parse("(1+2)*(3-1)").eval(pt) == 6.0);

    CHECK_THROWS_AS((void)Expression::parse("2 +"), Error);
    CHECK_THROWS_AS((void)Expression::parse("foo(3)"), Error);
    CHECK_THROWS_AS((void)Expression::parse("(1+2"), Error);
    CHECK_THROWS_AS((void)Expression::parse("1 2"), Error);

    // coordinate out of range surfaces as a domain error at evaluation
    CHECK_THROWS_AS((void)Expression::parse("x3").eval(pt), Error);
}

TEST_CASE("eval_ratio on the three variants") {
    const auto table = RatioFunction::table({1.0, 3.0});
    auto cat = PooledSample::categorical({0, 1, 1, 1}, 2, 2);
    CHECK(table.eval(cat, 0) == 1.0);
    CHECK(table.eval(cat, 2) == 3.0);
    CHECK(table.eval_category(1) == 3.0);

    auto cont = PooledSample::continuous({0.0, 1.0}, 1, 1, 1);
    const auto expr = RatioFunction::expression("exp(mu*x - mu^2/2)", {{"mu", 1.0}});
    CHECK(expr.eval(cont, 0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));

    const auto constant = RatioFunction::expression("1");
    CHECK(constant.eval(cont, 0) == 1.0);
    CHECK(constant.eval(cont, 1) == 1.0);

    const auto pre = RatioFunction::precomputed({2.0, 5.0});
    CHECK(pre.eval(cont, 1) == 5.0);
}

TEST_CASE("ratio evaluation errors") {
    auto cat = PooledSample::categorical({0, 5}, 1, 1);
    const auto table = RatioFunction::table({1.0, 3.0});
    CHECK_THROWS_WITH_AS((void)table.eval(cat, 1), doctest::Contains("category"), Error);

    auto cont = PooledSample::continuous({0.0, 1.0}, 1, 1, 1);
    const auto zero_at_origin = RatioFunction::expression("x1");
    CHECK_THROWS_AS((void)zero_at_origin.eval(cont, 0), Error);
    const auto log_neg = RatioFunction::expression("log(x1)");
    CHECK_THROWS_AS((void)log_neg.values_for(cont), Error);

    CHECK_THROWS_AS((void)RatioFunction::table({1.0, -2.0}), Error);
    CHECK_THROWS_AS((void)RatioFunction::precomputed({1.0, 0.0}), Error);

    const auto pre = RatioFunction::precomputed({1.0, 2.0, 3.0});
    CHECK_THROWS_AS((void)pre.eval(cont, 0), Error); // length mismatch
}

TEST_CASE("lambda-hat closed forms") {
    // constant r == c: the equation collapses to (n+m)/(n+lambda*m*c) = 1
    for (double c : {0.25, 1.0, 7.5}) {
        const auto est = solve_lambda_hat(3, 5, std::vector<double>(8, c));
        CHECK(est.value == doctest::Approx(1.0 / c).epsilon(1e-12));
        CHECK(std::fabs(est.residual) <= 1e-9);
    }
    // n=m=1, r=(1,4): 1/(1+s) + 1/(1+4s) = 1 has root s = 1/2
    const auto two = solve_lambda_hat(1, 1, {1.0, 4.0});
    CHECK(two.value == doctest::Approx(0.5).epsilon(1e-12));
    // duplicated points keep the same root
    const auto four = solve_lambda_hat(2, 2, {1.0, 1.0, 4.0, 4.0});
    CHECK(four.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(four.iterations <= 200);
}

TEST_CASE("lambda-hat residual, bracket, and determinism") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        const std::size_t n = 13, m = 29;
        const auto rvalues = datasets::random_positive(n + m, seed);
        const auto est = solve_lambda_hat(n, m, rvalues);
        CHECK(std::fabs(equation_residual(n, m, est.value, rvalues)) <= 1e-10);

        double mean_r = 0.0, mean_inv = 0.0;
        for (double r : rvalues) {
            mean_r += r;
            mean_inv += 1.0 / r;
        }
        mean_r /= static_cast<double>(n + m);
        mean_inv /= static_cast<double>(n + m);
        CHECK(est.value >= 1.0 / mean_r);
        CHECK(est.value <= mean_inv);

        const auto again = solve_lambda_hat(n, m, rvalues);
        CHECK(again.value == est.value);
    }
}

TEST_CASE("equal-sums identity holds for every permutation") {
    RngStream rng(2024, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + rng.below(20);
        const std::size_t m = 3 + rng.below(20);
        const auto rvalues = datasets::random_positive(n + m, 777 + trial, 0.05, 20.0);
        const double lambda = solve_lambda_hat(n, m, rvalues).value;

        auto sigma = rng.shuffle_prefix(0, static_cast<std::uint32_t>(n + m),
                                        static_cast<std::uint32_t>(n + m));
        double left = 0.0, right = 0.0;
        const double lm = lambda * static_cast<double>(m);
        for (std::size_t p = 0; p < n; ++p) {
            left += lm * rvalues[sigma[p]] / (static_cast<double>(n) + lm * rvalues[sigma[p]]);
        }
        for (std::size_t p = n; p < n + m; ++p) {
            right += static_cast<double>(n) /
                     (static_cast<double>(n) + lm * rvalues[sigma[p]]);
        }
        CHECK(left == doctest::Approx(right).epsilon(1e-10));
    }
}

TEST_CASE("reciprocal relabelling inverts lambda-hat") {
    for (std::uint64_t seed : {10ull, 11ull, 12ull}) {
        const std::size_t n = 9, m = 17;
        const auto rvalues = datasets::random_positive(n + m, seed, 0.1, 10.0);
        const double lambda = solve_lambda_hat(n, m, rvalues).value;

        // swap roles: first sample becomes the last m points, r -> 1/r
        std::vector<double> swapped;
        for (std::size_t j = n; j < n + m; ++j) swapped.push_back(1.0 / rvalues[j]);
        for (std::size_t i = 0; i < n; ++i) swapped.push_back(1.0 / rvalues[i]);
        const double theta = solve_lambda_hat(m, n, swapped).value;
        CHECK(theta * lambda == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("scaling r rescales lambda-hat exactly") {
    const std::size_t n = 11, m = 7;
    const auto rvalues = datasets::random_positive(n + m, 99);
    const double lambda = solve_lambda_hat(n, m, rvalues).value;
    for (double c : {0.01, 0.5, 3.0, 250.0}) {
        std::vector<double> scaled = rvalues;
        for (double& v : scaled) v *= c;
        CHECK(solve_lambda_hat(n, m, scaled).value ==
              doctest::Approx(lambda / c).epsilon(1e-12));
    }
}

TEST_CASE("population normalizer") {
    // H0 model: lambda0 = 1 / sum r f
    PopulationModel null_model = PopulationModel::null_model({0.5, 0.5}, {1.0, 3.0});
    const double expected = 1.0 / (0.5 * 1.0 + 0.5 * 3.0);
    CHECK(solve_lambda_zero(null_model, 10, 20) ==
          doctest::Approx(expected).epsilon(1e-12));

    PopulationModel flat{{0.3, 0.7}, {0.6, 0.4}, {1.0, 1.0}};
    CHECK(solve_lambda_zero(flat, 5, 9) == doctest::Approx(1.0).epsilon(1e-12));

    // independent fine-grid scan of F(lambda) finds the same root
    PopulationModel shifted{{0.5, 0.5}, {0.25, 0.75}, {1.0, 3.0}};
    const std::size_t n = 100, m = 100;
    const double lambda0 = solve_lambda_zero(shifted, n, m);
    auto F = [&](double lambda) {
        double s = 0.0;
        for (std::size_t j = 0; j < 2; ++j) {
            s += (static_cast<double>(n) * shifted.f[j] + static_cast<double>(m) * shifted.g[j]) /
                 (static_cast<double>(n) + lambda * static_cast<double>(m) * shifted.r[j]);
        }
        return s;
    };
    CHECK(F(lambda0) == doctest::Approx(1.0).epsilon(1e-12));
    double grid_root = 0.0;
    for (double lam = 1e-4; lam < 10.0; lam += 1e-5) {
        if (F(lam) >= 1.0 && F(lam + 1e-5) < 1.0) {
            grid_root = lam;
            break;
        }
    }
    CHECK(lambda0 == doctest::Approx(grid_root).epsilon(1e-3));

    PopulationModel bad{{0.5, 0.6}, {0.5, 0.5}, {1.0, 1.0}};
    CHECK_THROWS_AS((void)solve_lambda_zero(bad, 2, 2), Error);
}

TEST_CASE("csv ingestion") {
    const std::string text =
        "x1,x2,sample,r\n"
        "0.1,0.2,2,3.5\n"
        "0.3,0.4,1,1.0\n"
        "0.5,0.6,2,2.5\n"
        "0.7,0.8,1,1.5\n";
    const auto csv = parse_sample_csv(text);
    CHECK(csv.sample.n() == 2);
    CHECK(csv.sample.m() == 2);
    CHECK(csv.sample.dim() == 2);
    // first-sample rows come first, file order preserved within each block
    CHECK(csv.sample.point(0)[0] == 0.3);
    CHECK(csv.sample.point(1)[0] == 0.7);
    CHECK(csv.sample.point(2)[0] == 0.1);
    CHECK(csv.ratio_column == std::vector<double>{1.0, 1.5, 3.5, 2.5});

    const auto cat = parse_sample_csv("cat,sample\n0,1\n1,2\n1,2\n");
    CHECK(cat.sample.is_categorical());
    CHECK(cat.sample.num_categories() == 2);

    CHECK_THROWS_AS((void)parse_sample_csv("x1,sample\n"), Error);          // one sample only
    CHECK_THROWS_AS((void)parse_sample_csv("x1\n0.5\n"), Error);            // no sample column
    CHECK_THROWS_AS((void)parse_sample_csv("x1,sample\nfoo,1\n"), Error);   // bad number
    CHECK_THROWS_AS((void)parse_sample_csv("x1,cat,sample\n1,1,1\n"), Error);
    CHECK_THROWS_AS((void)parse_sample_csv("x1,sample\n1,3\n"), Error);     // bad group
}

TEST_CASE("sample invariants") {
    CHECK_THROWS_AS((void)PooledSample::continuous({1.0, 2.0}, 1, 2, 1), Error);
    CHECK_THROWS_AS((void)PooledSample::continuous({1.0, std::nan("")}, 1, 1, 1), Error);
    CHECK_THROWS_AS((void)PooledSample::categorical({0, -1}, 1, 1), Error);

    auto s = PooledSample::continuous({1.0, 2.0, 3.0}, 1, 2, 1);
    auto w = s.swapped();
    CHECK(w.n() == 1);
    CHECK(w.m() == 2);
    CHECK(w.point(0)[0] == 3.0);
    CHECK(w.point(1)[0] == 1.0);
}

TEST_CASE("swapped_reciprocal aligns precomputed values") {
    auto s = PooledSample::continuous({1.0, 2.0, 3.0}, 1, 2, 1);
    const auto pre = RatioFunction::precomputed({2.0, 4.0, 8.0});
    const auto inv = swapped_reciprocal(pre, s);
    auto w = s.swapped();
    CHECK(inv.eval(w, 0) == doctest::Approx(1.0 / 8.0)); // point 3.0 leads now
    CHECK(inv.eval(w, 1) == doctest::Approx(1.0 / 2.0));
    CHECK(inv.eval(w, 2) == doctest::Approx(1.0 / 4.0));
}
