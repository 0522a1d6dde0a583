#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "drpt/logistic.hpp"
#include "drpt/rng.hpp"

#include "support/datasets.hpp"

using namespace drpt;

namespace {

// X ~ N(0,1), Y ~ N(mu,1): the true log-ratio is mu*x - mu^2/2.
PooledSample gaussian_shift_sample(std::size_t n, std::size_t m, double mu,
                                   std::uint64_t seed) {
    RngStream rng(seed, 0x47415553ull);
    std::vector<double> coords;
    for (std::size_t i = 0; i < n; ++i) coords.push_back(rng.normal());
    for (std::size_t j = 0; j < m; ++j) coords.push_back(mu + rng.normal());
    return PooledSample::continuous(std::move(coords), 1, n, m);
}

} // namespace

TEST_CASE("no-signal data yields the class-prior intercept and zero slopes") {
    auto sample = PooledSample::continuous(std::vector<double>(30 * 2, 0.0), 2, 10, 20);
    const auto model = fit_linear_logistic(sample, 1e-4);
    REQUIRE(model.weights.size() == 3);
    CHECK(model.weights[0] == doctest::Approx(std::log(20.0 / 10.0)).epsilon(1e-8));
    CHECK(model.weights[1] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(model.weights[2] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("linear logistic recovers the Gaussian shift model") {
    auto sample = gaussian_shift_sample(5000, 5000, 1.0, 17);
    const auto model = fit_linear_logistic(sample, 1e-4);
    // Bayes-optimal slope is mu = 1, intercept -mu^2/2 = -1/2
    CHECK(std::fabs(model.weights[1] - 1.0) < 0.1);
    CHECK(std::fabs(model.weights[0] + 0.5) < 0.15);
}

TEST_CASE("fitted optimum has a vanishing gradient (finite differences)") {
    auto sample = gaussian_shift_sample(400, 400, 0.7, 5);
    const double ridge = default_ridge(sample);
    const auto model = fit_linear_logistic(sample, ridge);

    LogisticProblem prob;
    prob.rows = sample.size();
    prob.cols = 2;
    prob.ridge = ridge;
    prob.design.resize(prob.rows * 2);
    prob.labels.assign(prob.rows, 0);
    for (std::size_t i = 0; i < prob.rows; ++i) {
        prob.design[i * 2] = 1.0;
        prob.design[i * 2 + 1] = sample.point(i)[0];
        if (i >= sample.n()) prob.labels[i] = 1;
    }
    const auto grad = prob.gradient(model.weights);
    for (double g : grad) CHECK(std::fabs(g) <= 1e-8);

    // central finite differences reproduce the analytic gradient
    RngStream rng(9, 9);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> w = {rng.normal(), rng.normal()};
        const auto g = prob.gradient(w);
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double h = 1e-6;
            std::vector<double> plus = w, minus = w;
            plus[j] += h;
            minus[j] -= h;
            const double fd = (prob.objective(plus) - prob.objective(minus)) / (2.0 * h);
            CHECK(g[j] == doctest::Approx(fd).epsilon(1e-4));
        }
    }
}

TEST_CASE("random restarts land on the same ridge optimum") {
    auto sample = gaussian_shift_sample(300, 300, 0.5, 23);
    LogisticProblem prob;
    prob.rows = sample.size();
    prob.cols = 2;
    prob.ridge = 1e-3;
    prob.design.resize(prob.rows * 2);
    prob.labels.assign(prob.rows, 0);
    for (std::size_t i = 0; i < prob.rows; ++i) {
        prob.design[i * 2] = 1.0;
        prob.design[i * 2 + 1] = sample.point(i)[0];
        if (i >= sample.n()) prob.labels[i] = 1;
    }
    const auto base = prob.solve({0.0, 0.0});
    RngStream rng(12, 0);
    for (int restart = 0; restart < 4; ++restart) {
        const auto other = prob.solve({4.0 * rng.normal(), 4.0 * rng.normal()});
        double dist = 0.0;
        for (std::size_t j = 0; j < base.size(); ++j) {
            dist += (base[j] - other[j]) * (base[j] - other[j]);
        }
        CHECK(std::sqrt(dist) <= 1e-6);
    }
}

TEST_CASE("separable data without ridge aborts") {
    // perfectly separated classes
    std::vector<double> coords;
    for (int i = 0; i < 20; ++i) coords.push_back(-1.0 - 0.1 * i);
    for (int j = 0; j < 20; ++j) coords.push_back(1.0 + 0.1 * j);
    auto sample = PooledSample::continuous(std::move(coords), 1, 20, 20);
    CHECK_THROWS_AS((void)fit_linear_logistic(sample, 0.0), Error);
    // a positive ridge restores a finite optimum
    const auto model = fit_linear_logistic(sample, 1e-3);
    CHECK(std::isfinite(model.weights[1]));
}

TEST_CASE("predict_ratio and its exact reciprocal symmetry") {
    auto sample = gaussian_shift_sample(800, 800, 1.0, 31);
    const auto model = fit_linear_logistic(sample, 1e-4);

    // p-hat = 0.5 with equal class sizes means ratio 1 at the point where
    // the linear predictor crosses zero
    const double x_at_zero = -model.weights[0] / model.weights[1];
    const double at_zero[1] = {x_at_zero};
    CHECK(model.predict_ratio({at_zero, 1}) == doctest::Approx(1.0).epsilon(1e-9));

    // equal-variance Gaussian fit: r-hat(0.5) near exp(0.5 - 0.5) = 1
    const double half[1] = {0.5};
    CHECK(std::fabs(model.predict_ratio({half, 1}) - 1.0) < 0.15);

    // label swap maps r-hat to its reciprocal pointwise
    const auto swapped_fit = fit_linear_logistic(sample.swapped(), 1e-4);
    RngStream rng(77, 1);
    for (int t = 0; t < 20; ++t) {
        const double x[1] = {rng.normal()};
        const double direct = model.predict_ratio({x, 1});
        const double mirrored = swapped_fit.predict_ratio({x, 1});
        CHECK(direct * mirrored == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("predictions are clipped with a counter") {
    auto sample = gaussian_shift_sample(200, 200, 1.0, 3);
    auto model = fit_linear_logistic(sample, 1e-6);
    model.weights = {0.0, 50.0}; // force saturation

    std::vector<double> far_coords = {-10.0, 10.0};
    auto far = PooledSample::continuous(std::move(far_coords), 1, 1, 1);
    const auto pred = predict_ratio_on(model, far);
    CHECK(pred.clipped == 2);
    CHECK(pred.values[0] == 1e-6);
    CHECK(pred.values[1] == 1e6);
}

TEST_CASE("huge ridge collapses predictions to the class prior") {
    auto sample = gaussian_shift_sample(600, 300, 1.0, 71);
    const auto model = fit_kernel_logistic(sample, KernelSpec::gaussian_median(), 1e6, 50, 1);
    // slopes are crushed, so r-hat(z) ~ (n/m) * exp(intercept) ~ g-prior odds
    RngStream rng(5, 5);
    std::vector<double> values;
    for (int t = 0; t < 10; ++t) {
        const double x[1] = {rng.normal()};
        values.push_back(model.predict_ratio({x, 1}));
    }
    for (double v : values) CHECK(v == doctest::Approx(values[0]).epsilon(0.01));
}

TEST_CASE("kernel logistic matches linear logistic on a linear truth") {
    auto train = gaussian_shift_sample(1500, 1500, 1.0, 201);
    const auto ll = fit_linear_logistic(train, default_ridge(train));
    const auto klr =
        fit_kernel_logistic(train, KernelSpec::gaussian_median(), 1e-4, 200, 11);

    auto test = gaussian_shift_sample(200, 200, 1.0, 202);
    std::vector<double> rel_errors;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const double a = ll.predict_ratio(test.point(i));
        const double b = klr.predict_ratio(test.point(i));
        rel_errors.push_back(std::fabs(a - b) / a);
    }
    std::nth_element(rel_errors.begin(), rel_errors.begin() + rel_errors.size() / 2,
                     rel_errors.end());
    CHECK(rel_errors[rel_errors.size() / 2] < 0.10);
}

TEST_CASE("kernel logistic beats linear logistic on a nonlinear truth") {
    // log-ratio proportional to sin(3x): linear logistic is misspecified
    auto make = [](std::size_t count, bool alternative, std::uint64_t seed) {
        RngStream rng(seed, 1);
        std::vector<double> first, second;
        while (first.size() < count || second.size() < count) {
            const double x = 2.5 * (2.0 * rng.uniform01() - 1.0);
            const double p = 1.0 / (1.0 + std::exp(-(alternative ? 2.0 * std::sin(3.0 * x) : 0.0)));
            if (rng.uniform01() < p) {
                if (second.size() < count) second.push_back(x);
            } else {
                if (first.size() < count) first.push_back(x);
            }
        }
        std::vector<double> coords = first;
        coords.insert(coords.end(), second.begin(), second.end());
        return PooledSample::continuous(std::move(coords), 1, count, count);
    };
    double ll_loss_total = 0.0, klr_loss_total = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto train = make(700, true, 900 + seed);
        auto test = make(400, true, 950 + seed);
        const auto ll = fit_linear_logistic(train, default_ridge(train));
        const auto klr =
            fit_kernel_logistic(train, KernelSpec::gaussian_median(), 1e-4, 150, seed);

        auto log_loss = [&](const LogisticModel& model) {
            double acc = 0.0;
            for (std::size_t i = 0; i < test.size(); ++i) {
                const double eta = model.linear_predictor(test.point(i));
                const double y = i < test.n() ? 0.0 : 1.0;
                acc += std::log1p(std::exp(eta)) - y * eta;
            }
            return acc / static_cast<double>(test.size());
        };
        ll_loss_total += log_loss(ll);
        klr_loss_total += log_loss(klr);
    }
    CHECK(klr_loss_total < ll_loss_total);
}

TEST_CASE("model json round trip") {
    auto sample = gaussian_shift_sample(100, 150, 0.8, 41);
    for (bool kernel : {false, true}) {
        const auto model =
            kernel ? fit_kernel_logistic(sample, KernelSpec::gaussian_median(), 1e-3, 25, 7)
                   : fit_linear_logistic(sample, 1e-3);
        const auto restored = LogisticModel::from_json(model.to_json());
        CHECK(restored.weights == model.weights);
        CHECK(restored.n_train == model.n_train);
        CHECK(restored.m_train == model.m_train);
        RngStream rng(1, 1);
        for (int t = 0; t < 10; ++t) {
            const double x[1] = {rng.normal()};
            CHECK(restored.predict_ratio({x, 1}) == model.predict_ratio({x, 1}));
        }
    }
    CHECK_THROWS_AS((void)LogisticModel::from_json("{}"), Error);
}

TEST_CASE("default ridge scales with the feature second moment") {
    auto sample = datasets::random_continuous(50, 50, 2, 13);
    const double base = default_ridge(sample);
    std::vector<double> scaled_coords = sample.coords();
    for (double& v : scaled_coords) v *= 10.0;
    auto scaled = PooledSample::continuous(std::move(scaled_coords), 2, 50, 50);
    CHECK(default_ridge(scaled) == doctest::Approx(100.0 * base).epsilon(1e-12));
}
