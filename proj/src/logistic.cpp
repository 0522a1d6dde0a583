#include "drpt/logistic.hpp"

#include <cmath>

#include <json.hpp>

#include "drpt/error.hpp"
#include "drpt/rng.hpp"

namespace drpt {

namespace {

constexpr double kClipLo = 1e-6;
constexpr double kClipHi = 1e6;

double log1p_exp(double x) {
    // log(1 + e^x) without overflow
    if (x > 35.0) return x;
    if (x < -35.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Cholesky solve of (symmetric positive definite) A x = b; A is overwritten.
std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b,
                                   std::size_t p) {
    for (std::size_t attempt = 0;; ++attempt) {
        std::vector<double> chol = a;
        bool ok = true;
        for (std::size_t i = 0; i < p && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double s = chol[i * p + j];
                for (std::size_t k = 0; k < j; ++k) s -= chol[i * p + k] * chol[j * p + k];
                if (i == j) {
                    if (s <= 0.0) {
                        ok = false;
                        break;
                    }
                    chol[i * p + i] = std::sqrt(s);
                } else {
                    chol[i * p + j] = s / chol[j * p + j];
                }
            }
        }
        if (ok) {
            // forward then backward substitution
            std::vector<double> x = std::move(b);
            for (std::size_t i = 0; i < p; ++i) {
                double s = x[i];
                for (std::size_t k = 0; k < i; ++k) s -= chol[i * p + k] * x[k];
                x[i] = s / chol[i * p + i];
            }
            for (std::size_t i = p; i-- > 0;) {
                double s = x[i];
                for (std::size_t k = i + 1; k < p; ++k) s -= chol[k * p + i] * x[k];
                x[i] = s / chol[i * p + i];
            }
            return x;
        }
        require(attempt < 8, ErrorCode::NoConvergence, "hessian factorization failed");
        double jitter = 1e-10;
        for (std::size_t k = 0; k < attempt + 1; ++k) jitter *= 10.0;
        for (std::size_t i = 0; i < p; ++i) a[i * p + i] += jitter;
    }
}

} // namespace

double LogisticProblem::objective(const std::vector<double>& w) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        double eta = 0.0;
        const double* row = design.data() + i * cols;
        for (std::size_t j = 0; j < cols; ++j) eta += row[j] * w[j];
        acc += log1p_exp(eta) - (labels[i] != 0 ? eta : 0.0);
    }
    for (std::size_t j = 1; j < cols; ++j) acc += 0.5 * ridge * w[j] * w[j];
    return acc;
}

std::vector<double> LogisticProblem::gradient(const std::vector<double>& w) const {
    std::vector<double> g(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        double eta = 0.0;
        const double* row = design.data() + i * cols;
        for (std::size_t j = 0; j < cols; ++j) eta += row[j] * w[j];
        const double resid = sigmoid(eta) - (labels[i] != 0 ? 1.0 : 0.0);
        for (std::size_t j = 0; j < cols; ++j) g[j] += resid * row[j];
    }
    for (std::size_t j = 1; j < cols; ++j) g[j] += ridge * w[j];
    return g;
}

std::vector<double> LogisticProblem::solve(std::vector<double> w, int max_steps) const {
    require(w.size() == cols, ErrorCode::InvalidArgument, "bad start vector");
    double fw = objective(w);
    for (int step = 0; step < max_steps; ++step) {
        const std::vector<double> g = gradient(w);
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax <= 1e-12) break;

        if (ridge == 0.0) {
            double wmax = 0.0;
            for (double v : w) wmax = std::max(wmax, std::abs(v));
            require(wmax <= 1e4, ErrorCode::SeparableData,
                    "no finite optimum: data are separable and ridge is zero");
        }

        // Newton direction from the exact Hessian.
        std::vector<double> hess(cols * cols, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            double eta = 0.0;
            const double* row = design.data() + i * cols;
            for (std::size_t j = 0; j < cols; ++j) eta += row[j] * w[j];
            const double s = sigmoid(eta);
            const double weight = s * (1.0 - s);
            if (weight <= 0.0) continue;
            for (std::size_t a = 0; a < cols; ++a) {
                const double wa = weight * row[a];
                for (std::size_t b = 0; b <= a; ++b) hess[a * cols + b] += wa * row[b];
            }
        }
        for (std::size_t a = 0; a < cols; ++a) {
            for (std::size_t b = a + 1; b < cols; ++b) hess[a * cols + b] = hess[b * cols + a];
        }
        for (std::size_t j = 1; j < cols; ++j) hess[j * cols + j] += ridge;

        std::vector<double> neg_g(cols);
        for (std::size_t j = 0; j < cols; ++j) neg_g[j] = -g[j];
        const std::vector<double> direction = cholesky_solve(std::move(hess), neg_g, cols);

        double slope = 0.0;
        for (std::size_t j = 0; j < cols; ++j) slope += g[j] * direction[j];

        double t = 1.0;
        bool moved = false;
        std::vector<double> trial(cols);
        for (int back = 0; back < 60; ++back) {
            for (std::size_t j = 0; j < cols; ++j) trial[j] = w[j] + t * direction[j];
            const double ft = objective(trial);
            if (ft <= fw + 1e-4 * t * slope) {
                w = trial;
                fw = ft;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break; // numerically at the optimum
    }
    if (ridge == 0.0) {
        // Without a penalty the optimum exists only for overlapping classes:
        // complete separation sends the iterates off to infinity while the
        // gradient still vanishes, so detect it through the margins.
        bool separated = true;
        for (std::size_t i = 0; i < rows && separated; ++i) {
            double eta = 0.0;
            const double* row = design.data() + i * cols;
            for (std::size_t j = 0; j < cols; ++j) eta += row[j] * w[j];
            if ((labels[i] != 0 ? eta : -eta) <= 0.0) separated = false;
        }
        require(!separated, ErrorCode::SeparableData,
                "no finite optimum: data are separable and ridge is zero");
    }
    return w;
}

double LogisticModel::linear_predictor(std::span<const double> point) const {
    double eta = weights[0];
    if (kind == Kind::Linear) {
        require(point.size() + 1 == weights.size(), ErrorCode::DomainMismatch,
                "point dimension does not match the fitted model");
        for (std::size_t d = 0; d < point.size(); ++d) eta += weights[d + 1] * point[d];
        return eta;
    }
    require(point.size() == center_dim, ErrorCode::DomainMismatch,
            "point dimension does not match the fitted centers");
    const std::size_t num_centers = weights.size() - 1;
    for (std::size_t c = 0; c < num_centers; ++c) {
        const std::span<const double> center(centers.data() + c * center_dim, center_dim);
        eta += weights[c + 1] * kernel_eval(spec, bandwidth, point, center);
    }
    return eta;
}

double LogisticModel::predict_ratio(std::span<const double> point) const {
    // p/(1-p) = exp(eta), so the ratio needs no sigmoid; this keeps
    // label-swapped fits exact reciprocals of each other.
    const double raw = static_cast<double>(n_train) / static_cast<double>(m_train) *
                       std::exp(linear_predictor(point));
    return std::min(std::max(raw, kClipLo), kClipHi);
}

RatioPrediction predict_ratio_on(const LogisticModel& model, const PooledSample& sample) {
    require(!sample.is_categorical(), ErrorCode::DomainMismatch,
            "logistic ratio models take continuous points");
    RatioPrediction out;
    out.values.resize(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double raw = static_cast<double>(model.n_train) /
                           static_cast<double>(model.m_train) *
                           std::exp(model.linear_predictor(sample.point(i)));
        if (raw < kClipLo || raw > kClipHi) ++out.clipped;
        out.values[i] = std::min(std::max(raw, kClipLo), kClipHi);
    }
    return out;
}

std::string LogisticModel::to_json() const {
    nlohmann::json j;
    j["kind"] = kind == Kind::Linear ? "linear" : "kernel";
    j["weights"] = weights;
    j["ridge"] = ridge;
    j["n_train"] = n_train;
    j["m_train"] = m_train;
    if (kind == Kind::Kernel) {
        j["kernel"] = kernel_family_name(spec.family);
        j["bandwidth"] = bandwidth;
        j["centers"] = centers;
        j["center_dim"] = center_dim;
    }
    return j.dump();
}

LogisticModel LogisticModel::from_json(const std::string& text) {
    LogisticModel model;
    try {
        const auto j = nlohmann::json::parse(text);
        const std::string kind = j.at("kind").get<std::string>();
        model.kind = kind == "linear" ? Kind::Linear : Kind::Kernel;
        model.weights = j.at("weights").get<std::vector<double>>();
        model.ridge = j.at("ridge").get<double>();
        model.n_train = j.at("n_train").get<std::size_t>();
        model.m_train = j.at("m_train").get<std::size_t>();
        if (model.kind == Kind::Kernel) {
            const std::string fam = j.at("kernel").get<std::string>();
            model.spec = fam == "laplace" ? KernelSpec::laplace(1.0) : KernelSpec::gaussian(1.0);
            model.bandwidth = j.at("bandwidth").get<double>();
            model.spec.bandwidth = model.bandwidth;
            model.spec.median_heuristic = false;
            model.centers = j.at("centers").get<std::vector<double>>();
            model.center_dim = j.at("center_dim").get<std::size_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("bad logistic model json: ") + e.what());
    }
    require(!model.weights.empty() && model.n_train >= 1 && model.m_train >= 1,
            ErrorCode::ParseError, "logistic model json is incomplete");
    return model;
}

double default_ridge(const PooledSample& train) {
    require(!train.is_categorical(), ErrorCode::DomainMismatch,
            "logistic estimators take continuous data");
    double trace = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i) {
        for (double v : train.point(i)) trace += v * v;
    }
    trace /= static_cast<double>(train.size());
    return 1e-4 * trace / static_cast<double>(train.dim());
}

namespace {

LogisticProblem build_problem(const PooledSample& train, const std::vector<double>& features,
                              std::size_t cols, double ridge) {
    LogisticProblem prob;
    prob.design = features;
    prob.rows = train.size();
    prob.cols = cols;
    prob.ridge = ridge;
    prob.labels.assign(train.size(), 0);
    for (std::size_t i = train.n(); i < train.size(); ++i) prob.labels[i] = 1;
    return prob;
}

} // namespace

LogisticModel fit_linear_logistic(const PooledSample& train, double ridge) {
    require(!train.is_categorical(), ErrorCode::DomainMismatch,
            "linear logistic regression takes continuous data");
    require(ridge >= 0.0, ErrorCode::InvalidArgument, "ridge must be nonnegative");
    const std::size_t cols = train.dim() + 1;
    std::vector<double> design(train.size() * cols);
    for (std::size_t i = 0; i < train.size(); ++i) {
        design[i * cols] = 1.0;
        const auto p = train.point(i);
        for (std::size_t d = 0; d < train.dim(); ++d) design[i * cols + 1 + d] = p[d];
    }
    const LogisticProblem prob = build_problem(train, design, cols, ridge);
    LogisticModel model;
    model.kind = LogisticModel::Kind::Linear;
    model.ridge = ridge;
    model.n_train = train.n();
    model.m_train = train.m();
    model.weights = prob.solve(std::vector<double>(cols, 0.0));
    return model;
}

LogisticModel fit_kernel_logistic(const PooledSample& train, const KernelSpec& spec,
                                  double ridge, std::size_t max_centers, std::uint64_t seed) {
    require(!train.is_categorical(), ErrorCode::DomainMismatch,
            "kernel logistic regression takes continuous data");
    require(spec.family != KernelFamily::Collision, ErrorCode::InvalidArgument,
            "kernel logistic regression needs a Gaussian or Laplace kernel");
    require(ridge >= 0.0, ErrorCode::InvalidArgument, "ridge must be nonnegative");
    require(max_centers >= 1, ErrorCode::InvalidArgument, "need at least one center");

    LogisticModel model;
    model.kind = LogisticModel::Kind::Kernel;
    model.ridge = ridge;
    model.n_train = train.n();
    model.m_train = train.m();
    model.spec = spec;
    model.bandwidth = resolve_bandwidth(spec, train);
    model.spec.median_heuristic = false;
    model.spec.bandwidth = model.bandwidth;
    model.center_dim = train.dim();

    const std::size_t num_centers = std::min(max_centers, train.size());
    RngStream rng(seed, 0x4B4C'5247ull);
    const auto chosen = rng.shuffle_prefix(0, static_cast<std::uint32_t>(train.size()),
                                           static_cast<std::uint32_t>(num_centers));
    model.centers.reserve(num_centers * train.dim());
    for (const std::uint32_t idx : chosen) {
        const auto p = train.point(idx);
        model.centers.insert(model.centers.end(), p.begin(), p.end());
    }

    const std::size_t cols = num_centers + 1;
    std::vector<double> design(train.size() * cols);
    for (std::size_t i = 0; i < train.size(); ++i) {
        design[i * cols] = 1.0;
        for (std::size_t c = 0; c < num_centers; ++c) {
            const std::span<const double> center(model.centers.data() + c * train.dim(),
                                                 train.dim());
            design[i * cols + 1 + c] =
                kernel_eval(model.spec, model.bandwidth, train.point(i), center);
        }
    }
    const LogisticProblem prob = build_problem(train, design, cols, ridge);
    model.weights = prob.solve(std::vector<double>(cols, 0.0));
    return model;
}

} // namespace drpt
