#include "drpt/statistic.hpp"

#include <cmath>

namespace drpt {

namespace {

void check_lambda(const PooledSample& sample, const std::vector<double>& rvalues,
                  double lambda_hat) {
    const double nn = static_cast<double>(sample.n());
    const double lm = lambda_hat * static_cast<double>(sample.m());
    double s = 0.0;
    for (double r : rvalues) s += 1.0 / (nn + lm * r);
    require(std::abs(s - 1.0) <= 1e-8, ErrorCode::LambdaMismatch,
            "lambda does not solve its defining equation for this data (residual " +
                std::to_string(s - 1.0) + ")");
}

} // namespace

MmdContext make_mmd_context(const PooledSample& sample, const std::vector<double>& rvalues,
                            double lambda_hat, const KernelSpec& spec) {
    require(rvalues.size() == sample.size(), ErrorCode::InvalidArgument,
            "need one ratio value per point");
    MmdContext ctx;
    ctx.n = sample.n();
    ctx.m = sample.m();
    ctx.norm = static_cast<double>(ctx.n + ctx.m) /
               (static_cast<double>(ctx.n) * static_cast<double>(ctx.m));
    ctx.bandwidth = resolve_bandwidth(spec, sample);
    ctx.gram = gram_matrix(sample, spec, ctx.bandwidth);
    ctx.q = point_weights(ctx.n, ctx.m, lambda_hat, rvalues);
    return ctx;
}

double shifted_mmd_permuted(const MmdContext& ctx, const Permutation& sigma, StatKind kind) {
    const std::size_t total = ctx.n + ctx.m;
    require(sigma.size() == total, ErrorCode::InvalidArgument,
            "permutation size does not match the context");

    // w[p]: magnitude of the embedding weight at position p (sign is + for
    // the first block, - for the second).
    std::vector<double> w(total);
    for (std::size_t p = 0; p < total; ++p) {
        const double q = ctx.q[sigma[p]];
        w[p] = p < ctx.n ? q : 1.0 - q;
    }

    double same_sign = 0.0, cross_sign = 0.0;
    for (std::size_t p = 0; p < total; ++p) {
        const double* row = ctx.gram.data() + static_cast<std::size_t>(sigma[p]) * total;
        double first = 0.0, second = 0.0;
        for (std::size_t pp = 0; pp < ctx.n; ++pp) first += w[pp] * row[sigma[pp]];
        for (std::size_t pp = ctx.n; pp < total; ++pp) second += w[pp] * row[sigma[pp]];
        if (p < ctx.n) {
            same_sign += w[p] * first;
            cross_sign += w[p] * second;
        } else {
            same_sign += w[p] * second;
            cross_sign += w[p] * first;
        }
    }
    double quad = same_sign - cross_sign;

    if (kind == StatKind::UStat) {
        double diag = 0.0;
        for (std::size_t p = 0; p < total; ++p) {
            diag += w[p] * w[p] * ctx.gram[static_cast<std::size_t>(sigma[p]) * total + sigma[p]];
        }
        quad -= diag;
    } else {
        require(kind == StatKind::VStat, ErrorCode::InvalidArgument,
                "dense evaluation handles VStat and UStat only");
    }
    return ctx.norm * ctx.norm * quad;
}

StatisticValue vstat_shifted_mmd(const PooledSample& sample, const std::vector<double>& rvalues,
                                 double lambda_hat, const KernelSpec& spec) {
    check_lambda(sample, rvalues, lambda_hat);
    const MmdContext ctx = make_mmd_context(sample, rvalues, lambda_hat, spec);
    const Permutation id = identity_permutation(sample.size());
    return {shifted_mmd_permuted(ctx, id, StatKind::VStat), StatKind::VStat, lambda_hat,
            ctx.bandwidth};
}

StatisticValue ustat_shifted_mmd(const PooledSample& sample, const std::vector<double>& rvalues,
                                 double lambda_hat, const KernelSpec& spec) {
    require(sample.n() >= 2 && sample.m() >= 2, ErrorCode::TooFewPoints,
            "the U-statistic needs n >= 2 and m >= 2");
    check_lambda(sample, rvalues, lambda_hat);
    const MmdContext ctx = make_mmd_context(sample, rvalues, lambda_hat, spec);
    const Permutation id = identity_permutation(sample.size());
    return {shifted_mmd_permuted(ctx, id, StatKind::UStat), StatKind::UStat, lambda_hat,
            ctx.bandwidth};
}

IpmContext make_ipm_context(const PooledSample& sample, const std::vector<double>& rvalues,
                            double lambda_hat, const std::vector<DictionaryFn>& dictionary) {
    require(!dictionary.empty(), ErrorCode::EmptyDictionary,
            "the IPM statistic needs a nonempty dictionary");
    IpmContext ctx;
    ctx.n = sample.n();
    ctx.m = sample.m();
    ctx.dictionary_size = dictionary.size();
    ctx.norm = static_cast<double>(ctx.n + ctx.m) /
               (static_cast<double>(ctx.n) * static_cast<double>(ctx.m));
    ctx.q = point_weights(ctx.n, ctx.m, lambda_hat, rvalues);
    const std::size_t total = sample.size();
    ctx.phi.resize(dictionary.size() * total);
    for (std::size_t d = 0; d < dictionary.size(); ++d) {
        for (std::size_t i = 0; i < total; ++i) {
            const double v = dictionary[d](sample, i);
            require(std::isfinite(v), ErrorCode::InvalidArgument,
                    "dictionary function produced a non-finite value");
            ctx.phi[d * total + i] = v;
        }
    }
    return ctx;
}

double ipm_permuted(const IpmContext& ctx, const Permutation& sigma) {
    const std::size_t total = ctx.n + ctx.m;
    double best = 0.0;
    for (std::size_t d = 0; d < ctx.dictionary_size; ++d) {
        const double* phi = ctx.phi.data() + d * total;
        double first = 0.0, second = 0.0;
        for (std::size_t p = 0; p < ctx.n; ++p) first += ctx.q[sigma[p]] * phi[sigma[p]];
        for (std::size_t p = ctx.n; p < total; ++p) {
            second += (1.0 - ctx.q[sigma[p]]) * phi[sigma[p]];
        }
        best = std::max(best, std::abs(ctx.norm * (first - second)));
    }
    return best;
}

double generic_ipm_statistic(const PooledSample& sample, const std::vector<double>& rvalues,
                             double lambda_hat, const std::vector<DictionaryFn>& dictionary) {
    check_lambda(sample, rvalues, lambda_hat);
    const IpmContext ctx = make_ipm_context(sample, rvalues, lambda_hat, dictionary);
    return ipm_permuted(ctx, identity_permutation(sample.size()));
}

std::vector<DictionaryFn> default_ipm_dictionary(const PooledSample& sample) {
    std::vector<DictionaryFn> dict;
    if (sample.is_categorical()) {
        const std::size_t cats = sample.num_categories();
        for (std::size_t j = 0; j < cats; ++j) {
            dict.push_back([j](const PooledSample& s, std::size_t i) {
                return s.category(i) == static_cast<int>(j) ? 1.0 : 0.0;
            });
        }
    } else {
        for (std::size_t d = 0; d < sample.dim(); ++d) {
            dict.push_back(
                [d](const PooledSample& s, std::size_t i) { return s.point(i)[d]; });
        }
    }
    return dict;
}

double population_shifted_mmd(const PopulationModel& model, std::size_t n, std::size_t m,
                              double lambda0, const KernelSpec& spec) {
    model.validate();
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    const double total = nn + mm;
    const std::size_t cats = model.f.size();
    const double zeta = spec.family == KernelFamily::Collision ? 1.0 : spec.bandwidth;
    require(spec.family == KernelFamily::Collision || zeta > 0.0, ErrorCode::InvalidArgument,
            "population oracle needs a fixed bandwidth");
    const auto kernel = category_kernel_table(cats, spec, zeta);

    // Signed embedding coefficient of each category: the f-side weight minus
    // the g-side weight, both carrying the 1/(n + lambda0*m*r) shift.
    std::vector<double> coeff(cats);
    for (std::size_t j = 0; j < cats; ++j) {
        const double denom = nn + lambda0 * mm * model.r[j];
        coeff[j] = total * (lambda0 * model.r[j] * model.f[j] - model.g[j]) / denom;
    }
    double acc = 0.0;
    for (std::size_t a = 0; a < cats; ++a) {
        for (std::size_t b = 0; b < cats; ++b) {
            acc += coeff[a] * coeff[b] * kernel[a * cats + b];
        }
    }
    return acc;
}

double discrete_abs_statistic(const CountTable& table, const std::vector<double>& r) {
    table.validate();
    require(r.size() == table.tots.size(), ErrorCode::InvalidArgument,
            "ratio vector must align with the table");
    for (double v : r) {
        require(std::isfinite(v) && v > 0.0, ErrorCode::NonPositiveRatio,
                "ratio weights must be finite and positive");
    }
    const double w0 = static_cast<double>(table.w[0]);
    const double x0 = static_cast<double>(table.tots[0] - table.w[0]);
    double acc = 0.0;
    for (std::size_t j = 1; j < r.size(); ++j) {
        const double rj = r[j] / r[0];
        const double wj = static_cast<double>(table.w[j]);
        const double xj = static_cast<double>(table.tots[j] - table.w[j]);
        acc += std::abs(wj * x0 / std::sqrt(rj) - std::sqrt(rj) * w0 * xj);
    }
    return acc / (static_cast<double>(table.n) * static_cast<double>(table.m));
}

double shifted_mmd_from_counts(const CountTable& table, const std::vector<double>& q_by_category,
                               const std::vector<double>& category_kernel, StatKind kind) {
    table.validate();
    const std::size_t cats = table.tots.size();
    require(q_by_category.size() == cats && category_kernel.size() == cats * cats,
            ErrorCode::InvalidArgument, "category weights or kernel table misaligned");
    const double nn = static_cast<double>(table.n);
    const double mm = static_cast<double>(table.m);
    const double norm = (nn + mm) / (nn * mm);

    std::vector<double> signed_mass(cats);
    for (std::size_t j = 0; j < cats; ++j) {
        const double first = static_cast<double>(table.tots[j] - table.w[j]);
        const double second = static_cast<double>(table.w[j]);
        signed_mass[j] = q_by_category[j] * first - (1.0 - q_by_category[j]) * second;
    }
    double quad = 0.0;
    for (std::size_t a = 0; a < cats; ++a) {
        for (std::size_t b = 0; b < cats; ++b) {
            quad += signed_mass[a] * signed_mass[b] * category_kernel[a * cats + b];
        }
    }
    if (kind == StatKind::UStat) {
        double diag = 0.0;
        for (std::size_t j = 0; j < cats; ++j) {
            const double first = static_cast<double>(table.tots[j] - table.w[j]);
            const double second = static_cast<double>(table.w[j]);
            const double q = q_by_category[j];
            diag += (first * q * q + second * (1.0 - q) * (1.0 - q)) *
                    category_kernel[j * cats + j];
        }
        quad -= diag;
    } else {
        require(kind == StatKind::VStat, ErrorCode::InvalidArgument,
                "count form handles VStat and UStat only");
    }
    return norm * norm * quad;
}

} // namespace drpt
