#include "drpt/permutation.hpp"

#include <algorithm>
#include <cmath>

#include "drpt/parallel.hpp"

namespace drpt {

Permutation identity_permutation(std::size_t size) {
    Permutation sigma(size);
    for (std::size_t i = 0; i < size; ++i) sigma[i] = static_cast<std::uint32_t>(i);
    return sigma;
}

bool is_permutation(const Permutation& sigma) {
    std::vector<bool> seen(sigma.size(), false);
    for (std::uint32_t v : sigma) {
        if (v >= sigma.size() || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

std::size_t default_sweeps(std::size_t n, std::size_t m) {
    const double imbalance =
        std::max(static_cast<double>(n) / static_cast<double>(m),
                 static_cast<double>(m) / static_cast<double>(n));
    return static_cast<std::size_t>(
        std::ceil(8.0 * imbalance * std::log(static_cast<double>(n + m))));
}

double acceptance_plain(double r_i, double r_j) {
    require(r_i > 0.0 && r_j > 0.0, ErrorCode::NonPositiveRatio,
            "acceptance probabilities need positive ratio values");
    return r_i / (r_i + r_j);
}

double acceptance_weighted(double r_i, double r_j, double lambda_hat,
                           std::size_t n, std::size_t m) {
    require(r_i > 0.0 && r_j > 0.0 && lambda_hat > 0.0, ErrorCode::NonPositiveRatio,
            "acceptance probabilities need positive inputs");
    const double nn = static_cast<double>(n);
    const double lm = lambda_hat * static_cast<double>(m);
    return lm * nn * r_i / ((nn + lm * r_i) * (nn + lm * r_j));
}

void sweep(Permutation& sigma, const std::vector<double>& rvalues,
           AcceptanceVariant variant, std::size_t n, std::size_t m, double lambda_hat,
           RngStream& rng) {
    const std::size_t total = n + m;
    require(sigma.size() == total && rvalues.size() == total, ErrorCode::InvalidArgument,
            "sweep inputs must match the pooled size");
    const std::uint32_t pairs = static_cast<std::uint32_t>(std::min(n, m));

    const auto firsts = rng.shuffle_prefix(0, static_cast<std::uint32_t>(n), pairs);
    const auto seconds = rng.shuffle_prefix(static_cast<std::uint32_t>(n),
                                            static_cast<std::uint32_t>(m), pairs);

    // Couples are disjoint, so acceptance values computed from the pre-sweep
    // state equal those from the running state.
    for (std::uint32_t k = 0; k < pairs; ++k) {
        const std::uint32_t pi = firsts[k];
        const std::uint32_t pj = seconds[k];
        const double r_i = rvalues[sigma[pi]];
        const double r_j = rvalues[sigma[pj]];
        const double p = variant == AcceptanceVariant::Plain
                             ? acceptance_plain(r_i, r_j)
                             : acceptance_weighted(r_i, r_j, lambda_hat, n, m);
        if (rng.bernoulli(p)) std::swap(sigma[pi], sigma[pj]);
    }
}

namespace {

Permutation run_chain(Permutation start, const std::vector<double>& rvalues,
                      AcceptanceVariant variant, std::size_t n, std::size_t m,
                      double lambda_hat, std::size_t sweeps, RngStream chain_stream) {
    for (std::size_t t = 0; t < sweeps; ++t) {
        RngStream sweep_stream = chain_stream.child(t);
        sweep(start, rvalues, variant, n, m, lambda_hat, sweep_stream);
    }
    return start;
}

} // namespace

StarDraw run_star_scheme(std::size_t n, std::size_t m, const std::vector<double>& rvalues,
                         const ChainConfig& config, double lambda_hat) {
    require(config.copies >= 1, ErrorCode::InvalidArgument, "need H >= 1 copies");
    const std::size_t sweeps = config.sweeps > 0 ? config.sweeps : default_sweeps(n, m);
    require(sweeps >= 1, ErrorCode::InvalidArgument, "need S >= 1 sweeps");

    RngStream root(config.seed, 0x5354'4152ull); // scheme-local namespace
    StarDraw out;
    out.hub = run_chain(identity_permutation(n + m), rvalues, config.variant, n, m,
                        lambda_hat, sweeps, root.child(0));

    out.copies.assign(config.copies, {});
    parallel_for(config.copies, config.threads, [&](std::size_t h) {
        out.copies[h] = run_chain(out.hub, rvalues, config.variant, n, m, lambda_hat,
                                  sweeps, root.child(1 + h));
    });
    return out;
}

std::vector<std::uint32_t> second_block_split(const Permutation& sigma, std::size_t n) {
    std::vector<std::uint32_t> split(sigma.begin() + static_cast<std::ptrdiff_t>(n),
                                     sigma.end());
    std::sort(split.begin(), split.end());
    return split;
}

std::map<std::vector<std::uint32_t>, double> exact_permutation_distribution(
    std::size_t n, std::size_t m, const std::vector<double>& rvalues) {
    const std::size_t total = n + m;
    require(total <= 12, ErrorCode::TooLarge,
            "exact enumeration is limited to n+m <= 12 points");
    require(rvalues.size() == total, ErrorCode::InvalidArgument,
            "need one ratio value per pooled point");
    for (double r : rvalues) {
        require(std::isfinite(r) && r > 0.0, ErrorCode::NonPositiveRatio,
                "ratio values must be finite and positive");
    }

    std::map<std::vector<std::uint32_t>, double> dist;
    std::vector<std::uint32_t> pick;
    double norm = 0.0;

    // Weight of a split is the product of r over its members; the n!m!
    // orderings within blocks contribute a constant that cancels.
    auto recurse = [&](auto&& self, std::size_t next, double weight) -> void {
        if (pick.size() == m) {
            dist.emplace(pick, weight);
            norm += weight;
            return;
        }
        if (next >= total || total - next < m - pick.size()) return;
        pick.push_back(static_cast<std::uint32_t>(next));
        self(self, next + 1, weight * rvalues[next]);
        pick.pop_back();
        self(self, next + 1, weight);
    };
    recurse(recurse, 0, 1.0);

    for (auto& entry : dist) entry.second /= norm;
    return dist;
}

} // namespace drpt
