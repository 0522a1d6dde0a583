#include "drpt/count_table.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "drpt/error.hpp"
#include "drpt/numeric.hpp"
#include "drpt/parallel.hpp"

namespace drpt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kEnumerationGuard = 1e6;

std::int64_t lower_bound_w(std::int64_t tot, std::size_t n) {
    return std::max<std::int64_t>(0, tot - static_cast<std::int64_t>(n));
}

std::int64_t upper_bound_w(std::int64_t tot, std::size_t m) {
    return std::min<std::int64_t>(static_cast<std::int64_t>(m), tot);
}

} // namespace

void CountTable::validate() const {
    require(!tots.empty() && tots.size() == w.size(), ErrorCode::InvalidTable,
            "count table vectors must align and be nonempty");
    require(n >= 1 && m >= 1, ErrorCode::InvalidTable, "count table needs n, m >= 1");
    std::int64_t sum_tot = 0, sum_w = 0;
    for (std::size_t j = 0; j < tots.size(); ++j) {
        require(tots[j] >= 0 && w[j] >= 0, ErrorCode::InvalidTable, "negative count");
        require(w[j] >= lower_bound_w(tots[j], n) && w[j] <= upper_bound_w(tots[j], m),
                ErrorCode::InvalidTable,
                "category " + std::to_string(j) + " count outside the feasible range");
        sum_tot += tots[j];
        sum_w += w[j];
    }
    require(sum_tot == static_cast<std::int64_t>(n + m), ErrorCode::InvalidTable,
            "pooled counts must sum to n+m");
    require(sum_w == static_cast<std::int64_t>(m), ErrorCode::InvalidTable,
            "second-sample counts must sum to m");
}

std::string CountTable::to_json() const {
    nlohmann::json j;
    j["tots"] = tots;
    j["w"] = w;
    j["n"] = n;
    j["m"] = m;
    return j.dump();
}

CountTable CountTable::from_json(const std::string& text) {
    CountTable table;
    try {
        const auto j = nlohmann::json::parse(text);
        table.tots = j.at("tots").get<std::vector<std::int64_t>>();
        table.w = j.at("w").get<std::vector<std::int64_t>>();
        table.n = j.at("n").get<std::size_t>();
        table.m = j.at("m").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("bad count table json: ") + e.what());
    }
    table.validate();
    return table;
}

CountTable tabulate(const PooledSample& sample) {
    require(sample.is_categorical(), ErrorCode::DomainMismatch,
            "tabulate requires categorical data");
    const std::size_t cats = sample.num_categories();
    CountTable table;
    table.n = sample.n();
    table.m = sample.m();
    table.tots.assign(cats, 0);
    table.w.assign(cats, 0);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto j = static_cast<std::size_t>(sample.category(i));
        table.tots[j] += 1;
        if (i >= sample.n()) table.w[j] += 1;
    }
    return table;
}

PooledSample reconstruct_sample(const CountTable& table) {
    table.validate();
    std::vector<int> codes;
    codes.reserve(table.n + table.m);
    for (std::size_t j = 0; j < table.tots.size(); ++j) {
        for (std::int64_t c = 0; c < table.tots[j] - table.w[j]; ++c) {
            codes.push_back(static_cast<int>(j));
        }
    }
    for (std::size_t j = 0; j < table.tots.size(); ++j) {
        for (std::int64_t c = 0; c < table.w[j]; ++c) codes.push_back(static_cast<int>(j));
    }
    return PooledSample::categorical(std::move(codes), table.n, table.m);
}

FisherNcmh::FisherNcmh(std::vector<std::int64_t> tots, std::vector<double> r, std::size_t n,
                       std::size_t m, double enumeration_guard)
    : tots_(std::move(tots)), n_(n), m_(m) {
    require(!tots_.empty() && tots_.size() == r.size(), ErrorCode::InvalidArgument,
            "totals and ratio vectors must align");
    require(n_ >= 1 && m_ >= 1, ErrorCode::InvalidArgument, "need n, m >= 1");

    const std::size_t cats = tots_.size();
    std::int64_t sum_tot = 0;
    double min_log_r = std::numeric_limits<double>::infinity();
    log_r_.resize(cats);
    lo_.resize(cats);
    hi_.resize(cats);
    for (std::size_t j = 0; j < cats; ++j) {
        require(std::isfinite(r[j]) && r[j] > 0.0, ErrorCode::NonPositiveRatio,
                "ratio weights must be finite and positive");
        require(tots_[j] >= 0, ErrorCode::InfeasibleTotals, "negative pooled count");
        log_r_[j] = std::log(r[j]);
        min_log_r = std::min(min_log_r, log_r_[j]);
        sum_tot += tots_[j];
        lo_[j] = lower_bound_w(tots_[j], n_);
        hi_[j] = upper_bound_w(tots_[j], m_);
    }
    require(sum_tot == static_cast<std::int64_t>(n_ + m_), ErrorCode::InfeasibleTotals,
            "pooled counts must sum to n+m");
    for (double& lr : log_r_) lr -= min_log_r; // min_j r_j = 1 for conditioning

    suffix_lo_.assign(cats + 1, 0);
    suffix_hi_.assign(cats + 1, 0);
    for (std::size_t jj = cats; jj-- > 0;) {
        suffix_lo_[jj] = suffix_lo_[jj + 1] + lo_[jj];
        suffix_hi_[jj] = suffix_hi_[jj + 1] + hi_[jj];
    }
    require(suffix_lo_[0] <= static_cast<std::int64_t>(m_) &&
                static_cast<std::int64_t>(m_) <= suffix_hi_[0],
            ErrorCode::InfeasibleTotals, "no feasible second-sample split");

    // Budget range that can actually reach layer j given the other layers.
    auto budget_lo = [&](std::size_t j) {
        return std::max<std::int64_t>(suffix_lo_[j],
                                      static_cast<std::int64_t>(m_) - (suffix_hi_[0] - suffix_hi_[j]));
    };
    auto budget_hi = [&](std::size_t j) {
        return std::min<std::int64_t>(suffix_hi_[j],
                                      static_cast<std::int64_t>(m_) - (suffix_lo_[0] - suffix_lo_[j]));
    };

    // suffix_weight_[j][s]: log sum of weights placing s units into
    // categories >= j. The sequential sampler conditions category 0 on the
    // rest, so layer 0 is never needed; layer cats-1 closes in one term.
    suffix_weight_.assign(cats, {});
    if (cats >= 2) {
        {
            const std::size_t j = cats - 1;
            auto& row = suffix_weight_[j];
            row.assign(m_ + 1, kNegInf);
            for (std::int64_t s = std::max<std::int64_t>(lo_[j], budget_lo(j));
                 s <= std::min<std::int64_t>(hi_[j], budget_hi(j)); ++s) {
                row[static_cast<std::size_t>(s)] =
                    static_cast<double>(s) * log_r_[j] +
                    log_binomial(static_cast<double>(tots_[j]), static_cast<double>(s));
            }
        }
        for (std::size_t j = cats - 1; j-- > 1;) {
            auto& row = suffix_weight_[j];
            row.assign(m_ + 1, kNegInf);
            const auto& next = suffix_weight_[j + 1];
            std::vector<double> terms;
            for (std::int64_t s = budget_lo(j); s <= budget_hi(j); ++s) {
                terms.clear();
                for (std::int64_t v = lo_[j]; v <= std::min<std::int64_t>(hi_[j], s); ++v) {
                    const std::int64_t rest = s - v;
                    if (rest < suffix_lo_[j + 1] || rest > suffix_hi_[j + 1]) continue;
                    const double tail = next[static_cast<std::size_t>(rest)];
                    if (tail == kNegInf) continue;
                    terms.push_back(static_cast<double>(v) * log_r_[j] +
                                    log_binomial(static_cast<double>(tots_[j]),
                                                 static_cast<double>(v)) +
                                    tail);
                }
                if (!terms.empty()) {
                    row[static_cast<std::size_t>(s)] = log_sum_exp(terms);
                }
            }
        }
    }

    // Feasible-lattice cardinality: the same recursion with unit weights,
    // finishing with an O(support) reduction for category 0.
    if (cats == 1) {
        lattice_size_ = 1.0;
    } else {
        std::vector<double> counts(m_ + 1, 0.0);
        {
            const std::size_t j = cats - 1;
            for (std::int64_t s = std::max<std::int64_t>(lo_[j], 0);
                 s <= std::min<std::int64_t>(hi_[j], static_cast<std::int64_t>(m_)); ++s) {
                counts[static_cast<std::size_t>(s)] = 1.0;
            }
        }
        std::vector<double> next(m_ + 1, 0.0);
        for (std::size_t j = cats - 1; j-- > 1;) {
            std::fill(next.begin(), next.end(), 0.0);
            for (std::int64_t s = budget_lo(j); s <= budget_hi(j); ++s) {
                double acc = 0.0;
                for (std::int64_t v = lo_[j]; v <= std::min<std::int64_t>(hi_[j], s); ++v) {
                    acc += counts[static_cast<std::size_t>(s - v)];
                }
                next[static_cast<std::size_t>(s)] = acc;
            }
            std::swap(counts, next);
        }
        double total_count = 0.0;
        for (std::int64_t v = lo_[0]; v <= hi_[0]; ++v) {
            const std::int64_t rest = static_cast<std::int64_t>(m_) - v;
            if (rest >= 0 && rest <= static_cast<std::int64_t>(m_)) {
                total_count += counts[static_cast<std::size_t>(rest)];
            }
        }
        lattice_size_ = total_count;
    }

    if (lattice_size_ <= enumeration_guard && lattice_size_ <= kEnumerationGuard) {
        build_enumeration();
    }
}

void FisherNcmh::build_enumeration() {
    if (enumerated_) return;
    const std::size_t cats = tots_.size();
    std::vector<std::int64_t> w(cats, 0);
    std::vector<double> log_weights;

    auto recurse = [&](auto&& self, std::size_t j, std::int64_t s, double acc) -> void {
        if (j == cats) {
            if (s == 0) {
                lattice_.push_back(w);
                log_weights.push_back(acc);
            }
            return;
        }
        // prune with the feasible range of the remaining categories
        const std::int64_t v_lo = std::max(lo_[j], s - suffix_hi_[j + 1]);
        const std::int64_t v_hi = std::min({hi_[j], s - suffix_lo_[j + 1], s});
        for (std::int64_t v = v_lo; v <= v_hi; ++v) {
            w[j] = v;
            self(self, j + 1, s - v,
                 acc + static_cast<double>(v) * log_r_[j] +
                     log_binomial(static_cast<double>(tots_[j]), static_cast<double>(v)));
        }
        w[j] = 0;
    };
    recurse(recurse, 0, static_cast<std::int64_t>(m_), 0.0);

    const double log_norm = log_sum_exp(log_weights);
    cumulative_.resize(log_weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        acc += std::exp(log_weights[i] - log_norm);
        cumulative_[i] = acc;
    }
    if (!cumulative_.empty()) cumulative_.back() = 1.0;
    enumerated_ = true;
}

std::vector<std::pair<std::vector<std::int64_t>, double>> FisherNcmh::pmf() const {
    require(enumerated_, ErrorCode::TooLarge, "feasible lattice too large to enumerate");
    std::vector<std::pair<std::vector<std::int64_t>, double>> out;
    out.reserve(lattice_.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < lattice_.size(); ++i) {
        out.emplace_back(lattice_[i], cumulative_[i] - prev);
        prev = cumulative_[i];
    }
    return out;
}

double FisherNcmh::log_weight(const std::vector<std::int64_t>& w) const {
    require(w.size() == tots_.size(), ErrorCode::InvalidArgument, "w has the wrong length");
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        acc += static_cast<double>(w[j]) * log_r_[j] +
               log_binomial(static_cast<double>(tots_[j]), static_cast<double>(w[j]));
    }
    return acc;
}

std::vector<std::int64_t> FisherNcmh::sample(RngStream& rng) const {
    const std::size_t cats = tots_.size();
    if (enumerated_) {
        const double u = rng.uniform01();
        const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
        const std::size_t idx = it == cumulative_.end()
                                    ? cumulative_.size() - 1
                                    : static_cast<std::size_t>(it - cumulative_.begin());
        return lattice_[idx];
    }

    // Sequential conditionals: w_j given the remaining budget s follows a
    // univariate noncentral hypergeometric tilted by the suffix weights.
    std::vector<std::int64_t> w(cats, 0);
    std::int64_t s = static_cast<std::int64_t>(m_);
    for (std::size_t j = 0; j + 1 < cats; ++j) {
        const std::int64_t v_lo = std::max(lo_[j], s - suffix_hi_[j + 1]);
        const std::int64_t v_hi = std::min({hi_[j], s - suffix_lo_[j + 1], s});
        std::vector<double> logp;
        std::vector<std::int64_t> support;
        for (std::int64_t v = v_lo; v <= v_hi; ++v) {
            const double tail = suffix_weight_[j + 1][static_cast<std::size_t>(s - v)];
            if (tail == kNegInf) continue;
            support.push_back(v);
            logp.push_back(static_cast<double>(v) * log_r_[j] +
                           log_binomial(static_cast<double>(tots_[j]),
                                        static_cast<double>(v)) +
                           tail);
        }
        require(!support.empty(), ErrorCode::Internal, "empty conditional support");
        const double log_norm = log_sum_exp(logp);
        const double u = rng.uniform01();
        double acc = 0.0;
        std::int64_t chosen = support.back();
        for (std::size_t k = 0; k < support.size(); ++k) {
            acc += std::exp(logp[k] - log_norm);
            if (u < acc) {
                chosen = support[k];
                break;
            }
        }
        w[j] = chosen;
        s -= chosen;
    }
    w[cats - 1] = s;
    return w;
}

std::vector<CountTable> FisherNcmh::sample_tables(std::size_t count, RngStream rng,
                                                  unsigned threads) const {
    std::vector<CountTable> tables(count);
    parallel_for(count, threads, [&](std::size_t i) {
        RngStream draw_stream = rng.child(i);
        CountTable t;
        t.tots = tots_;
        t.w = sample(draw_stream);
        t.n = n_;
        t.m = m_;
        tables[i] = std::move(t);
    });
    return tables;
}

double gamma1(double f1, double g1, double r, double tau) {
    require(f1 >= 0.0 && f1 <= 1.0 && g1 >= 0.0 && g1 <= 1.0, ErrorCode::OutOfRange,
            "f1 and g1 must lie in [0,1]");
    require(std::isfinite(r) && r > 0.0, ErrorCode::OutOfRange, "r must be positive");
    require(std::isfinite(tau) && tau > 0.0, ErrorCode::OutOfRange,
            "tau must lie in (0, infinity)");

    if (r < 1.0) {
        // Relabel the samples and invert r; the two block means are tied by
        // conservation of the overall fraction of ones.
        const double nu1 = gamma1(g1, f1, 1.0 / r, 1.0 / tau);
        return (tau * f1 + g1) - tau * nu1;
    }
    const double mix = tau * f1 + g1;
    if (r == 1.0) return mix / (tau + 1.0);

    const double rm1 = r - 1.0;
    const double disc = (tau + r + rm1 * mix) * (tau + r + rm1 * mix) - 4.0 * rm1 * r * mix;
    return mix / (tau + 1.0) +
           (rm1 * ((tau - 1.0) / (tau + 1.0)) * mix + tau + r - std::sqrt(disc)) / (2.0 * rm1);
}

} // namespace drpt
