#include "mubqkd/protocol.hpp"

#include <cmath>
#include <thread>

#include "mubqkd/mub.hpp"

namespace mubqkd {

namespace {

// Counter-based per-trial stream: a splitmix64 chain seeded from
// (seed, trial index). Trials draw a handful of variates each, so the
// stream never runs long.
struct TrialRng {
    std::uint64_t state;

    TrialRng(std::uint64_t seed, std::uint64_t trial)
        : state(seed + 0x9E3779B97F4A7C15ULL * (trial + 1)) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

int sample_cumulative(const std::vector<double>& cum, double u) {
    const int n = static_cast<int>(cum.size());
    for (int i = 0; i < n; ++i)
        if (u < cum[i]) return i;
    return n - 1;
}

std::vector<double> cumulative(const std::vector<double>& weights) {
    std::vector<double> cum(weights.size());
    double s = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        s += weights[i];
        cum[i] = s;
    }
    return cum;
}

// Outcome distributions per (r_a, n_a, j, k, r_b): d outcome probabilities
// followed by a no-detection weight, stored cumulatively for sampling.
struct OutcomeTables {
    int d = 0;
    std::vector<double> cum;  // stride d+1

    size_t index(int r_a, int n_a, int j, int k, int r_b) const {
        return ((((static_cast<size_t>(r_a) * d + n_a) * d + j) * d + k) * (d + 1) + r_b) *
               (d + 1);
    }
};

OutcomeTables build_tables(const RunConfig& config) {
    const FieldCtx& ctx = config.ctx;
    const int d = ctx.order();
    OutcomeTables tables;
    tables.d = d;
    tables.cum.assign(static_cast<size_t>(d + 1) * d * d * d * (d + 1) * (d + 1), 0.0);

    std::vector<CMatrix> durt;
    durt.reserve(d);
    for (int r = 0; r < d; ++r) durt.push_back(build_durt_basis(ctx, r));
    std::vector<CMatrix> error_ops;
    error_ops.reserve(static_cast<size_t>(d) * d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) error_ops.push_back(weyl(ctx, j, k).adjoint());

    std::optional<NetworkLayout> layout;
    std::optional<EquivalenceMap> eq;
    std::vector<std::vector<int>> inverse_col;
    if (config.backend == MeasurementBackend::OpticsLayout) {
        layout = build_layout(ctx, config.topology, config.switch_mode);
        eq = equivalence_map(ctx);
        inverse_col.assign(d, std::vector<int>(d));
        for (int r = 0; r < d; ++r)
            for (int j = 0; j < d; ++j) inverse_col[r][eq->state_perm[r][j]] = j;
    }

    for (int r_a = 0; r_a <= d; ++r_a)
        for (int n_a = 0; n_a < d; ++n_a) {
            CVec prepared(d);
            if (r_a == 0)
                prepared[n_a] = 1.0;
            else
                prepared = durt[r_a - 1].column(n_a);
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    const CVec received = error_ops[static_cast<size_t>(j) * d + k] * prepared;
                    for (int r_b = 0; r_b <= d; ++r_b) {
                        std::vector<double> probs(d + 1, 0.0);
                        if (r_b == 0) {
                            // direct arrival-time detection, lossless
                            for (int m = 0; m < d; ++m) probs[m] = std::norm(received[m]);
                        } else if (config.backend == MeasurementBackend::IdealPovm) {
                            for (int b = 0; b < d; ++b)
                                probs[b] = std::norm(inner(durt[r_b - 1].column(b), received));
                        } else {
                            const MeasureProbs mp = measure_in_wf_basis(
                                *layout, received, eq->basis_perm[r_b - 1]);
                            for (int n = 0; n < d; ++n)
                                probs[inverse_col[r_b - 1][n]] = mp.outcome[n];
                            probs[d] = mp.no_detection;
                        }
                        const size_t base = tables.index(r_a, n_a, j, k, r_b);
                        double s = 0.0;
                        for (int i = 0; i <= d; ++i) {
                            s += probs[i];
                            tables.cum[base + i] = s;
                        }
                    }
                }
        }
    return tables;
}

}  // namespace

ChannelModel ChannelModel::identity() { return {}; }

ChannelModel ChannelModel::depolarizing(double strength) {
    if (strength < 0.0 || strength > 1.0)
        throw std::domain_error("depolarizing strength must lie in [0, 1]");
    ChannelModel m;
    m.kind = Kind::Depolarizing;
    m.strength = strength;
    return m;
}

ChannelModel ChannelModel::depolarizing_for_symbol_error(double e, int d) {
    return depolarizing(e * d / (d - 1));
}

ChannelModel ChannelModel::correlated_shift(double e_z) {
    if (e_z < 0.0 || e_z >= 1.0) throw std::domain_error("e_z must lie in [0, 1)");
    ChannelModel m;
    m.kind = Kind::CorrelatedShift;
    m.e_z = e_z;
    return m;
}

ChannelModel ChannelModel::bell_diagonal(DMatrix lambda) {
    ChannelModel m;
    m.kind = Kind::BellDiagonal;
    m.lambda = std::move(lambda);
    return m;
}

DMatrix ChannelModel::weights(const FieldCtx& ctx) const {
    const int d = ctx.order();
    DMatrix w(d, d);
    switch (kind) {
        case Kind::Identity:
            w(0, 0) = 1.0;
            break;
        case Kind::Depolarizing: {
            const double off = strength / (d * d);
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) w(j, k) = off;
            w(0, 0) = 1.0 - strength * (d * d - 1) / (d * d);
            break;
        }
        case Kind::CorrelatedShift:
            w(0, 0) = 1.0 - e_z;
            for (int i = 1; i < d; ++i) w(i, i) = e_z / (d - 1);
            break;
        case Kind::BellDiagonal: {
            if (lambda.rows() != d || lambda.cols() != d)
                throw std::invalid_argument("Bell-diagonal weights dimension mismatch");
            double s = 0.0;
            for (double v : lambda.data()) {
                if (v < 0.0) throw std::domain_error("channel weights must be nonnegative");
                s += v;
            }
            if (std::abs(s - 1.0) > 1e-9)
                throw std::domain_error("channel weights must sum to 1");
            w = lambda;
            break;
        }
    }
    return w;
}

TallyMatrix::TallyMatrix(int dim)
    : d(dim), counts(static_cast<size_t>(dim + 1) * dim * (dim + 1) * dim, 0) {}

std::uint64_t& TallyMatrix::at(int r_a, int n_a, int r_b, int n_b) {
    return counts[((static_cast<size_t>(r_a) * d + n_a) * (d + 1) + r_b) * d + n_b];
}

const std::uint64_t& TallyMatrix::at(int r_a, int n_a, int r_b, int n_b) const {
    return counts[((static_cast<size_t>(r_a) * d + n_a) * (d + 1) + r_b) * d + n_b];
}

std::uint64_t TallyMatrix::total() const {
    std::uint64_t s = 0;
    for (std::uint64_t c : counts) s += c;
    return s;
}

void TallyMatrix::merge(const TallyMatrix& other) {
    if (d != other.d) throw std::invalid_argument("tally dimension mismatch");
    for (size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

TallyMatrix run_protocol(const RunConfig& config, const ChannelModel& channel) {
    const FieldCtx& ctx = config.ctx;
    const int d = ctx.order();
    if (config.trials < 0) throw std::invalid_argument("trial count must be nonnegative");

    std::vector<double> basis_probs = config.basis_probs;
    if (basis_probs.empty()) basis_probs.assign(d + 1, 1.0 / (d + 1));
    if (static_cast<int>(basis_probs.size()) != d + 1)
        throw std::invalid_argument("basis_probs must have d+1 entries");
    double ps = 0.0;
    for (double p : basis_probs) {
        if (p < 0.0) throw std::domain_error("basis probabilities must be nonnegative");
        ps += p;
    }
    if (std::abs(ps - 1.0) > 1e-9)
        throw std::invalid_argument("basis probabilities must sum to 1");

    const DMatrix weights = channel.weights(ctx);
    std::vector<double> error_weights(static_cast<size_t>(d) * d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) error_weights[static_cast<size_t>(j) * d + k] = weights(j, k);

    const std::vector<double> basis_cum = cumulative(basis_probs);
    const std::vector<double> error_cum = cumulative(error_weights);
    const OutcomeTables tables = build_tables(config);

    const int threads = std::max(1, config.threads);
    std::vector<TallyMatrix> partial(threads, TallyMatrix(d));

    auto worker = [&](int t, long long lo, long long hi) {
        TallyMatrix& tally = partial[t];
        for (long long trial = lo; trial < hi; ++trial) {
            TrialRng rng(config.seed, static_cast<std::uint64_t>(trial));
            const int r_a = sample_cumulative(basis_cum, rng.uniform());
            const int n_a = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(d));
            const int err = sample_cumulative(error_cum, rng.uniform());
            const int r_b = sample_cumulative(basis_cum, rng.uniform());
            const size_t base = tables.index(r_a, n_a, err / d, err % d, r_b);
            const double u = rng.uniform() * tables.cum[base + d];
            int outcome = d;
            for (int i = 0; i <= d; ++i)
                if (u < tables.cum[base + i]) {
                    outcome = i;
                    break;
                }
            if (outcome >= d) continue;  // no detection (passive loss)
            ++tally.at(r_a, n_a, r_b, outcome);
        }
    };

    if (threads == 1) {
        worker(0, 0, config.trials);
    } else {
        std::vector<std::thread> pool;
        const long long chunk = (config.trials + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const long long lo = t * chunk;
            const long long hi = std::min<long long>(config.trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, t, lo, hi);
        }
        for (std::thread& th : pool) th.join();
    }

    TallyMatrix tally(d);
    for (const TallyMatrix& part : partial) tally.merge(part);
    return tally;
}

ErrorStats stats_from_tally(const FieldCtx& ctx, const TallyMatrix& tally) {
    const int d = ctx.order();
    if (tally.d != d) throw std::invalid_argument("tally dimension mismatch");
    ErrorStats stats;
    stats.source = ErrorStats::Source::Sampled;
    stats.q_z.assign(d, 0.0);
    stats.q_r.assign(d, std::vector<double>(d, 0.0));

    for (int basis = 0; basis <= d; ++basis) {
        std::vector<double> q(d, 0.0);
        std::uint64_t total = 0;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                const std::uint64_t c = tally.at(basis, a, basis, b);
                q[ctx.sub(a, b)] += static_cast<double>(c);
                total += c;
            }
        if (total == 0)
            throw InsufficientData("no detected events in matched-basis block " +
                                   std::to_string(basis));
        for (double& v : q) v /= static_cast<double>(total);
        if (basis == 0)
            stats.q_z = std::move(q);
        else
            stats.q_r[basis - 1] = std::move(q);
    }
    return stats;
}

EndToEndReport end_to_end(const RunConfig& config, const ChannelModel& channel) {
    EndToEndReport report;
    report.tally = run_protocol(config, channel);
    report.stats = stats_from_tally(config.ctx, report.tally);
    report.lambda = lambda_from_q(config.ctx, report.stats);
    if (report.lambda.physical) report.full_rate = key_rate_full(report.lambda);
    report.bound_rate =
        key_rate_avg_bound(config.ctx.order(), report.stats.average_symbol_error());
    return report;
}

}  // namespace mubqkd
