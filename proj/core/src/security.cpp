#include "mubqkd/security.hpp"

#include <cmath>
#include <sstream>

namespace mubqkd {

namespace {

constexpr double kClampTol = 1e-9;

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

double ErrorStats::average_symbol_error() const {
    double s = symbol_error_z();
    for (const auto& q : q_r) s += 1.0 - q[0];
    return s / (d() + 1);
}

double LambdaMatrix::sum() const {
    double s = 0.0;
    for (double v : lambda.data()) s += v;
    return s;
}

LambdaMatrix make_lambda(DMatrix lambda) {
    if (lambda.rows() != lambda.cols()) throw std::invalid_argument("lambda must be square");
    LambdaMatrix out{std::move(lambda), true, {}};
    const int d = out.d();
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
            if (out.lambda(j, k) < -kClampTol) {
                out.physical = false;
                out.negative_entries.emplace_back(j, k, out.lambda(j, k));
            }
    return out;
}

double entropy_bits(const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p) {
        if (x < -kClampTol) throw std::domain_error("entropy of a negative probability");
        h -= xlog2x(x);
    }
    return h;
}

ErrorStats q_from_lambda(const FieldCtx& ctx, const LambdaMatrix& lambda) {
    const int d = ctx.order();
    if (lambda.d() != d) throw std::invalid_argument("lambda dimension mismatch");
    ErrorStats stats;
    stats.source = ErrorStats::Source::Analytic;
    stats.q_z.assign(d, 0.0);
    stats.q_r.assign(d, std::vector<double>(d, 0.0));
    for (int t = 0; t < d; ++t)
        for (int k = 0; k < d; ++k) stats.q_z[t] += lambda.lambda(t, k);
    for (int r = 0; r < d; ++r)
        for (int t = 0; t < d; ++t)
            for (int j = 0; j < d; ++j)
                stats.q_r[r][t] += lambda.lambda(j, ctx.sub(ctx.mul(r, j), t));
    return stats;
}

LambdaMatrix lambda_from_q(const FieldCtx& ctx, const ErrorStats& stats) {
    const int d = ctx.order();
    if (stats.d() != d || static_cast<int>(stats.q_r.size()) != d)
        throw std::invalid_argument("error stats dimension mismatch");
    DMatrix lambda(d, d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            double s = stats.q_z[j] - 1.0;
            for (int r = 0; r < d; ++r) s += stats.q_r[r][ctx.sub(ctx.mul(r, j), k)];
            lambda(j, k) = s / d;
        }
    return make_lambda(std::move(lambda));
}

RateReport key_rate_full(const LambdaMatrix& lambda) {
    const int d = lambda.d();
    if (!lambda.physical) {
        std::ostringstream msg;
        msg << "unphysical Bell-diagonal weights:";
        for (const auto& [j, k, v] : lambda.negative_entries)
            msg << " lambda(" << j << "," << k << ")=" << v;
        throw UnphysicalLambda(msg.str(), lambda.negative_entries);
    }

    RateReport report;
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(d) * d);
    double total = 0.0;
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            double v = lambda.lambda(j, k);
            if (v < 0.0) {
                report.clamped.emplace_back(j, k, v);
                v = 0.0;
            }
            flat.push_back(v);
            total += v;
        }
    if (std::abs(total - 1.0) > 1e-6)
        throw std::invalid_argument("lambda entries must sum to 1");
    for (double& v : flat) v /= total;

    std::vector<double> q_z(d, 0.0);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) q_z[j] += flat[static_cast<size_t>(j) * d + k];

    const double log2d = std::log2(static_cast<double>(d));
    const double h_lambda = entropy_bits(flat);
    const double h_qz = entropy_bits(q_z);
    report.mutual_information = log2d - h_qz;
    report.holevo_bound = h_lambda - h_qz;
    report.key_rate = log2d - h_lambda;
    report.mode = RateMode::FullLambda;
    report.lambda00 = flat[0];
    return report;
}

RateReport key_rate_from_lambda00(int d, double lambda00) {
    if (lambda00 < 0.0 || lambda00 > 1.0)
        throw std::domain_error("lambda00 must lie in [0, 1]");
    // Extremal weights: lambda00 plus a uniform tail over the d^2 - 1
    // remaining error classes maximize the entropy at fixed lambda00.
    DMatrix lambda(d, d);
    const double tail = (1.0 - lambda00) / (d * d - 1);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) lambda(j, k) = tail;
    lambda(0, 0) = lambda00;
    RateReport report = key_rate_full(make_lambda(std::move(lambda)));
    report.mode = RateMode::AverageErrorBound;
    report.average_symbol_error = (1.0 - lambda00) * d / (d + 1);
    return report;
}

RateReport key_rate_avg_bound(int d, double e_bar) {
    const double e_max = static_cast<double>(d) / (d + 1);
    if (e_bar < 0.0 || e_bar > e_max)
        throw std::domain_error("average symbol error out of [0, d/(d+1)]");
    RateReport report = key_rate_from_lambda00(d, 1.0 - e_bar * (d + 1) / d);
    report.average_symbol_error = e_bar;
    return report;
}

double rate_two_basis(int d, const std::vector<double>& q_z, const std::vector<double>& q_0) {
    if (static_cast<int>(q_z.size()) != d || static_cast<int>(q_0.size()) != d)
        throw std::invalid_argument("probability vector dimension mismatch");
    return std::log2(static_cast<double>(d)) - entropy_bits(q_z) - entropy_bits(q_0);
}

double rate_two_basis_symmetric(int d, double e) {
    std::vector<double> q(d, d > 1 ? e / (d - 1) : 0.0);
    q[0] = 1.0 - e;
    return rate_two_basis(d, q, q);
}

double threshold(int d, const std::function<double(double)>& rate_fn) {
    double lo = 1e-9;
    double hi = static_cast<double>(d) / (d + 1) - 1e-9;
    double f_lo = rate_fn(lo);
    double f_hi = rate_fn(hi);
    if (f_lo <= 0.0 || f_hi >= 0.0)
        throw std::runtime_error("rate function does not change sign on the bracket");
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        if (rate_fn(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

CorrelatedModel correlated_model(const FieldCtx& ctx, double e_z) {
    if (e_z < 0.0 || e_z >= 1.0) throw std::domain_error("e_z must lie in [0, 1)");
    const int d = ctx.order();
    CorrelatedModel model;
    model.e_z = e_z;

    DMatrix lambda(d, d);
    lambda(0, 0) = 1.0 - e_z;
    for (int i = 1; i < d; ++i) lambda(i, i) = e_z / (d - 1);
    model.lambda = make_lambda(std::move(lambda));
    model.stats = q_from_lambda(ctx, model.lambda);

    // r * j == j exactly when r = 1 or j = 0, so basis 1 sees no error and
    // every other basis repeats the computational-basis error.
    model.symbol_errors.assign(d, e_z);
    if (d > 1) model.symbol_errors[1] = 0.0;
    model.e_bar_two_basis = e_z;
    model.e_bar_d_plus_1 = e_z * d / (d + 1);

    const double log2d = std::log2(static_cast<double>(d));
    const double tail = d > 1 ? xlog2x(e_z) - e_z * std::log2(static_cast<double>(d - 1)) : 0.0;
    model.rate_two_basis = log2d + 2.0 * (xlog2x(1.0 - e_z) + tail);
    model.rate_d_plus_1 = log2d + xlog2x(1.0 - e_z) + tail;
    return model;
}

double correlated_rate_two_basis(int d, double e_bar) {
    const double log2d = std::log2(static_cast<double>(d));
    const double tail = xlog2x(e_bar) - e_bar * std::log2(static_cast<double>(d - 1));
    return log2d + 2.0 * (xlog2x(1.0 - e_bar) + tail);
}

double correlated_rate_d_plus_1(int d, double e_bar) {
    const double e_z = e_bar * (d + 1) / d;
    const double log2d = std::log2(static_cast<double>(d));
    const double tail = xlog2x(e_z) - e_z * std::log2(static_cast<double>(d - 1));
    return log2d + xlog2x(1.0 - e_z) + tail;
}

}  // namespace mubqkd
