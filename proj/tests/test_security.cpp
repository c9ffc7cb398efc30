#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mubqkd/security.hpp"

using namespace mubqkd;

namespace {

// Published four-dimensional Bell-diagonal estimate with small negative
// entries; rows sum to (0.9940, 0.0022, 0.0018, 0.0020).
DMatrix experimental_lambda() {
    const double rows[4][4] = {{0.9606, 0.0084, 0.0159, 0.0091},
                               {0.0052, -0.0039, 0.0049, -0.0040},
                               {0.0047, 0.0046, -0.0053, -0.0022},
                               {0.0063, -0.0029, -0.0047, 0.0033}};
    DMatrix m(4, 4);
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) m(j, k) = rows[j][k];
    return m;
}

LambdaMatrix random_physical_lambda(int d, std::mt19937_64& rng) {
    std::exponential_distribution<double> exp_dist(1.0);
    DMatrix m(d, d);
    double total = 0.0;
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            m(j, k) = exp_dist(rng);
            total += m(j, k);
        }
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) m(j, k) /= total;
    return make_lambda(std::move(m));
}

double max_lambda_diff(const LambdaMatrix& a, const LambdaMatrix& b) {
    double w = 0.0;
    for (int j = 0; j < a.d(); ++j)
        for (int k = 0; k < a.d(); ++k)
            w = std::max(w, std::abs(a.lambda(j, k) - b.lambda(j, k)));
    return w;
}

}  // namespace

TEST_CASE("entropy basics") {
    CHECK(entropy_bits({1.0, 0.0, 0.0}) == 0.0);
    CHECK(std::abs(entropy_bits({0.25, 0.25, 0.25, 0.25}) - 2.0) <= 1e-12);
    CHECK(std::abs(entropy_bits(std::vector<double>(16, 1.0 / 16)) - 4.0) <= 1e-12);
}

TEST_CASE("error vectors from noiseless and uniform weights") {
    const FieldCtx ctx(2, 2);
    DMatrix noiseless(4, 4);
    noiseless(0, 0) = 1.0;
    const ErrorStats clean = q_from_lambda(ctx, make_lambda(noiseless));
    CHECK(clean.q_z[0] == 1.0);
    for (int r = 0; r < 4; ++r) {
        CHECK(clean.q_r[r][0] == 1.0);
        CHECK(clean.symbol_error(r) == 0.0);
    }

    DMatrix uniform(4, 4);
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) uniform(j, k) = 1.0 / 16;
    const ErrorStats flat = q_from_lambda(ctx, make_lambda(uniform));
    for (int t = 0; t < 4; ++t) {
        CHECK(std::abs(flat.q_z[t] - 0.25) <= 1e-15);
        for (int r = 0; r < 4; ++r) CHECK(std::abs(flat.q_r[r][t] - 0.25) <= 1e-15);
    }
}

TEST_CASE("correlated weights leave basis 1 error-free") {
    const FieldCtx ctx(2, 2);
    const double e_z = 0.12;
    DMatrix m(4, 4);
    m(0, 0) = 1.0 - e_z;
    for (int i = 1; i < 4; ++i) m(i, i) = e_z / 3.0;
    const ErrorStats stats = q_from_lambda(ctx, make_lambda(m));
    CHECK(stats.q_r[1][0] == 1.0);
    for (int t = 1; t < 4; ++t) CHECK(stats.q_r[1][t] == 0.0);
    for (int r : {0, 2, 3}) CHECK(std::abs(stats.q_r[r][0] - (1.0 - e_z)) <= 1e-15);
}

TEST_CASE("lambda reconstruction inverts the error vectors") {
    const FieldCtx ctx(2, 2);
    DMatrix noiseless(4, 4);
    noiseless(0, 0) = 1.0;
    const LambdaMatrix original = make_lambda(noiseless);
    const LambdaMatrix back = lambda_from_q(ctx, q_from_lambda(ctx, original));
    CHECK(max_lambda_diff(original, back) <= 1e-15);

    ErrorStats uniform;
    uniform.q_z.assign(4, 0.25);
    uniform.q_r.assign(4, std::vector<double>(4, 0.25));
    const LambdaMatrix flat = lambda_from_q(ctx, uniform);
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) CHECK(std::abs(flat.lambda(j, k) - 1.0 / 16) <= 1e-15);
}

TEST_CASE("round trip on random physical weights") {
    std::mt19937_64 rng(0x5eed);
    for (const auto& [p, n] : {std::pair{2, 1}, {3, 1}, {2, 2}, {3, 2}}) {
        const FieldCtx ctx(p, n);
        for (int trial = 0; trial < 100; ++trial) {
            const LambdaMatrix lambda = random_physical_lambda(ctx.order(), rng);
            const LambdaMatrix back = lambda_from_q(ctx, q_from_lambda(ctx, lambda));
            REQUIRE(max_lambda_diff(lambda, back) <= 1e-12);
        }
    }
}

TEST_CASE("experimental-style weights round-trip and are flagged unphysical") {
    const FieldCtx ctx(2, 2);
    const LambdaMatrix lambda = make_lambda(experimental_lambda());
    CHECK(lambda.lambda(0, 0) == 0.9606);
    CHECK_FALSE(lambda.physical);
    CHECK(lambda.negative_entries.size() == 6);
    bool found11 = false;
    for (const auto& [j, k, v] : lambda.negative_entries)
        if (j == 1 && k == 1) {
            found11 = true;
            CHECK(v == -0.0039);
        }
    CHECK(found11);
    CHECK(std::abs(lambda.sum() - 1.0) <= 1e-12);

    // the linear relations still invert even though entries are negative
    const LambdaMatrix back = lambda_from_q(ctx, q_from_lambda(ctx, lambda));
    CHECK(max_lambda_diff(lambda, back) <= 1e-12);

    CHECK_THROWS_AS((void)key_rate_full(lambda), UnphysicalLambda);
}

TEST_CASE("full-lambda rates at the extremes") {
    DMatrix noiseless(4, 4);
    noiseless(0, 0) = 1.0;
    const RateReport clean = key_rate_full(make_lambda(noiseless));
    CHECK(std::abs(clean.key_rate - 2.0) <= 1e-12);
    CHECK(std::abs(clean.mutual_information - 2.0) <= 1e-12);
    CHECK(std::abs(clean.holevo_bound) <= 1e-12);

    DMatrix uniform(4, 4);
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) uniform(j, k) = 1.0 / 16;
    const RateReport flat = key_rate_full(make_lambda(uniform));
    CHECK(std::abs(flat.key_rate + 2.0) <= 1e-12);
}

TEST_CASE("tiny negative entries are clamped and recorded") {
    DMatrix m(2, 2);
    m(0, 0) = 1.0 + 4e-10;
    m(0, 1) = -2e-10;
    m(1, 0) = -2e-10;
    m(1, 1) = 0.0;
    const LambdaMatrix lambda = make_lambda(std::move(m));
    CHECK(lambda.physical);
    const RateReport report = key_rate_full(lambda);
    CHECK(report.clamped.size() == 2);
    CHECK(std::abs(report.key_rate - 1.0) <= 1e-6);
}

TEST_CASE("average-error bound values") {
    const RateReport r96 = key_rate_from_lambda00(4, 0.96);
    CHECK(r96.key_rate >= 1.60);
    CHECK(std::abs(r96.key_rate - 1.601) <= 2e-3);
    CHECK(r96.mode == RateMode::AverageErrorBound);

    // the experiment's phase-basis average error keeps a positive bound
    CHECK(key_rate_avg_bound(4, 0.038).key_rate > 0.0);
    CHECK(std::abs(key_rate_avg_bound(4, 0.0).key_rate - 2.0) <= 1e-12);
    CHECK_THROWS_AS((void)key_rate_avg_bound(4, 0.9), std::domain_error);
}

TEST_CASE("bound never exceeds the full-lambda rate at equal average error") {
    std::mt19937_64 rng(0xb0);
    const FieldCtx ctx(2, 2);
    for (int trial = 0; trial < 50; ++trial) {
        const LambdaMatrix lambda = random_physical_lambda(4, rng);
        const ErrorStats stats = q_from_lambda(ctx, lambda);
        const double full = key_rate_full(lambda).key_rate;
        const double bound = key_rate_avg_bound(4, stats.average_symbol_error()).key_rate;
        REQUIRE(bound <= full + 1e-9);
    }
}

TEST_CASE("thresholds reproduce the known values") {
    const double t4 = threshold(4, [](double e) { return key_rate_avg_bound(4, e).key_rate; });
    CHECK(std::abs(t4 - 0.2317) <= 1e-4);

    const double t2 = threshold(2, [](double e) { return key_rate_avg_bound(2, e).key_rate; });
    CHECK(std::abs(t2 - 0.126) <= 1e-3);

    const double t2b = threshold(2, [](double e) { return rate_two_basis_symmetric(2, e); });
    CHECK(std::abs(t2b - 0.110) <= 1e-3);

    CHECK_THROWS_AS((void)threshold(4, [](double) { return 1.0; }), std::runtime_error);
}

TEST_CASE("two-basis rate") {
    std::vector<double> clean = {1.0, 0.0, 0.0, 0.0};
    CHECK(std::abs(rate_two_basis(4, clean, clean) - 2.0) <= 1e-12);
    CHECK(std::abs(rate_two_basis_symmetric(2, 0.11)) <= 1e-3);  // at the two-basis threshold
    // closed form agreement for the correlated model
    CHECK(std::abs(rate_two_basis_symmetric(4, 0.1) - correlated_rate_two_basis(4, 0.1)) <= 1e-12);
}

TEST_CASE("correlated model") {
    const FieldCtx ctx(2, 2);
    const CorrelatedModel zero = correlated_model(ctx, 0.0);
    CHECK(std::abs(zero.rate_two_basis - 2.0) <= 1e-12);
    CHECK(std::abs(zero.rate_d_plus_1 - 2.0) <= 1e-12);

    const double e_z = 0.1;
    const CorrelatedModel model = correlated_model(ctx, e_z);
    CHECK(model.lambda.lambda(0, 0) == 1.0 - e_z);
    for (int i = 1; i < 4; ++i) CHECK(model.lambda.lambda(i, i) == e_z / 3.0);
    CHECK(model.symbol_errors[1] == 0.0);
    for (int r : {0, 2, 3}) CHECK(model.symbol_errors[r] == e_z);
    CHECK(std::abs(model.e_bar_d_plus_1 - 0.8 * e_z) <= 1e-15);

    // the full-lambda rate of the model matches its closed form
    const RateReport full = key_rate_full(model.lambda);
    CHECK(std::abs(full.key_rate - model.rate_d_plus_1) <= 1e-12);
    CHECK(std::abs(correlated_rate_d_plus_1(4, model.e_bar_d_plus_1) - model.rate_d_plus_1) <=
          1e-12);
}

TEST_CASE("correlated rates dominate the depolarizing bound on a grid") {
    for (int d : {2, 4}) {
        const double e_max = static_cast<double>(d) / (d + 1);
        for (int i = 0; i < 100; ++i) {
            const double e_bar = e_max * i / 100.0;
            const double r_corr = correlated_rate_d_plus_1(d, e_bar);
            const double r_two = correlated_rate_two_basis(d, e_bar);
            const double r_bound = key_rate_avg_bound(d, e_bar).key_rate;
            REQUIRE(r_corr >= r_two - 1e-12);
            REQUIRE(r_corr >= r_bound - 1e-12);
        }
        CHECK(std::abs(correlated_rate_d_plus_1(d, 0.0) - std::log2(d)) <= 1e-12);
        CHECK(std::abs(correlated_rate_two_basis(d, 0.0) - std::log2(d)) <= 1e-12);
    }
}
