#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mubqkd/galois.hpp"
#include "mubqkd/matrix.hpp"

namespace mubqkd {

// Bell-diagonal weights with entries too negative to clamp.
struct UnphysicalLambda : std::runtime_error {
    UnphysicalLambda(const std::string& what, std::vector<std::tuple<int, int, double>> entries)
        : std::runtime_error(what), offending(std::move(entries)) {}
    std::vector<std::tuple<int, int, double>> offending;  // (j, k, value)
};

/// Outcome-difference distributions: q_z[t] = Pr(a - b = t) in the
/// computational basis and q_r[r][t] the same per phase basis, with field
/// subtraction throughout. Symbol error of a basis is 1 - q[0].
struct ErrorStats {
    enum class Source { Analytic, Sampled };

    std::vector<double> q_z;
    std::vector<std::vector<double>> q_r;  // d vectors of length d
    Source source = Source::Analytic;

    int d() const { return static_cast<int>(q_z.size()); }
    double symbol_error_z() const { return 1.0 - q_z[0]; }
    double symbol_error(int r) const { return 1.0 - q_r[r][0]; }
    // Average over all d+1 bases, computational basis included.
    double average_symbol_error() const;
};

/// Coefficients of the Bell-diagonal form of the channel: lambda(j, k) is the
/// joint weight of a j shift in the computational basis and a -k shift in the
/// 0th phase basis. Entries sum to 1; physical iff all entries >= -1e-9.
struct LambdaMatrix {
    DMatrix lambda;
    bool physical = true;
    std::vector<std::tuple<int, int, double>> negative_entries;  // (j, k, value)

    int d() const { return lambda.rows(); }
    double sum() const;
};

LambdaMatrix make_lambda(DMatrix lambda);

enum class RateMode { FullLambda, AverageErrorBound };

struct RateReport {
    double mutual_information = 0.0;  // I(A:B) in bits
    double holevo_bound = 0.0;        // chi(A:E) in bits
    double key_rate = 0.0;            // r_inf in bits per sifted symbol
    RateMode mode = RateMode::FullLambda;
    double lambda00 = 0.0;
    std::vector<std::tuple<int, int, double>> clamped;  // tiny negatives zeroed
    // e-bar in AverageErrorBound mode averages over all d+1 bases.
    double average_symbol_error = 0.0;
};

// Shannon entropy in bits; 0 log 0 = 0.
double entropy_bits(const std::vector<double>& p);

ErrorStats q_from_lambda(const FieldCtx& ctx, const LambdaMatrix& lambda);

// Inverts the error-vector relations; unphysical inputs produce flagged
// negative entries rather than an error.
LambdaMatrix lambda_from_q(const FieldCtx& ctx, const ErrorStats& stats);

// Asymptotic rate from the full Bell-diagonal weights:
// r = log2 d - H(lambda). Entries in (-1e-9, 0) are clamped and recorded;
// anything more negative throws UnphysicalLambda.
RateReport key_rate_full(const LambdaMatrix& lambda);

// Conservative bound from the average symbol error over all d+1 bases:
// lambda00 = 1 - (d+1)/d * e_bar with the remaining weight spread uniformly.
RateReport key_rate_avg_bound(int d, double e_bar);
RateReport key_rate_from_lambda00(int d, double lambda00);

// r = log2 d - H(q_z) - H(q_0): the two-basis (d-dimensional BB84) rate.
double rate_two_basis(int d, const std::vector<double>& q_z, const std::vector<double>& q_0);
// Same under symmetric errors q = (1-e, e/(d-1), ...) in both bases.
double rate_two_basis_symmetric(int d, double e);

// Smallest e with rate_fn(e) = 0, by bisection on [1e-9, d/(d+1) - 1e-9]
// to 1e-6; throws std::runtime_error when the rate does not change sign.
double threshold(int d, const std::function<double(double)>& rate_fn);

/// Fully correlated shift noise: only lambda(i, i) nonzero, lambda00 = 1 - e_z
/// and e_z/(d-1) elsewhere on the diagonal. Phase basis r = 1 sees no error,
/// every other basis sees e_z, so the (d+1)-basis protocol keeps more rate
/// than the two-basis protocol at equal average symbol error.
struct CorrelatedModel {
    LambdaMatrix lambda;
    ErrorStats stats;
    std::vector<double> symbol_errors;  // per phase basis, exact
    double e_z = 0.0;
    double e_bar_two_basis = 0.0;
    double e_bar_d_plus_1 = 0.0;
    double rate_two_basis = 0.0;
    double rate_d_plus_1 = 0.0;
};

CorrelatedModel correlated_model(const FieldCtx& ctx, double e_z);

// Closed forms of the two model rates as functions of the protocol's own
// average symbol error e_bar.
double correlated_rate_two_basis(int d, double e_bar);
double correlated_rate_d_plus_1(int d, double e_bar);

}  // namespace mubqkd
