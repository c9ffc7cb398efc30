#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mubqkd/galois.hpp"
#include "mubqkd/matrix.hpp"
#include "mubqkd/optics.hpp"
#include "mubqkd/security.hpp"

namespace mubqkd {

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Channel applied as a mixture of generalized Weyl errors: per trial one
/// error class (j, k) is drawn from the weight matrix. Any channel relevant
/// to the rate analysis twirls to this Bell-diagonal form.
struct ChannelModel {
    enum class Kind { Identity, Depolarizing, CorrelatedShift, BellDiagonal };

    Kind kind = Kind::Identity;
    double strength = 0.0;  // Depolarizing
    double e_z = 0.0;       // CorrelatedShift
    DMatrix lambda;         // BellDiagonal

    static ChannelModel identity();
    static ChannelModel depolarizing(double strength);
    // Depolarizing strength that yields the given matched-basis symbol error.
    static ChannelModel depolarizing_for_symbol_error(double e, int d);
    static ChannelModel correlated_shift(double e_z);
    static ChannelModel bell_diagonal(DMatrix lambda);

    DMatrix weights(const FieldCtx& ctx) const;
};

enum class MeasurementBackend { IdealPovm, OpticsLayout };

struct RunConfig {
    FieldCtx ctx;
    long long trials = 0;
    std::uint64_t seed = 0;
    // Selection probabilities for the d+1 bases (index 0 = computational);
    // empty means uniform. Asymmetric selection is allowed.
    std::vector<double> basis_probs;
    MeasurementBackend backend = MeasurementBackend::IdealPovm;
    // Optics backend network; passive layouts discard no-detection events.
    Topology topology = Topology::TimeDivisionMultiplexed;
    SwitchMode switch_mode = SwitchMode::Passive;
    int threads = 1;
};

/// Detected-event counters indexed (r_a, n_a, r_b, n_b) with basis index 0
/// the computational basis and k in [1, d] phase basis k-1.
struct TallyMatrix {
    int d = 0;
    std::vector<std::uint64_t> counts;

    TallyMatrix() = default;
    explicit TallyMatrix(int dim);

    std::uint64_t& at(int r_a, int n_a, int r_b, int n_b);
    const std::uint64_t& at(int r_a, int n_a, int r_b, int n_b) const;
    std::uint64_t total() const;

    void merge(const TallyMatrix& other);
    bool operator==(const TallyMatrix& other) const = default;
};

// Runs the prepare-and-measure protocol: per trial, sample (r_a, n_a),
// prepare the basis state, draw a Weyl error from the channel weights,
// measure in a sampled basis r_b, and tally detected outcomes. Each trial
// owns a counter-derived random stream, so results are bit-identical for a
// given seed regardless of the thread count.
TallyMatrix run_protocol(const RunConfig& config, const ChannelModel& channel);

// Empirical outcome-difference distributions from matched-basis blocks.
// Throws InsufficientData when a matched block has no detected events.
ErrorStats stats_from_tally(const FieldCtx& ctx, const TallyMatrix& tally);

struct EndToEndReport {
    TallyMatrix tally;
    ErrorStats stats;
    LambdaMatrix lambda;
    std::optional<RateReport> full_rate;  // present when lambda is physical
    RateReport bound_rate;
};

EndToEndReport end_to_end(const RunConfig& config, const ChannelModel& channel);

}  // namespace mubqkd
