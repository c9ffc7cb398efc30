#pragma once

#include <compare>
#include <map>
#include <optional>
#include <vector>

#include "mubqkd/galois.hpp"
#include "mubqkd/matrix.hpp"
#include "mubqkd/mub.hpp"

namespace mubqkd {

enum class Topology { Tree, TimeDivisionMultiplexed };
enum class SwitchMode { Passive, ActiveSwitch };

// Amplitude location: an output/input port (or tree-branch id) and an
// integer time slot in units of the slot pitch.
struct SlotKey {
    int port = 0;
    long long slot = 0;
    auto operator<=>(const SlotKey&) const = default;
};

/// Sparse temporal amplitude map for a photonic state propagating through
/// the measurement network. Total probability is <= 1; passive stages move
/// probability into non-designated side slots rather than absorbing it.
struct TemporalState {
    std::map<SlotKey, Cx> amp;

    double total_probability() const;
};

struct StageSpec {
    int arms = 2;           // p interfering arms with delays {0, delay, ..., (p-1) delay}
    long long delay = 0;    // arm-to-arm delay in slots
    int devices = 1;        // physical interferometers at this stage (tree levels fan out)
};

struct DetectionPoint {
    int port = 0;
    long long slot = 0;
};

/// Measurement network realizing the phase-0 basis analyzer for GF(p^N):
/// N cascaded p-arm delay interferometer stages with delays p^(N-1-k), either
/// as a tree (each output feeds its own next-stage device) or time-division
/// multiplexed (outputs re-enter one shared chain after per-port delays).
/// The detection map assigns each outcome the unique (port, slot) where its
/// basis state fully interferes; it is located by propagation, not hardcoded.
struct NetworkLayout {
    FieldCtx ctx;
    Topology topology;
    SwitchMode switch_mode;
    std::vector<StageSpec> stages;               // N entries, largest delay first
    std::vector<long long> inter_stage_delays;   // N-1 entries (TDM), port w delayed w*tau'_k
    std::vector<DetectionPoint> detection_map;   // outcome n -> designated point
    int device_count = 0;                        // N for TDM, (d-1)/(p-1) for tree
    double loss_factor = 1.0;                    // designated-slot probability factor

    int d() const { return ctx.order(); }
};

NetworkLayout build_layout(const FieldCtx& ctx, Topology topology, SwitchMode switch_mode);

// Z state (r absent): unit amplitude in slot n. Phase state: amplitudes of
// column n of build_wf_basis(r) across slots 0..d-1 on port 0.
TemporalState encode_state(const FieldCtx& ctx, std::optional<int> r, int n);

TemporalState state_from_vector(const CVec& amplitudes);

// Multiplies slot m by the conjugate diagonal of build_diag(r), so the
// downstream phase-0 analyzer measures phase basis r. State must occupy
// slots [0, d) on port 0.
TemporalState apply_phase_mod(const FieldCtx& ctx, const TemporalState& state, int r);

// One delay-interferometer stage. Passive: p x p discrete-Fourier splitter
// and combiner around the delayed arms. Active: the input splitter is
// replaced by a router that sends each slot entirely into the arm whose
// delay brings it to the recombination slot of its digit group.
TemporalState delay_interferometer_stage(const TemporalState& state, long long delay, int arms,
                                         SwitchMode mode);

// Full linear propagation through the layout. Input must occupy port 0,
// slots [0, d); throws std::invalid_argument otherwise.
TemporalState propagate(const NetworkLayout& layout, const TemporalState& state);

// POVM elements for the d designated outcomes, reconstructed by propagating
// every computational basis state. Passive layouts give p^-N |psi_n><psi_n|,
// active layouts a resolution of the identity.
std::vector<CMatrix> extract_povm(const NetworkLayout& layout);

struct MeasureProbs {
    std::vector<double> outcome;  // probability per designated outcome
    double no_detection = 0.0;
};

// Phase-modulate for basis r, propagate, and read designated-slot
// probabilities for a normalized input state vector.
MeasureProbs measure_in_wf_basis(const NetworkLayout& layout, const CVec& state, int r);

// Verifies that every designated point receives at most one interferometric
// path from each input slot; throws std::logic_error on a branch collision.
void validate_disjointness(const NetworkLayout& layout);

/// Conditional detection probabilities P(n_b | r_a, n_a, r_b), normalized
/// over detected events. Basis index 0 is the computational (time-bin)
/// basis; index k in [1, d] is phase basis k-1 in shift-eigenbasis labels.
/// The channel is a mixture of generalized Weyl errors with the given
/// d x d weight matrix; phase-basis analysis runs through the layout.
struct ConditionalProbs {
    int d = 0;
    std::vector<double> p;  // [(d+1) * d * (d+1) * d], row-major over (r_a, n_a, r_b, n_b)

    double& at(int r_a, int n_a, int r_b, int n_b);
    const double& at(int r_a, int n_a, int r_b, int n_b) const;
};

ConditionalProbs conditional_probabilities(const FieldCtx& ctx, const NetworkLayout& layout,
                                           const DMatrix& weyl_weights);

}  // namespace mubqkd
