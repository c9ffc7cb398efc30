#include "mubqkd/optics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mubqkd {

namespace {

std::vector<Cx> root_table(int n) {
    std::vector<Cx> w(n);
    for (int k = 0; k < n; ++k)
        w[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
    return w;
}

int routed_arm(long long slot, long long delay, int arms) {
    // Slot carrying digit value v of the current equivalent qudit recombines
    // after the (arms-1-v)-th arm delay. Inter-stage offsets are multiples of
    // arms * delay, so the digit survives the integer division.
    const int v = static_cast<int>((slot / delay) % arms);
    return arms - 1 - v;
}

// One stage of the shared (time-division multiplexed) chain: the port field
// is the splitter input port.
TemporalState chain_stage(const TemporalState& state, long long delay, int arms, SwitchMode mode) {
    const std::vector<Cx> omega = root_table(arms);
    const double s = 1.0 / std::sqrt(static_cast<double>(arms));
    TemporalState out;
    for (const auto& [key, amp] : state.amp) {
        if (mode == SwitchMode::Passive) {
            for (int a = 0; a < arms; ++a) {
                const Cx into_arm = amp * omega[(a * key.port) % arms] * s;
                for (int w = 0; w < arms; ++w)
                    out.amp[{w, key.slot + a * delay}] += into_arm * omega[(w * a) % arms] * s;
            }
        } else {
            const int a = routed_arm(key.slot, delay, arms);
            for (int w = 0; w < arms; ++w)
                out.amp[{w, key.slot + a * delay}] += amp * omega[(w * a) % arms] * s;
        }
    }
    return out;
}

// One tree level: each branch id fans out into its own next-level device, so
// the splitter input port is always 0 and the branch id extends by the exit port.
TemporalState tree_stage(const TemporalState& state, long long delay, int arms, SwitchMode mode) {
    const std::vector<Cx> omega = root_table(arms);
    const double s = 1.0 / std::sqrt(static_cast<double>(arms));
    TemporalState out;
    for (const auto& [key, amp] : state.amp) {
        if (mode == SwitchMode::Passive) {
            for (int a = 0; a < arms; ++a)
                for (int w = 0; w < arms; ++w)
                    out.amp[{key.port * arms + w, key.slot + a * delay}] +=
                        amp * s * omega[(w * a) % arms] * s;
        } else {
            const int a = routed_arm(key.slot, delay, arms);
            for (int w = 0; w < arms; ++w)
                out.amp[{key.port * arms + w, key.slot + a * delay}] +=
                    amp * omega[(w * a) % arms] * s;
        }
    }
    return out;
}

void check_input_window(const NetworkLayout& layout, const TemporalState& state) {
    for (const auto& [key, amp] : state.amp) {
        if (key.port != 0 || key.slot < 0 || key.slot >= layout.d())
            throw std::invalid_argument("input state outside the layout window");
        (void)amp;
    }
}

// Designated-slot amplitude response: row n, column m is the amplitude at
// outcome n's detection point when computational state m is launched.
CMatrix measurement_amplitudes(const NetworkLayout& layout) {
    const int d = layout.d();
    CMatrix a(d, d);
    for (int m = 0; m < d; ++m) {
        TemporalState in;
        in.amp[{0, m}] = 1.0;
        const TemporalState out = propagate(layout, in);
        for (int n = 0; n < d; ++n) {
            const auto it = out.amp.find({layout.detection_map[n].port, layout.detection_map[n].slot});
            a(n, m) = it == out.amp.end() ? Cx{} : it->second;
        }
    }
    return a;
}

}  // namespace

double TemporalState::total_probability() const {
    double s = 0.0;
    for (const auto& [key, a] : amp) {
        s += std::norm(a);
        (void)key;
    }
    return s;
}

TemporalState delay_interferometer_stage(const TemporalState& state, long long delay, int arms,
                                         SwitchMode mode) {
    if (delay <= 0) throw std::invalid_argument("stage delay must be positive");
    if (arms < 2) throw std::invalid_argument("stage needs at least two arms");
    return chain_stage(state, delay, arms, mode);
}

NetworkLayout build_layout(const FieldCtx& ctx, Topology topology, SwitchMode switch_mode) {
    const int p = ctx.characteristic();
    const int n = ctx.degree();
    const int d = ctx.order();

    NetworkLayout layout{ctx, topology, switch_mode, {}, {}, {}, 0, 1.0};
    long long delay = 1;
    for (int i = 0; i < n - 1; ++i) delay *= p;
    int devices = 1;
    for (int s = 0; s < n; ++s) {
        layout.stages.push_back({p, delay, topology == Topology::Tree ? devices : 1});
        delay /= p;
        devices *= p;
    }
    if (topology == Topology::TimeDivisionMultiplexed) {
        long long tau = d;
        for (int s = 0; s + 1 < n; ++s) {
            layout.inter_stage_delays.push_back(tau);
            tau *= p;
        }
        layout.device_count = n;
    } else {
        layout.device_count = (d - 1) / (p - 1);
    }
    layout.loss_factor =
        switch_mode == SwitchMode::Passive ? 1.0 / static_cast<double>(d) : 1.0;

    // Locate each outcome's full-interference point by propagating its
    // phase-0 basis state; the designated probability must equal the loss factor.
    layout.detection_map.resize(d);
    for (int outcome = 0; outcome < d; ++outcome) {
        const TemporalState out = propagate(layout, encode_state(ctx, 0, outcome));
        const SlotKey* best = nullptr;
        double best_prob = -1.0;
        for (const auto& [key, amp] : out.amp) {
            const double prob = std::norm(amp);
            if (prob > best_prob) {
                best_prob = prob;
                best = &key;
            }
        }
        if (!best || std::abs(best_prob - layout.loss_factor) > 1e-9)
            throw std::logic_error("designated slot not found at the expected probability");
        layout.detection_map[outcome] = {best->port, best->slot};
    }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (layout.detection_map[i].port == layout.detection_map[j].port &&
                layout.detection_map[i].slot == layout.detection_map[j].slot)
                throw std::logic_error("designated detection points collide");
    return layout;
}

TemporalState encode_state(const FieldCtx& ctx, std::optional<int> r, int n) {
    const int d = ctx.order();
    if (n < 0 || n >= d) throw std::domain_error("state index out of range");
    TemporalState state;
    if (!r.has_value()) {
        state.amp[{0, n}] = 1.0;
        return state;
    }
    const CMatrix b = build_wf_basis(ctx, *r);
    for (int m = 0; m < d; ++m) state.amp[{0, m}] = b(m, n);
    return state;
}

TemporalState state_from_vector(const CVec& amplitudes) {
    TemporalState state;
    for (size_t m = 0; m < amplitudes.size(); ++m)
        if (amplitudes[m] != Cx{}) state.amp[{0, static_cast<long long>(m)}] = amplitudes[m];
    return state;
}

TemporalState apply_phase_mod(const FieldCtx& ctx, const TemporalState& state, int r) {
    const CMatrix diag = build_diag(ctx, r);
    TemporalState out;
    for (const auto& [key, amp] : state.amp) {
        if (key.port != 0 || key.slot < 0 || key.slot >= ctx.order())
            throw std::invalid_argument("phase modulator window covers slots [0, d) only");
        out.amp[key] = amp * std::conj(diag(static_cast<int>(key.slot), static_cast<int>(key.slot)));
    }
    return out;
}

TemporalState propagate(const NetworkLayout& layout, const TemporalState& state) {
    check_input_window(layout, state);
    TemporalState cur = state;
    const int n = static_cast<int>(layout.stages.size());
    for (int s = 0; s < n; ++s) {
        const StageSpec& stage = layout.stages[s];
        if (layout.topology == Topology::Tree) {
            cur = tree_stage(cur, stage.delay, stage.arms, layout.switch_mode);
        } else {
            cur = chain_stage(cur, stage.delay, stage.arms, layout.switch_mode);
            if (s + 1 < n) {
                TemporalState delayed;
                for (const auto& [key, amp] : cur.amp)
                    delayed.amp[{key.port, key.slot + key.port * layout.inter_stage_delays[s]}] +=
                        amp;
                cur = std::move(delayed);
            }
        }
    }
    return cur;
}

std::vector<CMatrix> extract_povm(const NetworkLayout& layout) {
    const int d = layout.d();
    const CMatrix a = measurement_amplitudes(layout);
    std::vector<CMatrix> povm;
    povm.reserve(d);
    for (int n = 0; n < d; ++n) {
        CMatrix e(d, d);
        for (int mp = 0; mp < d; ++mp)
            for (int m = 0; m < d; ++m) e(mp, m) = std::conj(a(n, mp)) * a(n, m);
        povm.push_back(std::move(e));
    }
    return povm;
}

MeasureProbs measure_in_wf_basis(const NetworkLayout& layout, const CVec& state, int r) {
    const int d = layout.d();
    if (static_cast<int>(state.size()) != d)
        throw std::invalid_argument("state vector has wrong dimension");
    const CMatrix a = measurement_amplitudes(layout);
    const CMatrix diag = build_diag(layout.ctx, r);
    MeasureProbs probs;
    probs.outcome.assign(d, 0.0);
    double total = 0.0;
    for (int n = 0; n < d; ++n) {
        Cx amp{};
        for (int m = 0; m < d; ++m) amp += a(n, m) * std::conj(diag(m, m)) * state[m];
        probs.outcome[n] = std::norm(amp);
        total += probs.outcome[n];
    }
    double in_norm = 0.0;
    for (const Cx& c : state) in_norm += std::norm(c);
    probs.no_detection = std::max(0.0, in_norm - total);
    return probs;
}

void validate_disjointness(const NetworkLayout& layout) {
    const int d = layout.d();
    const int n = static_cast<int>(layout.stages.size());
    for (int m = 0; m < d; ++m) {
        std::map<SlotKey, long long> counts;
        counts[{0, m}] = 1;
        for (int s = 0; s < n; ++s) {
            const StageSpec& stage = layout.stages[s];
            std::map<SlotKey, long long> next;
            for (const auto& [key, c] : counts) {
                if (layout.switch_mode == SwitchMode::ActiveSwitch) {
                    const int a = routed_arm(key.slot, stage.delay, stage.arms);
                    for (int w = 0; w < stage.arms; ++w) {
                        const int port =
                            layout.topology == Topology::Tree ? key.port * stage.arms + w : w;
                        next[{port, key.slot + a * stage.delay}] += c;
                    }
                } else {
                    for (int a = 0; a < stage.arms; ++a)
                        for (int w = 0; w < stage.arms; ++w) {
                            const int port =
                                layout.topology == Topology::Tree ? key.port * stage.arms + w : w;
                            next[{port, key.slot + a * stage.delay}] += c;
                        }
                }
            }
            counts = std::move(next);
            if (layout.topology == Topology::TimeDivisionMultiplexed && s + 1 < n) {
                std::map<SlotKey, long long> delayed;
                for (const auto& [key, c] : counts)
                    delayed[{key.port, key.slot + key.port * layout.inter_stage_delays[s]}] += c;
                counts = std::move(delayed);
            }
        }
        for (const DetectionPoint& point : layout.detection_map) {
            const auto it = counts.find({point.port, point.slot});
            if (it != counts.end() && it->second > 1)
                throw std::logic_error(
                    "designated slot mixes two interferometric histories of input slot " +
                    std::to_string(m));
        }
    }
}

double& ConditionalProbs::at(int r_a, int n_a, int r_b, int n_b) {
    return p[((static_cast<size_t>(r_a) * d + n_a) * (d + 1) + r_b) * d + n_b];
}

const double& ConditionalProbs::at(int r_a, int n_a, int r_b, int n_b) const {
    return p[((static_cast<size_t>(r_a) * d + n_a) * (d + 1) + r_b) * d + n_b];
}

ConditionalProbs conditional_probabilities(const FieldCtx& ctx, const NetworkLayout& layout,
                                           const DMatrix& weights) {
    const int d = ctx.order();
    if (weights.rows() != d || weights.cols() != d)
        throw std::invalid_argument("weight matrix must be d x d");

    ConditionalProbs out;
    out.d = d;
    out.p.assign(static_cast<size_t>(d + 1) * d * (d + 1) * d, 0.0);

    // Preparation and analysis both use shift-eigenbasis labels; the layout
    // measures quadratic-form basis r' = basis_perm[r] with outcomes pulled
    // back through the column permutation.
    std::vector<CMatrix> durt;
    durt.reserve(d);
    for (int r = 0; r < d; ++r) durt.push_back(build_durt_basis(ctx, r));
    const EquivalenceMap eq = equivalence_map(ctx);
    std::vector<std::vector<int>> inverse_col(d, std::vector<int>(d));
    for (int r = 0; r < d; ++r)
        for (int j = 0; j < d; ++j) inverse_col[r][eq.state_perm[r][j]] = j;

    std::vector<CMatrix> error_ops;  // adjoint Weyl operators, index j*d + k
    error_ops.reserve(static_cast<size_t>(d) * d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) error_ops.push_back(weyl(ctx, j, k).adjoint());

    const CMatrix response = measurement_amplitudes(layout);
    std::vector<CMatrix> diag;
    diag.reserve(d);
    for (int r = 0; r < d; ++r) diag.push_back(build_diag(ctx, r));

    for (int r_a = 0; r_a <= d; ++r_a)
        for (int n_a = 0; n_a < d; ++n_a) {
            CVec prepared(d);
            if (r_a == 0) {
                prepared[n_a] = 1.0;
            } else {
                prepared = durt[r_a - 1].column(n_a);
            }
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    const double weight = weights(j, k);
                    if (weight == 0.0) continue;
                    const CVec received = error_ops[static_cast<size_t>(j) * d + k] * prepared;
                    for (int r_b = 0; r_b <= d; ++r_b) {
                        if (r_b == 0) {
                            for (int m = 0; m < d; ++m)
                                out.at(r_a, n_a, 0, m) += weight * std::norm(received[m]);
                            continue;
                        }
                        const int rp = eq.basis_perm[r_b - 1];
                        for (int n = 0; n < d; ++n) {
                            Cx amp{};
                            for (int m = 0; m < d; ++m)
                                amp += response(n, m) * std::conj(diag[rp](m, m)) * received[m];
                            out.at(r_a, n_a, r_b, inverse_col[r_b - 1][n]) +=
                                weight * std::norm(amp);
                        }
                    }
                }
            for (int r_b = 0; r_b <= d; ++r_b) {
                double total = 0.0;
                for (int n_b = 0; n_b < d; ++n_b) total += out.at(r_a, n_a, r_b, n_b);
                if (total > 0.0)
                    for (int n_b = 0; n_b < d; ++n_b) out.at(r_a, n_a, r_b, n_b) /= total;
            }
        }
    return out;
}

}  // namespace mubqkd
