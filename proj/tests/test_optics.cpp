#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mubqkd/optics.hpp"

using namespace mubqkd;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Cx amp_at(const TemporalState& s, int port, long long slot) {
    const auto it = s.amp.find({port, slot});
    return it == s.amp.end() ? Cx{} : it->second;
}

double designated_probability(const NetworkLayout& layout, const TemporalState& out) {
    double p = 0.0;
    for (const DetectionPoint& point : layout.detection_map)
        p += std::norm(amp_at(out, point.port, point.slot));
    return p;
}

}  // namespace

TEST_CASE("encode examples") {
    const FieldCtx ctx(2, 2);
    const TemporalState z2 = encode_state(ctx, std::nullopt, 2);
    CHECK(z2.amp.size() == 1);
    CHECK(std::abs(amp_at(z2, 0, 2) - Cx{1, 0}) <= 1e-15);

    const TemporalState p00 = encode_state(ctx, 0, 0);
    for (int m = 0; m < 4; ++m) CHECK(std::abs(amp_at(p00, 0, m) - Cx{0.5, 0}) <= 1e-15);

    const TemporalState p10 = encode_state(ctx, 1, 0);
    CHECK(std::abs(amp_at(p10, 0, 1) - Cx{0, 0.5}) <= 1e-15);
    CHECK(std::abs(amp_at(p10, 0, 3) - Cx{-0.5, 0}) <= 1e-15);
    CHECK(std::abs(p10.total_probability() - 1.0) <= 1e-12);
}

TEST_CASE("phase modulator examples") {
    const FieldCtx ctx(2, 2);
    const TemporalState z1 = encode_state(ctx, std::nullopt, 1);
    const TemporalState same = apply_phase_mod(ctx, z1, 0);
    CHECK(std::abs(amp_at(same, 0, 1) - Cx{1, 0}) <= 1e-15);
    const TemporalState rotated = apply_phase_mod(ctx, z1, 1);
    CHECK(std::abs(amp_at(rotated, 0, 1) - Cx{0, -1}) <= 1e-15);
}

TEST_CASE("single passive stage on a unit pulse") {
    TemporalState in;
    in.amp[{0, 0}] = 1.0;
    const TemporalState out = delay_interferometer_stage(in, 1, 2, SwitchMode::Passive);
    CHECK(out.amp.size() == 4);
    CHECK(std::abs(amp_at(out, 0, 0) - Cx{0.5, 0}) <= 1e-15);
    CHECK(std::abs(amp_at(out, 0, 1) - Cx{0.5, 0}) <= 1e-15);
    CHECK(std::abs(amp_at(out, 1, 0) - Cx{0.5, 0}) <= 1e-15);
    CHECK(std::abs(amp_at(out, 1, 1) - Cx{-0.5, 0}) <= 1e-15);
    CHECK(std::abs(out.total_probability() - 1.0) <= 1e-12);  // splitters are unitary
}

TEST_CASE("single stage on the uniform two-slot state") {
    TemporalState in;
    in.amp[{0, 0}] = kInvSqrt2;
    in.amp[{0, 1}] = kInvSqrt2;

    const TemporalState passive = delay_interferometer_stage(in, 1, 2, SwitchMode::Passive);
    CHECK(std::abs(amp_at(passive, 0, 1) - Cx{kInvSqrt2, 0}) <= 1e-12);
    CHECK(std::abs(amp_at(passive, 1, 1)) <= 1e-15);

    const TemporalState active = delay_interferometer_stage(in, 1, 2, SwitchMode::ActiveSwitch);
    CHECK(std::abs(amp_at(active, 0, 1) - Cx{1, 0}) <= 1e-12);
    CHECK(std::abs(amp_at(active, 1, 1)) <= 1e-15);
    CHECK(std::abs(active.total_probability() - 1.0) <= 1e-12);
}

TEST_CASE("layout geometry") {
    const FieldCtx gf4(2, 2);
    const NetworkLayout tdm = build_layout(gf4, Topology::TimeDivisionMultiplexed, SwitchMode::Passive);
    CHECK(tdm.stages.size() == 2);
    CHECK(tdm.stages[0].delay == 2);
    CHECK(tdm.stages[1].delay == 1);
    CHECK(tdm.device_count == 2);
    CHECK(tdm.loss_factor == 0.25);

    const NetworkLayout tree = build_layout(gf4, Topology::Tree, SwitchMode::Passive);
    CHECK(tree.device_count == 3);

    const FieldCtx gf8(2, 3);
    CHECK(build_layout(gf8, Topology::Tree, SwitchMode::Passive).device_count == 7);
    CHECK(build_layout(gf8, Topology::TimeDivisionMultiplexed, SwitchMode::Passive).device_count == 3);

    const FieldCtx gf9(3, 2);
    CHECK(build_layout(gf9, Topology::Tree, SwitchMode::Passive).device_count == 4);

    // all designated points distinct
    for (const Topology topo : {Topology::Tree, Topology::TimeDivisionMultiplexed}) {
        const NetworkLayout layout = build_layout(gf4, topo, SwitchMode::Passive);
        for (size_t i = 0; i < layout.detection_map.size(); ++i)
            for (size_t j = i + 1; j < layout.detection_map.size(); ++j)
                CHECK((layout.detection_map[i].port != layout.detection_map[j].port ||
                       layout.detection_map[i].slot != layout.detection_map[j].slot));
    }
}

TEST_CASE("propagation of phase-0 states through the passive TDM cascade") {
    const FieldCtx ctx(2, 2);
    const NetworkLayout layout =
        build_layout(ctx, Topology::TimeDivisionMultiplexed, SwitchMode::Passive);
    for (int n = 0; n < 4; ++n) {
        const TemporalState out =
            propagate(layout, apply_phase_mod(ctx, encode_state(ctx, 0, n), 0));
        for (int m = 0; m < 4; ++m) {
            const double prob =
                std::norm(amp_at(out, layout.detection_map[m].port, layout.detection_map[m].slot));
            if (m == n)
                CHECK(std::abs(prob - 0.25) <= 1e-12);
            else
                CHECK(prob <= 1e-24);
        }
        CHECK(std::abs(out.total_probability() - 1.0) <= 1e-12);
    }
}

TEST_CASE("active switching removes the passive loss") {
    const FieldCtx ctx(2, 2);
    const NetworkLayout layout =
        build_layout(ctx, Topology::TimeDivisionMultiplexed, SwitchMode::ActiveSwitch);
    for (int n = 0; n < 4; ++n) {
        const TemporalState out =
            propagate(layout, apply_phase_mod(ctx, encode_state(ctx, 0, n), 0));
        const double prob =
            std::norm(amp_at(out, layout.detection_map[n].port, layout.detection_map[n].slot));
        CHECK(std::abs(prob - 1.0) <= 1e-12);
        CHECK(std::abs(out.total_probability() - 1.0) <= 1e-12);
    }
}

TEST_CASE("computational states spread uniformly over designated slots") {
    const FieldCtx ctx(2, 2);
    const NetworkLayout layout =
        build_layout(ctx, Topology::TimeDivisionMultiplexed, SwitchMode::Passive);
    for (int m = 0; m < 4; ++m) {
        const TemporalState out = propagate(layout, encode_state(ctx, std::nullopt, m));
        for (const DetectionPoint& point : layout.detection_map)
            CHECK(std::abs(std::norm(amp_at(out, point.port, point.slot)) - 1.0 / 16) <= 1e-12);
    }
}

TEST_CASE("passive loss is exactly p^-N of the designated probability") {
    for (const auto& [p, n] : {std::pair{2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}}) {
        const FieldCtx ctx(p, n);
        const double expected = 1.0 / ctx.order();
        for (const Topology topo : {Topology::Tree, Topology::TimeDivisionMultiplexed}) {
            const NetworkLayout layout = build_layout(ctx, topo, SwitchMode::Passive);
            const TemporalState out = propagate(layout, encode_state(ctx, 0, 0));
            REQUIRE(std::abs(designated_probability(layout, out) - expected) <= 1e-12);
            REQUIRE(std::abs(out.total_probability() - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("POVM of the passive layouts is the scaled phase-0 projector set") {
    for (const auto& [p, n] : {std::pair{2, 1}, {2, 2}, {3, 1}, {3, 2}}) {
        const FieldCtx ctx(p, n);
        const int d = ctx.order();
        const CMatrix b0 = build_wf_basis(ctx, 0);
        for (const Topology topo : {Topology::Tree, Topology::TimeDivisionMultiplexed}) {
            const NetworkLayout layout = build_layout(ctx, topo, SwitchMode::Passive);
            const std::vector<CMatrix> povm = extract_povm(layout);
            REQUIRE(povm.size() == static_cast<size_t>(d));
            for (int outcome = 0; outcome < d; ++outcome) {
                CMatrix expected(d, d);
                for (int mp = 0; mp < d; ++mp)
                    for (int m = 0; m < d; ++m)
                        expected(mp, m) =
                            b0(mp, outcome) * std::conj(b0(m, outcome)) / static_cast<double>(d);
                REQUIRE(max_abs_diff(povm[outcome], expected) <= 1e-10);
            }
        }
    }
}

TEST_CASE("POVM of the active layouts resolves the identity") {
    for (const auto& [p, n] : {std::pair{2, 2}, {2, 3}, {3, 2}}) {
        const FieldCtx ctx(p, n);
        const int d = ctx.order();
        for (const Topology topo : {Topology::Tree, Topology::TimeDivisionMultiplexed}) {
            const NetworkLayout layout = build_layout(ctx, topo, SwitchMode::ActiveSwitch);
            const std::vector<CMatrix> povm = extract_povm(layout);
            CMatrix sum(d, d);
            for (const CMatrix& e : povm)
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) sum(i, j) += e(i, j);
            REQUIRE(max_abs_diff(sum, CMatrix::identity(d)) <= 1e-10);
        }
    }
}

TEST_CASE("tree and TDM layouts realize the same POVM") {
    for (const auto& [p, n] : {std::pair{2, 2}, {3, 2}}) {
        const FieldCtx ctx(p, n);
        const std::vector<CMatrix> tree =
            extract_povm(build_layout(ctx, Topology::Tree, SwitchMode::Passive));
        const std::vector<CMatrix> tdm = extract_povm(
            build_layout(ctx, Topology::TimeDivisionMultiplexed, SwitchMode::Passive));
        for (size_t i = 0; i < tree.size(); ++i)
            REQUIRE(max_abs_diff(tree[i], tdm[i]) <= 1e-10);
    }
}

TEST_CASE("branch disjointness holds for every supported layout") {
    for (const auto& [p, n] :
         {std::pair{2, 1}, {2, 2}, {2, 3}, {2, 4}, {3, 1}, {3, 2}, {3, 3}, {5, 1}, {7, 1}}) {
        const FieldCtx ctx(p, n);
        for (const Topology topo : {Topology::Tree, Topology::TimeDivisionMultiplexed})
            for (const SwitchMode mode : {SwitchMode::Passive, SwitchMode::ActiveSwitch})
                CHECK_NOTHROW(validate_disjointness(build_layout(ctx, topo, mode)));
    }
}

TEST_CASE("full pipeline measures the selected basis") {
    const FieldCtx ctx(2, 2);
    const NetworkLayout layout =
        build_layout(ctx, Topology::TimeDivisionMultiplexed, SwitchMode::Passive);
    for (int r = 0; r < 4; ++r)
        for (int k = 0; k < 4; ++k) {
            const TemporalState out =
                propagate(layout, apply_phase_mod(ctx, encode_state(ctx, r, k), r));
            for (int m = 0; m < 4; ++m) {
                const double prob = std::norm(
                    amp_at(out, layout.detection_map[m].port, layout.detection_map[m].slot));
                if (m == k)
                    REQUIRE(std::abs(prob - layout.loss_factor) <= 1e-12);
                else
                    REQUIRE(prob <= 1e-24);
            }
        }
}

TEST_CASE("propagate rejects states outside the input window") {
    const FieldCtx ctx(2, 2);
    const NetworkLayout layout =
        build_layout(ctx, Topology::TimeDivisionMultiplexed, SwitchMode::Passive);
    TemporalState bad;
    bad.amp[{0, 7}] = 1.0;
    CHECK_THROWS_AS(propagate(layout, bad), std::invalid_argument);
    TemporalState bad_port;
    bad_port.amp[{1, 0}] = 1.0;
    CHECK_THROWS_AS(propagate(layout, bad_port), std::invalid_argument);
}

TEST_CASE("conditional probabilities under the identity channel") {
    const FieldCtx ctx(2, 2);
    const NetworkLayout layout =
        build_layout(ctx, Topology::TimeDivisionMultiplexed, SwitchMode::Passive);
    DMatrix identity_weights(4, 4);
    identity_weights(0, 0) = 1.0;
    const ConditionalProbs probs = conditional_probabilities(ctx, layout, identity_weights);
    for (int r_a = 0; r_a <= 4; ++r_a)
        for (int n_a = 0; n_a < 4; ++n_a)
            for (int r_b = 0; r_b <= 4; ++r_b)
                for (int n_b = 0; n_b < 4; ++n_b) {
                    const double expected =
                        r_a == r_b ? (n_a == n_b ? 1.0 : 0.0) : 0.25;
                    REQUIRE(std::abs(probs.at(r_a, n_a, r_b, n_b) - expected) <= 1e-10);
                }
}

TEST_CASE("conditional probabilities under depolarizing noise") {
    const FieldCtx ctx(2, 2);
    const NetworkLayout layout =
        build_layout(ctx, Topology::TimeDivisionMultiplexed, SwitchMode::Passive);
    const double e = 0.05;           // matched-basis symbol error
    const double s = e * 4.0 / 3.0;  // mixture strength
    DMatrix w(4, 4);
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) w(j, k) = s / 16.0;
    w(0, 0) = 1.0 - s * 15.0 / 16.0;
    const ConditionalProbs probs = conditional_probabilities(ctx, layout, w);
    for (int r = 0; r <= 4; ++r)
        for (int n_a = 0; n_a < 4; ++n_a)
            for (int n_b = 0; n_b < 4; ++n_b) {
                const double expected = n_a == n_b ? 1.0 - e : e / 3.0;
                REQUIRE(std::abs(probs.at(r, n_a, r, n_b) - expected) <= 1e-10);
            }
}
