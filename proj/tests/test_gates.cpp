// Copyright 2026 The Qubus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "qubus/error.hpp"
#include "qubus/gates.hpp"

using namespace qubus;
using testing_util::haar_vector;

namespace {

PhotonLabel L(int id, const char *path, Pol p) { return {id, path, p}; }

constexpr Pol H = Pol::H;
constexpr Pol V = Pol::V;

HybridState two_photon(const std::vector<Complex> &c, const char *p1 = "1", const char *p2 = "2") {
    return HybridState::polarization({1, 2}, {p1, p2}, c);
}

GateParams enumerating() {
    GateParams p;
    p.keep_outcome_states = true;
    return p;
}

void expect_deterministic(const GateResult &r, const HybridState &expected, double tol = 1e-8) {
    EXPECT_NEAR(r.report.success_probability, 1.0, 1e-9) << r.report.gate;
    EXPECT_GE(r.report.min_fidelity, 1.0 - tol) << r.report.gate;
    EXPECT_GE(fidelity(r.state, expected), 1.0 - tol) << r.report.gate;
    for (const auto &o : r.outcome_states) {
        if (o.stage != r.outcome_states.back().stage) continue;
        EXPECT_GE(fidelity(o.state, expected), 1.0 - tol) << o.stage << " " << o.label;
    }
}

HybridState eq8(const std::vector<Complex> &c) {
    return HybridState::from_terms({{c[0], {L(1, "1", H), L(2, "3", H)}},
                                    {c[3], {L(1, "1", V), L(2, "3", V)}},
                                    {c[1], {L(1, "1", H), L(2, "2", V)}},
                                    {c[2], {L(1, "1", V), L(2, "2", H)}}});
}

HybridState eq13(const std::vector<Complex> &c, const char *h = "2", const char *v = "3") {
    return HybridState::from_terms({{c[0], {L(1, "1", H), L(2, h, H)}},
                                    {c[1], {L(1, "1", H), L(2, h, V)}},
                                    {c[2], {L(1, "1", V), L(2, v, H)}},
                                    {c[3], {L(1, "1", V), L(2, v, V)}}});
}

HybridState plus(int id, const char *path) {
    const double h = std::sqrt(0.5);
    return HybridState::photon(id, path, h, h);
}

}  // namespace

TEST(CouplingTables, ParityMatchesTableOne) {
    auto s = two_photon({1, 0, 0, 0});
    auto plan = parity_plan(s, 1, 2, "3");
    std::vector<Coupling> expected = {
        {0, {1, "1", H}}, {0, {2, "2", H}}, {0, {2, "3", V}},
        {1, {1, "1", V}}, {1, {2, "2", V}}, {1, {2, "3", H}},
    };
    EXPECT_EQ(plan.couplings, expected);
}

TEST(CouplingTables, CPathMatchesTableTwo) {
    auto s = two_photon({1, 0, 0, 0}, "C", "1");
    auto plan = c_path_plan(s, 1, 2, "2");
    std::vector<Coupling> expected = {
        {0, {1, "C", V}}, {0, {2, "1", std::nullopt}}, {1, {1, "C", H}}, {1, {2, "2", std::nullopt}}};
    EXPECT_EQ(plan.couplings, expected);
}

TEST(CouplingTables, CPath2MatchesTableThree) {
    auto s = tensor(HybridState::photon(1, "D", 1, 0),
                    HybridState::from_terms({{1, {L(2, "3", H)}}, {1, {L(2, "4", V)}}}));
    // the kept member of each pair keeps its name: 3 and 4 play the roles of 5 and 7
    auto plan = c_path2_plan(s, 1, 2, {"3", "4"}, {"6", "8"});
    std::vector<Coupling> expected = {{0, {1, "D", V}},
                                      {0, {2, "3", std::nullopt}},
                                      {0, {2, "4", std::nullopt}},
                                      {1, {1, "D", H}},
                                      {1, {2, "6", std::nullopt}},
                                      {1, {2, "8", std::nullopt}}};
    EXPECT_EQ(plan.couplings, expected);
}

TEST(CouplingTables, EntanglerOneMatchesTableFour) {
    auto s = tensor(HybridState::from_terms({{1, {L(2, "2", H)}}, {1, {L(2, "3", V)}}}), plus(4, "4"));
    auto plan = entangler_polarization_plan(s, 4, 2, {"2", "3"});
    std::vector<Coupling> expected = {{0, {4, "4", H}}, {0, {2, "2", V}}, {0, {2, "3", V}},
                                      {1, {4, "4", V}}, {1, {2, "2", H}}, {1, {2, "3", H}}};
    EXPECT_EQ(plan.couplings, expected);
}

TEST(CouplingTables, CPath3MatchesTableFive) {
    auto c2 = HybridState::from_terms({{1, {L(2, "2", H)}}, {1, {L(2, "3", V)}}});
    auto s = tensor(tensor(HybridState::photon(1, "1", 1, 0), c2), HybridState::photon(3, "4", 1, 0));
    CPath3Spec spec{2, "2", "3", 3, "5", CPath3Layout::Standard, {}, "2'"};
    auto plan = c_path3_plan(s, spec);
    std::vector<Coupling> expected = {{0, {2, "3", V}}, {0, {3, "4", std::nullopt}}, {1, {2, "2", H}},
                                      {1, {2, "2'", H}}, {1, {2, "3", H}}, {1, {3, "5", std::nullopt}}};
    EXPECT_EQ(plan.couplings, expected);

    spec.layout = CPath3Layout::SharedMode;
    spec.shared = {{1, "1", H}};
    auto shared = c_path3_plan(s, spec);
    EXPECT_EQ(shared.couplings.size() + 1, plan.couplings.size());
    EXPECT_EQ(shared.couplings[2], (Coupling{1, {1, "1", H}}));
}

TEST(CouplingTables, EntanglerFourOnTwoPathsIsEntanglerOne) {
    auto s = tensor(HybridState::from_terms({{1, {L(2, "2", H)}}, {1, {L(2, "3", V)}}}), plus(4, "4"));
    EntanglerArgs a{4, 2, {"2", "3"}, {}, {}};
    auto r1 = entangler(s, 1, a, GateParams{});
    auto r4 = entangler(s, 4, a, GateParams{});
    EXPECT_NEAR(fidelity(r1.state, r4.state), 1.0, 1e-12);
    EXPECT_EQ(r1.report.resources.xpm_couplings, r4.report.resources.xpm_couplings);
}

TEST(ParityGate, BasisExamples) {
    auto r = parity_gate(two_photon({1, 0, 0, 0}), 1, 2, enumerating(), "3");
    expect_deterministic(r, HybridState::from_terms({{1, {L(1, "1", H), L(2, "3", H)}}}));
    r = parity_gate(two_photon({0, 1, 0, 0}), 1, 2, enumerating(), "3");
    expect_deterministic(r, HybridState::from_terms({{1, {L(1, "1", H), L(2, "2", V)}}}));
    EXPECT_EQ(r.report.paths["even"], (std::vector<std::string>{"1", "3"}));
}

TEST(ParityGate, HaarInputsAreDeterministic) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto c = haar_vector(4, seed);
        auto r = parity_gate(two_photon(c), 1, 2, enumerating(), "3");
        expect_deterministic(r, eq8(c));
        EXPECT_GT(r.outcome_states.size(), 10u);
        EXPECT_EQ(r.report.resources.xpm_couplings, 6);
        EXPECT_EQ(r.report.resources.qubus_modes, 2);
    }
}

TEST(ParityGate, MultiPathPhotonRejected) {
    auto s = tensor(HybridState::photon(1, "1", 1, 0),
                    HybridState::from_terms({{1, {L(2, "2", H)}}, {1, {L(2, "5", H)}}}));
    try {
        parity_gate(s, 1, 2, GateParams{});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::Validation);
    }
}

TEST(ParityGate, FidelityGrowsWithBeta) {
    auto c = haar_vector(4, 42);
    double last = 0.0;
    for (double b2 : {0.5, 2.0, 8.0, 20.0}) {
        auto p = GateParams::for_beta2(b2);
        p.keep_outcome_states = true;
        auto r = parity_gate(two_photon(c), 1, 2, p, "3");
        double avg = 0.0;
        for (const auto &o : r.outcome_states) avg += o.probability * fidelity(o.state, eq8(c));
        EXPECT_GT(avg, last) << b2;
        last = avg;
        if (b2 == 2.0) EXPECT_LT(avg, 0.99);
    }
    EXPECT_GT(last, 1.0 - 1e-8);
}

TEST(ParityGate, SamplePolicyIsReproducible) {
    auto c = haar_vector(4, 3);
    GateParams p;
    p.policy = OutcomePolicy::Sample;
    p.seed = 9;
    auto a = parity_gate(two_photon(c), 1, 2, p, "3");
    GateParams q = p;
    q = GateParams{};
    q.policy = OutcomePolicy::Sample;
    q.seed = 9;
    auto b = parity_gate(two_photon(c), 1, 2, q, "3");
    ASSERT_EQ(a.report.outcome_log.size(), 1u);
    EXPECT_EQ(a.report.outcome_log[0].value, b.report.outcome_log[0].value);
    EXPECT_GE(fidelity(a.state, eq8(c)), 1.0 - 1e-8);
}

TEST(ParityGate, BinnedReadoutStaysClose) {
    auto c = haar_vector(4, 5);
    GateParams p;
    p.qnd_mode = QndMode::Binned;
    p.gamma = 200.0;
    auto r = parity_gate(two_photon(c), 1, 2, p, "3");
    EXPECT_GE(fidelity(r.state, eq8(c)), 1.0 - 1e-6);
}

TEST(CPath, BasisExamples) {
    auto r = c_path(two_photon({0, 0, 1, 0}), 1, 2, enumerating(), "3");
    expect_deterministic(r, HybridState::from_terms({{1, {L(1, "1", V), L(2, "3", H)}}}));
    for (auto c : std::vector<std::vector<Complex>>{{1, 0, 0, 0}, {0, 1, 0, 0}}) {
        r = c_path(two_photon(c), 1, 2, enumerating(), "3");
        EXPECT_EQ(r.state.occupied_paths(2), std::vector<PathId>{intern_path("2")});
    }
}

TEST(CPath, HaarInputsFollowPolarizationOfControl) {
    for (std::uint64_t seed = 11; seed <= 20; ++seed) {
        auto c = haar_vector(4, seed);
        auto r = c_path(two_photon(c), 1, 2, enumerating(), "3");
        expect_deterministic(r, eq13(c));
        EXPECT_EQ(r.report.resources.xpm_couplings, 4);
        EXPECT_EQ(r.report.resources.cpath_family, 1);
    }
}

TEST(CPath, RoutesHalfOfBellPair) {
    const double h = std::sqrt(0.5);
    auto bell = HybridState::from_terms({{h, {L(2, "1", H), L(3, "b", H)}}, {h, {L(2, "1", V), L(3, "b", V)}}});
    auto s = tensor(plus(1, "c"), bell);
    auto r = c_path(s, 1, 2, enumerating(), "2");
    auto sigma = HybridState::from_terms({{0.5, {L(1, "c", H), L(2, "1", H), L(3, "b", H)}},
                                          {0.5, {L(1, "c", H), L(2, "1", V), L(3, "b", V)}},
                                          {0.5, {L(1, "c", V), L(2, "2", H), L(3, "b", H)}},
                                          {0.5, {L(1, "c", V), L(2, "2", V), L(3, "b", V)}}});
    expect_deterministic(r, sigma);
}

TEST(CPath2, DoublesThePaths) {
    auto c = haar_vector(8, 21);
    auto s = HybridState::polarization({1, 2, 3}, {"1", "2", "3"}, c);
    auto r1 = c_path(s, 2, 3, enumerating(), "3v");
    auto r2 = c_path2(r1.state, 1, 3, {"3", "3v"}, enumerating(), {"3x", "3vx"});
    std::vector<Term> terms;
    const char *rails[] = {"3", "3v", "3x", "3vx"};
    for (int k = 0; k < 8; ++k) {
        int b1 = k >> 2 & 1, b2 = k >> 1 & 1, b3 = k & 1;
        std::string path = rails[b1 * 2 + b2];
        terms.push_back({c[k], {{1, "1", b1 ? V : H}, {2, "2", b2 ? V : H}, {3, path, b3 ? V : H}}});
    }
    expect_deterministic(r2, HybridState::from_terms(terms));
    EXPECT_EQ(r2.report.resources.xpm_couplings, 6);
}

TEST(CPath2, SinglePairMatchesCPath) {
    auto c = haar_vector(4, 22);
    auto a = c_path(two_photon(c), 1, 2, GateParams{}, "3");
    auto b = c_path2(two_photon(c), 1, 2, {"2"}, GateParams{}, {"3"});
    EXPECT_NEAR(fidelity(a.state, b.state), 1.0, 1e-12);
}

namespace {

HybridState toffoli_front(const std::vector<Complex> &c) {
    auto s = HybridState::polarization({1, 2, 3}, {"1", "2", "4"}, c);
    return c_path(s, 1, 2, GateParams{}, "3").state;
}

}  // namespace

TEST(CPath3, InteractionAmplitudesFollowTableFive) {
    GateParams p;
    const Complex a = p.alpha;
    const Complex up = std::polar(p.alpha, p.theta), down = std::polar(p.alpha, -p.theta);
    for (int k = 0; k < 8; ++k) {
        std::vector<Complex> c(8, 0.0);
        c[k] = 1.0;
        auto s = toffoli_front(c);
        CPath3Spec spec{2, "2", "3", 3, "5", CPath3Layout::Standard, {}, "2'"};
        int m0 = 0, m1 = 0;
        auto t = xpm_interaction(s, c_path3_plan(s, spec), p, &m0, &m1);
        auto i0 = t.registry().qubus_index(m0), i1 = t.registry().qubus_index(m1);
        for (const auto &b : t.branches()) {
            bool vv = t.slot(b, 2).path == intern_path("3") && t.slot(b, 2).pol == V;
            bool on4 = t.slot(b, 3).path == intern_path("4");
            Complex e0 = vv ? (on4 ? up : a) : (on4 ? a : down);
            Complex e1 = vv ? (on4 ? down : a) : (on4 ? a : up);
            EXPECT_LT(std::abs(b.qubus[i0] - e0), 1e-9) << k;
            EXPECT_LT(std::abs(b.qubus[i1] - e1), 1e-9) << k;
        }
    }
}

TEST(CPath3, TargetTakesPathFiveOnlyForVV) {
    for (auto layout : {CPath3Layout::Standard, CPath3Layout::SharedMode}) {
        auto c = haar_vector(8, 31);
        auto s = toffoli_front(c);
        CPath3Spec spec{2, "2", "3", 3, "5", layout, {}, "2'"};
        if (layout == CPath3Layout::SharedMode) spec.shared = {{1, "1", H}};
        auto r = c_path3(s, spec, enumerating());
        std::vector<Term> terms;
        for (int k = 0; k < 8; ++k) {
            bool v1 = k & 4, v2 = k & 2, v3 = k & 1;
            terms.push_back({c[k], {{1, "1", v1 ? V : H}, {2, v1 ? "3" : "2", v2 ? V : H}, {3, v1 && v2 ? "5" : "4", v3 ? V : H}}});
        }
        expect_deterministic(r, HybridState::from_terms(terms));
        EXPECT_EQ(r.report.resources.xpm_couplings, layout == CPath3Layout::Standard ? 6 : 5);
    }
}

TEST(CPath3, WrongRailsRejected) {
    auto s = HybridState::polarization({1, 2, 3}, {"1", "2", "4"}, std::vector<Complex>(8, 0.5 / std::sqrt(2.0)));
    s = c_path(s, 1, 2, GateParams{}, "3").state;
    CPath3Spec spec{2, "2", "9", 3, "5", CPath3Layout::Standard, {}, "2'"};
    EXPECT_THROW(c_path3(s, spec, GateParams{}), Error);
}

TEST(Disentangler, MovesCoefficientsToTarget) {
    for (std::uint64_t seed = 41; seed <= 45; ++seed) {
        auto c = haar_vector(4, seed);
        auto r = c_path(two_photon(c), 1, 2, GateParams{}, "3");
        auto d = disentangler(r.state, 1, 2, {"3"}, enumerating());
        auto expected = tensor(plus(1, "1"), HybridState::from_terms({{c[0], {L(2, "2", H)}},
                                                                       {c[1], {L(2, "2", V)}},
                                                                       {c[2], {L(2, "3", H)}},
                                                                       {c[3], {L(2, "3", V)}}}));
        expect_deterministic(d, expected);
        EXPECT_EQ(d.outcome_states.size(), 2u);
        EXPECT_EQ(d.report.resources.detections, 2);
    }
}

TEST(Disentangler, PlusControlIsIdentity) {
    auto s = tensor(plus(1, "1"), HybridState::photon(2, "2", 0.6, 0.8));
    auto d = disentangler(s, 1, 2, {}, enumerating());
    expect_deterministic(d, s);
}

TEST(Entangler, VariantOneCopiesPolarization) {
    auto c = haar_vector(4, 51);
    auto s = tensor(eq13(c, "2", "3"), plus(4, "4"));
    auto r = entangler(s, 1, {4, 2, {"2", "3"}, {}, {}}, enumerating());
    auto expected = HybridState::from_terms({{c[0], {L(1, "1", H), L(2, "2", H), L(4, "4", H)}},
                                             {c[1], {L(1, "1", H), L(2, "2", V), L(4, "4", V)}},
                                             {c[2], {L(1, "1", V), L(2, "3", H), L(4, "4", H)}},
                                             {c[3], {L(1, "1", V), L(2, "3", V), L(4, "4", V)}}});
    expect_deterministic(r, expected);
}

TEST(Entangler, VariantTwoCorrelatesCompanionWithPath) {
    auto c = haar_vector(4, 52);
    auto q = HybridState::from_terms(
        {{c[0], {L(2, "1'", H)}}, {c[1], {L(2, "1'", V)}}, {c[2], {L(2, "2'", H)}}, {c[3], {L(2, "2'", V)}}});
    auto s = tensor(plus(1, "1"), q);
    auto r = entangler(s, 2, {1, 2, {}, {"1'"}, {"2'"}}, enumerating());
    auto expected = HybridState::from_terms({{c[0], {L(1, "1", H), L(2, "1'", H)}},
                                             {c[1], {L(1, "1", H), L(2, "1'", V)}},
                                             {c[2], {L(1, "1", V), L(2, "2'", H)}},
                                             {c[3], {L(1, "1", V), L(2, "2'", V)}}});
    expect_deterministic(r, expected);
}

TEST(Entangler, RejectsBadInputs) {
    auto s = tensor(eq13({1, 0, 0, 0}), HybridState::photon(4, "4", 1, 0));
    EXPECT_THROW(entangler(s, 1, {4, 2, {"2", "3"}, {}, {}}, GateParams{}), Error);
    auto t = tensor(eq13({1, 0, 0, 0}), plus(4, "4"));
    EXPECT_THROW(entangler(t, 1, {4, 2, {"2"}, {}, {}}, GateParams{}), Error);
    EXPECT_THROW(entangler(t, 5, {4, 2, {"2", "3"}, {}, {}}, GateParams{}), Error);
}

TEST(Merging, InvertsCPath) {
    for (std::uint64_t seed = 61; seed <= 70; ++seed) {
        auto c = haar_vector(4, seed);
        auto r = c_path(two_photon(c), 1, 2, GateParams{}, "3");
        auto s = tensor(r.state, plus(4, "4"));
        auto m = merging(s, 2, "2", "3", 4, {1, "1", false}, enumerating());
        auto expected = tensor(HybridState::polarization({1, 4}, {"1", "4"}, c), plus(2, "2"));
        expect_deterministic(m, expected);
        ASSERT_EQ(m.report.outcomes.size() - 0, m.report.outcomes.size());
    }
}

TEST(Merging, FourOutcomesEquallyLikely) {
    auto c = haar_vector(4, 71);
    auto s = tensor(eq13(c), plus(4, "4"));
    auto m = merging(s, 2, "2", "3", 4, {1, "1", false}, enumerating());
    int presence = 0;
    for (const auto &o : m.report.outcomes) {
        if (o.stage != "merging") continue;
        ++presence;
        EXPECT_NEAR(o.probability, 0.25, 1e-12);
    }
    EXPECT_EQ(presence, 4);
    EXPECT_EQ(m.report.resources.mergings, 1);
    EXPECT_EQ(m.report.resources.detections, 5);
}

TEST(Merging, BasisExample) {
    auto s = tensor(eq13({0, 1, 0, 0}), plus(4, "4"));
    auto m = merging(s, 2, "2", "3", 4, {1, "1", false}, enumerating());
    expect_deterministic(m, tensor(HybridState::from_terms({{1, {L(1, "1", H), L(4, "4", V)}}}), plus(2, "2")));
}

TEST(Merging, AncillaMustBePlus) {
    auto s = tensor(eq13({0, 1, 0, 0}), HybridState::photon(4, "4", std::sqrt(0.5), -std::sqrt(0.5)));
    EXPECT_THROW(merging(s, 2, "2", "3", 4, {1, "1", false}, GateParams{}), Error);
}

TEST(MergingN, FeedForwardTables) {
    auto table = merging_feed_forward_table(hadamard_interference4(), 9, {{1, "", false}, {2, "", false}});
    for (const auto &ops : table)
        for (const auto &o : ops) EXPECT_EQ(o.kind, ElementKind::WavePlateZ);
    auto qft = merging_feed_forward_table(qft_matrix(4), 9, {{1, "", false}, {2, "", false}});
    bool any_phase = false;
    for (const auto &ops : qft)
        for (const auto &o : ops) any_phase |= o.kind == ElementKind::PolPhase;
    EXPECT_TRUE(any_phase);
    Eigen::MatrixXcd bad = random_haar_unitary(4, 3);
    EXPECT_THROW(merging_feed_forward_table(bad, 9, {{1, "", false}, {2, "", false}}), Error);
}

TEST(MergingN, ReducesToMergingForTwoPaths) {
    auto c = haar_vector(4, 81);
    auto s = tensor(eq13(c), plus(4, "4"));
    auto a = merging(s, 2, "2", "3", 4, {1, "1", false}, GateParams{});
    auto b = merging_n(s, 2, {"2", "3"}, 4, {{1, "1", false}}, GateParams{});
    EXPECT_NEAR(fidelity(a.state, b.state), 1.0, 1e-12);
}

TEST(MergingN, FourPathsWithBothInterferences) {
    auto c = haar_vector(8, 82);
    std::vector<Term> terms;
    const char *rails[] = {"a", "b", "c", "d"};
    for (int k = 0; k < 8; ++k) {
        int b1 = k >> 2 & 1, b2 = k >> 1 & 1, b3 = k & 1;
        terms.push_back({c[k], {{1, "1", b1 ? V : H}, {2, "2", b2 ? V : H}, {3, rails[b1 * 2 + b2], b3 ? V : H}}});
    }
    auto s = tensor(HybridState::from_terms(terms), plus(4, "4"));
    auto expected = tensor(HybridState::polarization({1, 2, 4}, {"1", "2", "4"}, c), plus(3, "a"));
    for (auto w : {qft_matrix(4), hadamard_interference4()}) {
        auto m = merging_n(s, 3, {"a", "b", "c", "d"}, 4, {{1, "1", false}, {2, "2", false}}, enumerating(), w);
        expect_deterministic(m, expected);
        EXPECT_EQ(m.report.resources.lomis, 1);
        EXPECT_EQ(m.report.resources.detections, 9);
    }
    EXPECT_THROW(merging_n(s, 3, {"a", "b", "c"}, 4, {{1, "1", false}}, GateParams{}), Error);
}
