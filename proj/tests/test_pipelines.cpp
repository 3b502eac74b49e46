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

#include "helpers.hpp"
#include "qubus/error.hpp"
#include "qubus/pipelines.hpp"

using namespace qubus;
using oracle::CVec;
using testing_util::haar_vector;
using testing_util::product_state;

namespace {

double overlap(const std::vector<Complex> &a, const std::vector<Complex> &b) {
    EXPECT_EQ(a.size(), b.size());
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return std::norm(s);
}

CVec dense_apply(const Eigen::MatrixXcd &u, const CVec &v) { return oracle::matvec(u, v); }

HybridState basis(const std::string &bits) {
    std::vector<int> ids;
    std::vector<std::string> paths;
    std::vector<Complex> c(std::size_t{1} << bits.size(), 0.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        ids.push_back(static_cast<int>(i) + 1);
        paths.push_back(std::to_string(i + 1));
        k = (k << 1) | (bits[i] == 'V');
    }
    c[k] = 1.0;
    return HybridState::polarization(ids, paths, c);
}

void expect_clean(const GateReport &r) {
    EXPECT_NEAR(r.success_probability, 1.0, 1e-9) << r.gate;
    EXPECT_GE(r.min_fidelity, 1.0 - 1e-8) << r.gate;
}

}  // namespace

TEST(ToQudit, TwoPhotons) {
    auto c = haar_vector(4, 101);
    auto s = HybridState::polarization({1, 2}, {"1", "2"}, c);
    auto r = to_qudit_circuit(s, {1, 2}, GateParams{});
    expect_clean(r.report);
    auto q = qudit_amplitudes(r.state, 2, r.report.paths["qudit"]);
    EXPECT_LT(oracle::max_diff(oracle::fix_phase(q), oracle::fix_phase(c)), 1e-10);
    auto comp = logical_amplitudes(r.state, {1});
    EXPECT_NEAR(std::abs(comp[0] - comp[1]), 0.0, 1e-12);
    EXPECT_EQ(r.report.resources.cpath_family, 1);
    EXPECT_EQ(r.report.resources.disentanglers, 1);
}

TEST(ToQudit, MatchesKroneckerCoefficients) {
    for (int n : {3, 4}) {
        CVec dense;
        auto s = product_state(n, 200 + n, &dense);
        std::vector<int> ids;
        for (int i = 1; i <= n; ++i) ids.push_back(i);
        auto r = to_qudit_circuit(s, ids, GateParams{});
        expect_clean(r.report);
        EXPECT_EQ(r.report.paths["qudit"].size(), std::size_t{1} << (n - 1));
        auto q = qudit_amplitudes(r.state, n, r.report.paths["qudit"]);
        EXPECT_LT(oracle::max_diff(oracle::fix_phase(q), oracle::fix_phase(dense)), 1e-10);
        for (int i = 1; i < n; ++i) {
            auto comp = logical_amplitudes(r.state, {i});
            EXPECT_NEAR(std::abs(comp[0] - comp[1]), 0.0, 1e-12);
        }
        EXPECT_EQ(r.report.resources.cpath_family, n - 1);
        EXPECT_EQ(r.report.resources.disentanglers, n - 1);
    }
}

TEST(ToQudit, RejectsSinglePhoton) {
    auto s = basis("H");
    EXPECT_THROW(to_qudit_circuit(s, {1}, GateParams{}), Error);
    EXPECT_THROW(to_qudit_circuit(basis("HHHHH"), {1, 2, 3, 4, 5}, GateParams{}), Error);
}

TEST(Teleport, TwoPhotonsGiveTensorCoefficients) {
    CVec dense;
    auto s = product_state(2, 301, &dense);
    TeleportAncillas anc;
    auto t = add_teleport_ancillas(s, 2, &anc);
    auto r = to_qudit_teleport(t, {1, 2}, anc, GateParams{});
    expect_clean(r.report);
    auto q = qudit_amplitudes(r.state, anc.pair_a, r.report.paths["qudit"]);
    EXPECT_LT(oracle::max_diff(oracle::fix_phase(q), oracle::fix_phase(dense)), 1e-10);
    EXPECT_EQ(r.report.resources.bell_measurements, 2);
    EXPECT_EQ(r.state.registry().photon_ids().size(), 1u);
}

TEST(Teleport, BasisCase) {
    auto s = basis("HH");
    TeleportAncillas anc;
    auto t = add_teleport_ancillas(s, 2, &anc);
    auto r = to_qudit_teleport(t, {1, 2}, anc, GateParams{});
    auto q = qudit_amplitudes(r.state, anc.pair_a, r.report.paths["qudit"]);
    EXPECT_NEAR(std::abs(q[0]), 1.0, 1e-12);
}

TEST(Teleport, AgreesWithCircuit) {
    for (int n : {3, 4}) {
        CVec dense;
        auto s = product_state(n, 310 + n, &dense);
        std::vector<int> ids;
        for (int i = 1; i <= n; ++i) ids.push_back(i);
        TeleportAncillas anc;
        auto t = add_teleport_ancillas(s, n, &anc);
        auto r = to_qudit_teleport(t, ids, anc, GateParams{});
        expect_clean(r.report);
        auto c = to_qudit_circuit(s, ids, GateParams{});
        auto a = qudit_amplitudes(r.state, anc.pair_a, r.report.paths["qudit"]);
        auto b = qudit_amplitudes(c.state, n, c.report.paths["qudit"]);
        EXPECT_LT(oracle::max_diff(oracle::fix_phase(a), oracle::fix_phase(b)), 1e-10);
        EXPECT_EQ(r.report.resources.cpath_family, n - 1);
    }
}

TEST(Teleport, RejectsWrongInventory) {
    auto s = basis("HH");
    TeleportAncillas anc;
    auto t = add_teleport_ancillas(s, 2, &anc);
    auto bad = anc;
    bad.switches.clear();
    EXPECT_THROW(to_qudit_teleport(t, {1, 2}, bad, GateParams{}), Error);
    bad = anc;
    std::swap(bad.pair_b, bad.switches[0]);
    EXPECT_THROW(to_qudit_teleport(t, {1, 2}, bad, GateParams{}), Error);
}

TEST(FromQudit, RoundTrip) {
    for (int n : {2, 3}) {
        CVec dense;
        auto s = product_state(n, 400 + n, &dense);
        std::vector<int> ids;
        for (int i = 1; i <= n; ++i) ids.push_back(i);
        auto r = to_qudit_circuit(s, ids, GateParams{});
        std::vector<int> comp(ids.begin(), ids.end() - 1);
        auto b = from_qudit(r.state, n, r.report.paths["qudit"], comp, GateParams{});
        expect_clean(b.report);
        auto out = logical_amplitudes(b.state, b.report.photons["logical"]);
        EXPECT_GE(overlap(out, dense), 1.0 - 1e-8);
        EXPECT_EQ(b.report.resources.entanglers, n);
    }
}

TEST(TwoQubitGate, CnotTruthTable) {
    Eigen::MatrixXcd cnot = Eigen::MatrixXcd::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    const char *in[] = {"HH", "HV", "VH", "VV"};
    const int expect[] = {0, 1, 3, 2};
    for (int k = 0; k < 4; ++k) {
        auto r = two_qubit_gate(basis(in[k]), 1, 2, cnot, GateParams{});
        expect_clean(r.report);
        auto out = logical_amplitudes(r.state, r.report.photons["logical"]);
        for (int j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(out[j]), j == expect[k] ? 1.0 : 0.0, 1e-10) << in[k];
    }
}

TEST(TwoQubitGate, HaarUnitaries) {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        auto u = random_haar_unitary(4, seed);
        auto c = haar_vector(4, 500 + seed);
        auto s = HybridState::polarization({1, 2}, {"1", "2"}, c);
        auto r = two_qubit_gate(s, 1, 2, u, GateParams{});
        expect_clean(r.report);
        EXPECT_GE(overlap(logical_amplitudes(r.state, r.report.photons["logical"]), dense_apply(u, c)), 1.0 - 1e-8);
    }
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(4, 4);
    bad(0, 1) = 0.3;
    EXPECT_THROW(two_qubit_gate(basis("HH"), 1, 2, bad, GateParams{}), Error);
}

TEST(MultiQubitGate, ThreePhotons) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto u = random_haar_unitary(8, 50 + seed);
        CVec dense;
        auto s = product_state(3, 600 + seed, &dense);
        auto r = multi_qubit_gate(s, {1, 2, 3}, u, GateParams{});
        expect_clean(r.report);
        EXPECT_GE(overlap(logical_amplitudes(r.state, r.report.photons["logical"]), dense_apply(u, dense)), 1.0 - 1e-8);
        EXPECT_EQ(r.report.resources.cpath_family, 2);
        EXPECT_EQ(r.report.resources.entanglers, 3);
        EXPECT_EQ(r.report.resources.ancilla_photons, 1);
        EXPECT_EQ(r.report.resources.lomis, 2);
    }
}

TEST(MultiQubitGate, IdentityAndRealInterference) {
    CVec dense;
    auto s = product_state(3, 701, &dense);
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(8, 8);
    auto r = multi_qubit_gate(s, {1, 2, 3}, id, GateParams{}, std::nullopt, hadamard_interference4());
    expect_clean(r.report);
    EXPECT_GE(overlap(logical_amplitudes(r.state, r.report.photons["logical"]), dense), 1.0 - 1e-8);
}

TEST(Toffoli, TwoControlTruthTableBothLayouts) {
    int couplings[2] = {0, 0};
    for (auto layout : {CPath3Layout::Standard, CPath3Layout::SharedMode}) {
        for (int k = 0; k < 8; ++k) {
            std::string bits;
            for (int i = 2; i >= 0; --i) bits += (k >> i & 1) ? 'V' : 'H';
            auto r = toffoli(basis(bits), {1, 2}, 3, GateParams{}, layout);
            expect_clean(r.report);
            auto out = logical_amplitudes(r.state, r.report.photons["logical"]);
            int expect = k >= 6 ? (k ^ 1) : k;
            for (int j = 0; j < 8; ++j) EXPECT_NEAR(std::abs(out[j]), j == expect ? 1.0 : 0.0, 1e-10) << bits;
            couplings[layout == CPath3Layout::SharedMode] = r.report.resources.xpm_couplings;
        }
    }
    EXPECT_EQ(couplings[0] - couplings[1], 1);
}

TEST(Toffoli, HaarInputsAgreeAcrossLayouts) {
    CVec dense;
    auto s = product_state(3, 801, &dense);
    Eigen::MatrixXcd ccx = Eigen::MatrixXcd::Identity(8, 8);
    ccx(6, 6) = ccx(7, 7) = 0.0;
    ccx(6, 7) = ccx(7, 6) = 1.0;
    auto want = dense_apply(ccx, dense);
    for (auto layout : {CPath3Layout::Standard, CPath3Layout::SharedMode}) {
        auto r = toffoli(s, {1, 2}, 3, GateParams{}, layout);
        expect_clean(r.report);
        EXPECT_GE(overlap(logical_amplitudes(r.state, r.report.photons["logical"]), want), 1.0 - 1e-8);
        EXPECT_EQ(r.report.resources.cpath_family, 2);
        EXPECT_EQ(r.report.resources.mergings, 2);
    }
}

TEST(Toffoli, ThreeControls) {
    CVec dense;
    auto s = product_state(4, 901, &dense);
    Eigen::MatrixXcd c3x = Eigen::MatrixXcd::Identity(16, 16);
    c3x(14, 14) = c3x(15, 15) = 0.0;
    c3x(14, 15) = c3x(15, 14) = 1.0;
    auto r = toffoli(s, {1, 2, 3}, 4, GateParams{});
    expect_clean(r.report);
    EXPECT_GE(overlap(logical_amplitudes(r.state, r.report.photons["logical"]), dense_apply(c3x, dense)), 1.0 - 1e-8);
    auto b = toffoli(basis("VVVH"), {1, 2, 3}, 4, GateParams{});
    auto out = logical_amplitudes(b.state, b.report.photons["logical"]);
    EXPECT_NEAR(std::abs(out[15]), 1.0, 1e-10);
}

TEST(ControlledUnitary, TwoTargets) {
    auto uk = random_haar_unitary(4, 77);
    CVec dense;
    auto s = product_state(4, 1001, &dense);
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Identity(16, 16);
    full.block(12, 12, 4, 4) = uk;
    auto r = cn_uk(s, {1, 2}, {3, 4}, uk, GateParams{});
    expect_clean(r.report);
    EXPECT_GE(overlap(logical_amplitudes(r.state, r.report.photons["logical"]), dense_apply(full, dense)), 1.0 - 1e-8);
    EXPECT_EQ(r.report.resources.cpath_family, 3);
    EXPECT_EQ(r.report.resources.mergings, 3);
    EXPECT_EQ(r.report.resources.restricted_unitaries, 1);
}

TEST(ControlledUnitary, SingleControl) {
    Eigen::Matrix2cd u;
    u << 0, 1, 1, 0;
    auto r = cn_u1(basis("VH"), {1}, 2, u, GateParams{});
    auto out = logical_amplitudes(r.state, r.report.photons["logical"]);
    EXPECT_NEAR(std::abs(out[3]), 1.0, 1e-10);
}

TEST(RestrictedUnitary, ActsOnlyOnRails) {
    auto s = HybridState::from_terms({{std::sqrt(0.5), {{1, "a", Pol::H}}}, {std::sqrt(0.5), {{1, "b", Pol::H}}}});
    Eigen::MatrixXcd x(2, 2);
    x << 0, 1, 1, 0;
    auto t = restricted_unitary(s, {1}, {"b"}, x);
    auto want = HybridState::from_terms({{std::sqrt(0.5), {{1, "a", Pol::H}}}, {std::sqrt(0.5), {{1, "b", Pol::V}}}});
    EXPECT_NEAR(fidelity(t, want), 1.0, 1e-12);
}
