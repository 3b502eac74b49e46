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

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"
#include "helpers.hpp"
#include "oracles/dense.hpp"
#include "qubus/elements.hpp"
#include "qubus/error.hpp"
#include "qubus/hybrid_state.hpp"

using namespace qubus;

namespace {

HybridState one_photon_with_qubus(Pol pol, Complex alpha) {
    return tensor(HybridState::photon(1, "1", pol == Pol::H ? 1.0 : 0.0, pol == Pol::V ? 1.0 : 0.0),
                  HybridState::coherent(0, alpha));
}

HybridState random_hybrid(std::mt19937_64 &rng, int branches, double max_alpha) {
    std::uniform_real_distribution<double> u(-max_alpha, max_alpha);
    std::normal_distribution<double> g;
    ModeRegistry reg;
    reg.add_photon(1);
    reg.add_path(1, "1");
    reg.add_path(1, "2");
    reg.add_qubus_mode(0);
    reg.add_qubus_mode(1);
    std::vector<Branch> br;
    for (int i = 0; i < branches; ++i) {
        Slot s{intern_path(i % 2 ? "1" : "2"), (i / 2) % 2 ? Pol::V : Pol::H};
        br.push_back(Branch{Complex(g(rng), g(rng)), {s}, {Complex(u(rng), u(rng)), Complex(u(rng), u(rng))}});
    }
    return normalize(HybridState(reg, br));
}

}  // namespace

TEST(InnerProduct, NormalizedStateWithItself) {
    auto s = one_photon_with_qubus(Pol::H, 2.0);
    EXPECT_NEAR(std::abs(inner_product(s, s) - 1.0), 0.0, 1e-15);
}

TEST(InnerProduct, OppositeCoherentAmplitudes) {
    double a = std::sqrt(20.0);
    auto x = one_photon_with_qubus(Pol::H, a);
    auto y = one_photon_with_qubus(Pol::H, -a);
    EXPECT_NEAR(std::abs(inner_product(x, y)) / std::exp(-40.0), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(inner_product(x, y)), 4.248354255291589e-18, 1e-30);
}

TEST(InnerProduct, OrthogonalPolarizations) {
    auto x = one_photon_with_qubus(Pol::H, 1.0);
    auto y = one_photon_with_qubus(Pol::V, 1.0);
    EXPECT_EQ(inner_product(x, y), Complex(0.0));
}

TEST(InnerProduct, RegistryMismatchThrows) {
    auto x = one_photon_with_qubus(Pol::H, 1.0);
    auto y = HybridState::photon(2, "2", 1.0, 0.0);
    EXPECT_THROW(inner_product(x, y), Error);
}

TEST(InnerProduct, ConjugateSymmetry) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        auto a = random_hybrid(rng, 6, 3.0);
        auto b = random_hybrid(rng, 5, 3.0);
        auto ab = inner_product(a, b);
        auto ba = inner_product(b, a);
        EXPECT_LE(std::abs(ab - std::conj(ba)), 1e-14);
        EXPECT_GE(inner_product(a, a).real(), 0.0);
        EXPECT_NEAR(inner_product(a, a).imag(), 0.0, 1e-15);
    }
}

TEST(InnerProduct, MatchesTruncatedFockExpansion) {
    std::mt19937_64 rng(11);
    const int cutoff = 40;
    auto dense = [&](const HybridState &s) {
        // label index: path (2) x pol (2); Fock index over two modes
        std::size_t block = (cutoff + 1) * (cutoff + 1);
        oracle::CVec v(4 * block, 0.0);
        for (const auto &b : s.branches()) {
            int label = (path_name(b.photons[0].path) == "2" ? 2 : 0) + (b.photons[0].pol == Pol::V ? 1 : 0);
            auto f = oracle::kron(oracle::coherent_vector(b.qubus[0], cutoff), oracle::coherent_vector(b.qubus[1], cutoff));
            for (std::size_t k = 0; k < block; ++k) v[label * block + k] += b.amplitude * f[k];
        }
        return v;
    };
    for (int t = 0; t < 10; ++t) {
        auto a = random_hybrid(rng, 6, 1.4);
        auto b = random_hybrid(rng, 6, 1.4);
        auto va = dense(a), vb = dense(b);
        Complex d = 0.0;
        for (std::size_t i = 0; i < va.size(); ++i) d += std::conj(va[i]) * vb[i];
        EXPECT_LE(std::abs(d - inner_product(a, b)), 1e-8);
    }
}

TEST(Fidelity, IdenticalAndGlobalPhase) {
    auto s = normalize(superpose(one_photon_with_qubus(Pol::H, 1.0), one_photon_with_qubus(Pol::V, 2.0)));
    EXPECT_NEAR(fidelity(s, s), 1.0, 1e-14);
    EXPECT_NEAR(fidelity(s, scale(s, std::polar(1.0, 0.7))), 1.0, 1e-14);
}

TEST(Fidelity, PlusVersusH) {
    double h = 1.0 / std::sqrt(2.0);
    auto plus = HybridState::photon(1, "1", h, h);
    auto hh = HybridState::photon(1, "1", 1.0, 0.0);
    EXPECT_NEAR(fidelity(plus, hh), 0.5, 1e-15);
}

TEST(Fidelity, UnnormalizedThrows) {
    auto s = HybridState::photon(1, "1", 1.0, 1.0);
    EXPECT_THROW(fidelity(s, s), Error);
}

TEST(Fidelity, ReducesOntoSubsystem) {
    double h = 1.0 / std::sqrt(2.0);
    auto a = HybridState::photon(1, "1", h, h);
    auto b = HybridState::photon(2, "2", 0.6, 0.8);
    auto ab = tensor(a, b);
    EXPECT_NEAR(fidelity(ab, a), 1.0, 1e-14);
    EXPECT_NEAR(fidelity(b, ab), 1.0, 1e-14);
    // Bell pair reduced onto one photon is maximally mixed
    auto bell = HybridState::polarization({1, 2}, {"1", "2"}, {h, 0.0, 0.0, h});
    EXPECT_NEAR(fidelity(bell, HybridState::photon(1, "1", 1.0, 0.0)), 0.5, 1e-14);
}

TEST(Canonicalize, MergesDuplicates) {
    ModeRegistry reg;
    reg.add_photon(1);
    reg.add_path(1, "1");
    reg.add_qubus_mode(0);
    Slot s{intern_path("1"), Pol::H};
    HybridState st(reg, {Branch{0.5, {s}, {2.0}}, Branch{0.5, {s}, {2.0}}});
    auto c = canonicalize(st);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c.branches()[0].amplitude, Complex(1.0));
}

TEST(Canonicalize, DropsTinyBranches) {
    ModeRegistry reg;
    reg.add_photon(1);
    reg.add_path(1, "1");
    HybridState st(reg, {Branch{1.0, {Slot{intern_path("1"), Pol::H}}, {}}, Branch{1e-15, {Slot{intern_path("1"), Pol::V}}, {}}});
    EXPECT_EQ(canonicalize(st).size(), 1u);
}

TEST(Canonicalize, MergesRoundingDifferences) {
    ModeRegistry reg;
    reg.add_photon(1);
    reg.add_path(1, "1");
    reg.add_qubus_mode(0);
    Slot s{intern_path("1"), Pol::H};
    Complex a = std::polar(std::sqrt(4000.0), 0.05);
    Complex b = a * std::polar(1.0, 0.05) * std::polar(1.0, -0.05);
    HybridState st(reg, {Branch{0.5, {s}, {a}}, Branch{0.5, {s}, {b}}});
    EXPECT_EQ(canonicalize(st).size(), 1u);
}

TEST(Canonicalize, NoTwoBranchesShareLabels) {
    std::mt19937_64 rng(3);
    auto s = random_hybrid(rng, 12, 2.0);
    auto doubled = superpose(s, s);
    auto c = canonicalize(doubled);
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j) {
            const auto &x = c.branches()[i];
            const auto &y = c.branches()[j];
            bool same = x.photons == y.photons && std::abs(x.qubus[0] - y.qubus[0]) < 1e-12 &&
                        std::abs(x.qubus[1] - y.qubus[1]) < 1e-12;
            EXPECT_FALSE(same);
        }
    EXPECT_NEAR(norm(c), 2.0, 1e-12);
}

TEST(Tensor, ProductOfBasisStates) {
    auto s = tensor(HybridState::photon(1, "1", 1.0, 0.0), HybridState::photon(2, "2", 0.0, 1.0));
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s.branches()[0].amplitude, Complex(1.0));
    EXPECT_EQ(s.branches()[0].photons[0].pol, Pol::H);
    EXPECT_EQ(s.branches()[0].photons[1].pol, Pol::V);
}

TEST(Tensor, HaarStateIsNormalized) {
    auto c = testing_util::haar_vector(4, 5);
    auto s = HybridState::polarization({1, 2}, {"1", "2"}, c);
    EXPECT_NEAR(norm(s), 1.0, 1e-12);
}

TEST(Tensor, NormIsMultiplicative) {
    std::mt19937_64 rng(9);
    auto a = random_hybrid(rng, 4, 1.0);
    auto b = tensor(HybridState::photon(2, "x", 0.6, 0.8), HybridState::coherent(5, Complex(0.3, 0.1)));
    auto ab = tensor(a, b);
    EXPECT_NEAR(norm(ab), 1.0, 1e-12);
    EXPECT_NEAR(norm(tensor(scale(a, 2.0), b)), 2.0, 1e-12);
}

TEST(Tensor, IdCollisionThrows) {
    auto a = HybridState::photon(1, "1", 1.0, 0.0);
    EXPECT_THROW(tensor(a, HybridState::photon(1, "9", 1.0, 0.0)), Error);
    EXPECT_THROW(tensor(a, HybridState::photon(2, "1", 1.0, 0.0)), Error);
    auto q = HybridState::coherent(0, 1.0);
    EXPECT_THROW(tensor(q, q), Error);
}

TEST(Registry, PathsAreDisjointAcrossPhotons) {
    ModeRegistry reg;
    reg.add_photon(1);
    reg.add_photon(2);
    reg.add_path(1, "a");
    EXPECT_THROW(reg.add_path(2, "a"), Error);
    EXPECT_EQ(reg.fresh_path("a"), "a_2");
    EXPECT_EQ(reg.fresh_path("b"), "b");
}

TEST(Qubus, ReleaseOnlyWhenFactorized) {
    auto s = tensor(HybridState::photon(1, "1", 0.6, 0.8), HybridState::coherent(0, 3.0));
    bool released = false;
    auto r = release_qubus(s, 0, &released);
    EXPECT_TRUE(released);
    EXPECT_TRUE(r.registry().qubus_modes().empty());
    auto e = xpm(s, 0, XpmSelector{1, "1", Pol::V}, 0.3);
    release_qubus(e, 0, &released);
    EXPECT_FALSE(released);
}
