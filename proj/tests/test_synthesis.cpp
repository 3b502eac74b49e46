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
#include "qubus/synthesis.hpp"

using namespace qubus;

namespace {

HybridState spread(const std::vector<Complex> &c, Pol pol, std::vector<std::string> *paths) {
    std::vector<Term> terms;
    paths->clear();
    for (std::size_t j = 0; j < c.size(); ++j) {
        paths->push_back("m" + std::to_string(j));
        terms.push_back({c[j], {{1, paths->back(), pol}}});
    }
    return HybridState::from_terms(terms);
}

std::vector<Complex> amplitudes(const HybridState &s, const std::vector<std::string> &paths, Pol pol) {
    std::vector<Complex> out;
    for (const auto &p : paths) out.push_back(oracle::amplitude_of(s, {{1, p, pol}}));
    return out;
}

}  // namespace

TEST(Reck, IdentityNeedsNoRotations) {
    auto m = reck_decompose(Eigen::MatrixXcd::Identity(4, 4));
    EXPECT_TRUE(m.rotations.empty());
    EXPECT_LT((m.matrix() - Eigen::MatrixXcd::Identity(4, 4)).norm(), 1e-12);
}

TEST(Reck, RealInterferenceMatrix) {
    auto u = hadamard_interference4();
    EXPECT_LT(unitarity_deviation(u), 1e-15);
    auto m = reck_decompose(u);
    EXPECT_LT((m.matrix() - u).norm(), 1e-12);
}

TEST(Reck, HaarReconstruction) {
    for (int n : {2, 4, 8, 16}) {
        auto u = random_haar_unitary(n, 1000 + n);
        EXPECT_LT(unitarity_deviation(u), 1e-12);
        auto m = reck_decompose(u);
        EXPECT_LE(m.rotations.size(), static_cast<std::size_t>(n * (n - 1) / 2));
        EXPECT_LT((m.matrix() - u).norm(), 1e-10) << n;
    }
}

TEST(Reck, HaarIsSeedDeterministic) {
    EXPECT_EQ(random_haar_unitary(4, 5), random_haar_unitary(4, 5));
    EXPECT_NE(random_haar_unitary(4, 5), random_haar_unitary(4, 6));
}

TEST(Reck, RejectsNonUnitary) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(3, 3);
    a(2, 0) = 0.1;
    try {
        reck_decompose(a);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::Validation);
        EXPECT_NE(std::string(e.what()).find("0.1"), std::string::npos);
    }
}

TEST(MeshApply, MatchesDenseAction) {
    for (int n : {2, 4, 8, 16}) {
        auto u = random_haar_unitary(n, 2000 + n);
        auto c = testing_util::haar_vector(n, 3000 + n);
        std::vector<std::string> paths;
        auto s = spread(c, Pol::V, &paths);
        auto out = mesh_apply(s, 1, paths, reck_decompose(u));
        EXPECT_LT(oracle::max_diff(amplitudes(out, paths, Pol::V), oracle::matvec(u, c)), 1e-10) << n;
    }
}

TEST(MeshApply, InverseRoundTrip) {
    auto u = random_haar_unitary(8, 17);
    auto c = testing_util::haar_vector(8, 18);
    std::vector<std::string> paths;
    auto s = spread(c, Pol::H, &paths);
    auto t = mesh_apply(mesh_apply(s, 1, paths, reck_decompose(u)), 1, paths, reck_decompose(u.adjoint()));
    EXPECT_NEAR(fidelity(t, s), 1.0, 1e-10);
}

TEST(MeshApply, IdentityAndSubsetOccupation) {
    auto s = HybridState::photon(1, "m0", 0.6, 0.0);
    s = scale(s, 1.0 / 0.6);
    std::vector<std::string> paths{"m0", "m1", "m2", "m3"};
    auto id = mesh_apply(s, 1, paths, reck_decompose(Eigen::MatrixXcd::Identity(4, 4)));
    EXPECT_NEAR(fidelity(id, s), 1.0, 1e-14);
    auto q = mesh_apply(s, 1, paths, reck_decompose(qft_matrix(4)));
    for (const auto &p : paths) EXPECT_NEAR(std::abs(oracle::amplitude_of(q, {{1, p, Pol::H}})), 0.5, 1e-12);
}

TEST(MeshApply, MixedPolarizationRejected) {
    auto s = HybridState::from_terms({{std::sqrt(0.5), {{1, "m0", Pol::H}}}, {std::sqrt(0.5), {{1, "m1", Pol::V}}}});
    EXPECT_THROW(mesh_apply(s, 1, {"m0", "m1"}, reck_decompose(qft_matrix(2))), Error);
}

TEST(Qft, SmallCases) {
    auto f2 = qft_matrix(2);
    const double h = std::sqrt(0.5);
    EXPECT_NEAR(std::abs(f2(0, 0) - h), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(f2(1, 1) + h), 0.0, 1e-15);
    for (int n : {2, 4, 8, 16}) EXPECT_LT(unitarity_deviation(qft_matrix(n)), 1e-12);
    auto f4 = qft_matrix(4);
    EXPECT_LT((f4.adjoint() * f4 - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-14);
}
