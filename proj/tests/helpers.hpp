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

#ifndef QUBUS_TESTS_HELPERS_HPP
#define QUBUS_TESTS_HELPERS_HPP

#include <random>
#include <string>
#include <vector>

#include "oracles/dense.hpp"
#include "qubus/hybrid_state.hpp"

namespace testing_util {

using qubus::Complex;
using qubus::HybridState;
using qubus::Pol;

inline HybridState register_state(const std::vector<int> &ids, const std::vector<Complex> &coeffs) {
    std::vector<std::string> paths;
    for (int id : ids) paths.push_back(std::to_string(id));
    return HybridState::polarization(ids, paths, coeffs);
}

inline std::vector<Complex> haar_vector(std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return oracle::random_state(dim, rng);
}

/// Product of single-photon qubits on paths "1".."n"; returns the dense Kronecker coefficients too.
inline HybridState product_state(int n, std::uint64_t seed, std::vector<Complex> *dense = nullptr) {
    std::mt19937_64 rng(seed);
    HybridState s;
    std::vector<oracle::CVec> factors;
    for (int i = 1; i <= n; ++i) {
        auto q = oracle::random_state(2, rng);
        factors.push_back(q);
        s = qubus::tensor(s, HybridState::photon(i, std::to_string(i), q[0], q[1]));
    }
    if (dense) *dense = oracle::kron_all(factors);
    return s;
}

}  // namespace testing_util

#endif
