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

#ifndef QUBUS_SYNTHESIS_HPP
#define QUBUS_SYNTHESIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qubus/elements.hpp"
#include "qubus/hybrid_state.hpp"

namespace qubus {

/// Phase `phase` on mode_a followed by a real rotation by `angle` between mode_a and mode_b.
struct MeshRotation {
    int mode_a = 0;
    int mode_b = 0;
    double angle = 0.0;
    double phase = 0.0;
};

struct Mesh {
    int dimension = 0;
    std::vector<MeshRotation> rotations;  // in order of application
    std::vector<double> phases;           // final per-mode phases

    Eigen::MatrixXcd matrix() const;
};

/// Largest |(U^dagger U - I)_ij|.
double unitarity_deviation(const Eigen::MatrixXcd &u);
void require_unitary(const Eigen::MatrixXcd &u, double tol = 1e-10);

Mesh reck_decompose(const Eigen::MatrixXcd &u);
std::vector<ElementOp> mesh_ops(const Mesh &mesh, int photon, const std::vector<std::string> &paths);
HybridState mesh_apply(const HybridState &s, int photon, const std::vector<std::string> &paths, const Mesh &mesh);

/// Acts with `u` on the photon's amplitudes over `paths`, whatever the polarization.
HybridState path_unitary(const HybridState &s, int photon, const std::vector<std::string> &paths,
                         const Eigen::MatrixXcd &u);

Eigen::MatrixXcd qft_matrix(int n);
Eigen::MatrixXcd random_haar_unitary(int n, std::uint64_t seed);
/// The real 4 x 4 interference with entries +-1/2 that can stand in for the 4-point Fourier transform.
Eigen::MatrixXcd hadamard_interference4();

}  // namespace qubus

#endif
