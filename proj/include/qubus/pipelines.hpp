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

#ifndef QUBUS_PIPELINES_HPP
#define QUBUS_PIPELINES_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qubus/gates.hpp"

namespace qubus {

constexpr int kMaxLogicalPhotons = 4;

/// Ancillas for the teleportation transform: a |Phi+> pair and one |+> switch photon per bit.
struct TeleportAncillas {
    int pair_a = 0;  // carries the qudit at the end
    int pair_b = 0;
    std::vector<int> switches;
};

/// Adds the ancillas needed to teleport `n` photons, using fresh photon ids and paths.
HybridState add_teleport_ancillas(const HybridState &s, int n, TeleportAncillas *out);
/// Adds a |+> photon on a fresh path and returns its id.
HybridState add_plus_ancilla(const HybridState &s, int *id);

/// Polarization amplitudes of single-path photons (first photon most significant) when they factor
/// out of the rest of the state. Normalized.
std::vector<Complex> logical_amplitudes(const HybridState &s, const std::vector<int> &photons);
/// Amplitudes of a photon over ordered paths, index 2 * path + (V ? 1 : 0). Normalized.
std::vector<Complex> qudit_amplitudes(const HybridState &s, int photon, const std::vector<std::string> &paths);

/// Applies `u` to the joint polarization of `photons` in the branches where photon i is on rails[i].
HybridState restricted_unitary(const HybridState &s, const std::vector<int> &photons, const std::vector<std::string> &rails,
                               const Eigen::MatrixXcd &u);

/// report.photons["qudit"] holds the carrier, report.photons["companions"] the |+> photons and
/// report.paths["qudit"] the ordered qudit paths.
GateResult to_qudit_circuit(const HybridState &s, const std::vector<int> &photons, const GateParams &p);
GateResult to_qudit_teleport(const HybridState &s, const std::vector<int> &photons, const TeleportAncillas &anc,
                             const GateParams &p);

/// report.photons["logical"] lists the photons carrying the qubits, most significant first.
GateResult from_qudit(const HybridState &s, int qudit, const std::vector<std::string> &paths,
                      const std::vector<int> &companions, const GateParams &p, std::optional<int> ancilla = std::nullopt,
                      std::optional<Eigen::MatrixXcd> interference = std::nullopt);

GateResult multi_qubit_gate(const HybridState &s, const std::vector<int> &photons, const Eigen::MatrixXcd &u,
                            const GateParams &p, std::optional<int> ancilla = std::nullopt,
                            std::optional<Eigen::MatrixXcd> interference = std::nullopt);
GateResult two_qubit_gate(const HybridState &s, int photon1, int photon2, const Eigen::MatrixXcd &u, const GateParams &p,
                          std::optional<int> ancilla = std::nullopt);

GateResult cn_u1(const HybridState &s, const std::vector<int> &controls, int target, const Eigen::Matrix2cd &u1,
                 const GateParams &p, CPath3Layout layout = CPath3Layout::Standard);
GateResult toffoli(const HybridState &s, const std::vector<int> &controls, int target, const GateParams &p,
                   CPath3Layout layout = CPath3Layout::Standard);
GateResult cn_uk(const HybridState &s, const std::vector<int> &controls, const std::vector<int> &targets,
                 const Eigen::MatrixXcd &uk, const GateParams &p, CPath3Layout layout = CPath3Layout::Standard);

}  // namespace qubus

#endif
