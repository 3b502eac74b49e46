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


#ifndef QUBUS_IO_HPP
#define QUBUS_IO_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qubus/analysis.hpp"
#include "qubus/gates.hpp"
#include "qubus/hybrid_state.hpp"
#include "qubus/synthesis.hpp"

namespace qubus {

using Json = nlohmann::ordered_json;

Json complex_to_json(Complex z);
/// Accepts a number or a [re, im] pair.
Complex complex_from_json(const Json &j);

/// Branches are emitted sorted by photon slots (path name, polarization) and then qubus amplitudes.
Json state_to_json(const HybridState &s);
HybridState state_from_json(const Json &j);

Json element_to_json(const ElementOp &op);
ElementOp element_from_json(const Json &j);

Json resources_to_json(const Resources &r);
Json report_to_json(const GateReport &r);

/// Rows of numbers or [re, im] pairs, optionally wrapped as {"matrix": rows}.
Eigen::MatrixXcd matrix_from_json(const Json &j);
Json matrix_to_json(const Eigen::MatrixXcd &m);

Json mesh_to_json(const Mesh &m);
Mesh mesh_from_json(const Json &j);

Json table_to_json(const SweepTable &t);
Json fig2_to_json(const Fig2Data &d);
/// Two-column "n,probability" text for each distribution of the figure data.
std::string fig2_beta_csv(const Fig2Data &d);
std::string fig2_peaks_csv(const Fig2Data &d);

/// Keys alpha, theta, gamma, theta_probe, eta, seed, qnd_mode ("ideal"|"binned"), policy ("enumerate"|"sample").
GateParams params_from_json(const Json &j, GateParams base = {});
Json params_to_json(const GateParams &p);

/// Keys quantity, grid, params, k1, k2, seed, threads. `params` overrides `base`.
SweepSpec sweep_spec_from_json(const Json &j, const GateParams &base = {});

/// Polarization register described by a state spec.
struct StateSpec {
    int photons = 0;
    std::vector<Complex> coefficients;  // normalized, lexicographic with the first photon most significant
    bool product = false;
};

/// Forms: a basis string over H, V, +, - ("HVH"); "haar:SEED" and "haar-product:SEED" (need `photons`);
/// a coefficient list "0.6,0.8" or JSON array of numbers / [re, im] pairs.
StateSpec parse_state_spec(const std::string &spec, int photons = 0);
/// Photons 1..n on paths "1".."n".
HybridState register_from_spec(const StateSpec &spec);

std::vector<Complex> haar_state(std::size_t dim, std::uint64_t seed);

Json read_json_file(const std::string &path);
std::string dump_json(const Json &j);

}  // namespace qubus

#endif
