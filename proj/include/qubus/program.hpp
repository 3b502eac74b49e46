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


#ifndef QUBUS_PROGRAM_HPP
#define QUBUS_PROGRAM_HPP

#include <map>
#include <string>
#include <vector>

#include "qubus/gates.hpp"
#include "qubus/io.hpp"

namespace qubus {

/// Gate names accepted by invoke_gate and run_gate_demo.
const std::vector<std::string> &gate_names();

/// Resolves a matrix argument: rows of entries, or one of "identity", "x", "z", "h", "cnot", "qft",
/// "hadamard4", "haar:SEED". `dim` sizes the named matrices.
Eigen::MatrixXcd matrix_argument(const Json &j, int dim);

/// Runs one named gate. `call` holds "gate" plus the gate's named arguments.
GateResult invoke_gate(const HybridState &s, const Json &call, const GateParams &p);

/// Executes a program {"params"?, "input", "ancillas"?, "steps"}. Step arguments may reference earlier
/// results as "@step.photons.key" or "@step.paths.key", optionally indexed with "[i]".
Json run_program(const Json &program, const GateParams &base);

/// Runs a gate on a canonical register built from `input` (see parse_state_spec), preparing any
/// prerequisite paths first. `options` may hold "matrix", "layout", "photons".
Json run_gate_demo(const std::string &name, const std::string &input, const GateParams &p, const Json &options = Json::object());

/// Nonzero amplitudes of single-path photons as {"basis": "HV..", "amplitude": [re, im]}.
Json logical_json(const HybridState &s, const std::vector<int> &photons);

/// Checks one golden case {"name", "gate"|"program", "input", "expect", "tolerance"?}.
Json verify_case(const Json &c, const GateParams &base);

}  // namespace qubus

#endif
