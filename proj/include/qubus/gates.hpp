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

#ifndef QUBUS_GATES_HPP
#define QUBUS_GATES_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qubus/detection.hpp"
#include "qubus/elements.hpp"
#include "qubus/hybrid_state.hpp"
#include "qubus/synthesis.hpp"

namespace qubus {

enum class OutcomePolicy { Enumerate, Sample };

struct GateParams {
    double alpha = std::sqrt(4000.0);
    double theta = 0.05;
    QndMode qnd_mode = QndMode::Ideal;
    Complex gamma = 100.0;
    double theta_probe = 0.05;
    double eta = 0.95;
    OutcomePolicy policy = OutcomePolicy::Enumerate;
    std::uint64_t seed = 0;
    double probability_floor = 1e-12;
    double fidelity_tolerance = 1e-8;
    /// Keep the post-feed-forward state of every enumerated outcome in GateResult::outcome_states.
    bool keep_outcome_states = false;

    /// |beta|^2 = 2 alpha^2 sin^2(theta), the mean photon number of the displaced qubus component.
    double beta2() const;
    /// Parameters whose qubus amplitude gives the requested |beta|^2 at angle theta.
    static GateParams for_beta2(double beta2, double theta = 0.05);
    /// Generator used by the Sample policy, shared by every gate run with these parameters.
    std::mt19937_64 &generator() const;

   private:
    mutable std::shared_ptr<std::mt19937_64> rng_;
};

struct Resources {
    int xpm_couplings = 0;
    int qubus_modes = 0;
    int detections = 0;
    int ancilla_photons = 0;
    int cpath_family = 0;
    int disentanglers = 0;
    int entanglers = 0;
    int mergings = 0;
    int lomis = 0;
    int bell_measurements = 0;
    int restricted_unitaries = 0;

    Resources &operator+=(const Resources &o);
    friend bool operator==(const Resources &, const Resources &) = default;
};

struct OutcomeSummary {
    std::string stage;
    std::string label;
    double probability = 0.0;
    /// Fidelity of this outcome's corrected state with the state the gate continues with.
    double fidelity = 1.0;
};

struct LoggedRecord {
    std::string stage;
    RecordKind kind = RecordKind::Fock;
    int value = 0;
    std::string target;
    double probability = 0.0;
    double misidentification = 0.0;
};

struct GateReport {
    std::string gate;
    /// Measurement outcomes the returned state went through.
    std::vector<LoggedRecord> outcome_log;
    /// Every enumerated outcome of every stage.
    std::vector<OutcomeSummary> outcomes;
    /// Probability mass of outcomes that reproduce the returned state (product over stages).
    double success_probability = 1.0;
    double min_fidelity = 1.0;
    Resources resources;
    /// Named output paths (for example "even"/"odd" for the parity gate).
    std::map<std::string, std::vector<std::string>> paths;
    /// Named photons (for example logical carriers after a merge).
    std::map<std::string, std::vector<int>> photons;

    void absorb(const GateReport &sub);
};

struct OutcomeState {
    std::string stage;
    std::string label;
    double probability = 0.0;
    HybridState state;
};

struct GateResult {
    HybridState state;
    GateReport report;
    std::vector<OutcomeState> outcome_states;
};

/// One qubus coupling: beam 0 or 1 acquires theta when the selected slot is occupied.
struct Coupling {
    int beam = 0;
    XpmSelector selector;
    friend bool operator==(const Coupling &, const Coupling &) = default;
};

/// A two-beam interaction followed by a photon-number measurement of the first beam.
struct XpmStagePlan {
    std::string name;
    std::vector<ElementOp> prepare;
    std::vector<Coupling> couplings;
    /// Photonic elements applied after the coupling block, before detection.
    std::vector<ElementOp> finish;
    /// Corrections for the detected photon number (or inferred peak).
    std::function<std::vector<ElementOp>(int n)> feed_forward;
};

/// Non-demolition presence detection of one photon over a set of rails.
struct PresenceStagePlan {
    std::string name;
    int photon = 0;
    std::vector<std::string> rails;
    std::function<std::vector<ElementOp>(std::size_t rail)> feed_forward;
};

/// Prepare, add |alpha>|alpha>, couple, and apply -theta to both beams; stops before the qubus BS.
HybridState xpm_interaction(const HybridState &s, const XpmStagePlan &plan, const GateParams &p, int *beam0, int *beam1);
GateResult run_xpm_stage(const HybridState &s, const XpmStagePlan &plan, const GateParams &p);
GateResult run_presence_stage(const HybridState &s, const PresenceStagePlan &plan, const GateParams &p);

/// Selects the continuing state among candidate outcomes and scores every candidate against it.
struct Candidate {
    std::string label;
    double probability = 0.0;
    HybridState state;
    LoggedRecord record;
};
GateResult settle(const std::string &stage, std::vector<Candidate> candidates, const GateParams &p);

// ---------------------------------------------------------------------------------------------
// Gate plans (coupling tables and feed-forward)

/// Photon 2 is split onto (its path, `new_path`); even parity ends on `new_path`.
XpmStagePlan parity_plan(const HybridState &s, int photon1, int photon2, const std::string &new_path);
/// Target is split onto (its path, `v_path`); control H keeps the target on its path.
XpmStagePlan c_path_plan(const HybridState &s, int control, int target, const std::string &v_path);
/// Every target path p is split onto (p, q); control H keeps p.
XpmStagePlan c_path2_plan(const HybridState &s, int control, int target, const std::vector<std::string> &paths,
                          const std::vector<std::string> &new_paths);

enum class CPath3Layout { Standard, SharedMode };

struct CPath3Spec {
    int control = 0;
    std::string first;   // control path carrying the uncontrolled component
    std::string second;  // control path that controls the target
    int target = 0;
    std::string v_path;  // new target path, occupied when the control is V on `second`
    CPath3Layout layout = CPath3Layout::Standard;
    /// SharedMode: selectors on other photons that fire exactly once when the control is on `first`.
    std::vector<XpmSelector> shared;
    std::string rail;  // Standard: rail that holds V from `first`
};
XpmStagePlan c_path3_plan(const HybridState &s, const CPath3Spec &spec);

/// Ancilla copies the target polarization over the listed paths (variants 1 and 4).
XpmStagePlan entangler_polarization_plan(const HybridState &s, int ancilla, int target, const std::vector<std::string> &paths);
/// Photon in |+> becomes H when the target is in group0 and V when it is in group1 (variants 2 and 3).
XpmStagePlan entangler_path_plan(const HybridState &s, int photon, int target, const std::vector<std::string> &group0,
                                 const std::vector<std::string> &group1);

// ---------------------------------------------------------------------------------------------
// Gates

GateResult parity_gate(const HybridState &s, int photon1, int photon2, const GateParams &p, std::string new_path = "");
GateResult c_path(const HybridState &s, int control, int target, const GateParams &p, std::string v_path = "");
GateResult c_path2(const HybridState &s, int control, int target, const std::vector<std::string> &paths, const GateParams &p,
                   std::vector<std::string> new_paths = {});
GateResult c_path3(const HybridState &s, CPath3Spec spec, const GateParams &p);
/// Projects the control onto |+>, moving its information into a pi phase on the target's `v_paths`.
GateResult disentangler(const HybridState &s, int control, int target, const std::vector<std::string> &v_paths,
                        const GateParams &p);

struct EntanglerArgs {
    /// Variants 1 and 4: the ancilla in |+>. Variants 2 and 3: the companion photon in |+>.
    int photon = 0;
    int target = 0;
    /// Variants 1 and 4: every path of the target.
    std::vector<std::string> paths;
    /// Variants 2 and 3: path groups correlated with H and V of `photon`.
    std::vector<std::string> group0;
    std::vector<std::string> group1;
};
GateResult entangler(const HybridState &s, int variant, const EntanglerArgs &args, const GateParams &p);

/// A photon whose polarization (or presence on a path) marks one bit of a merged photon's path index.
struct PhaseCarrier {
    int photon = 0;
    std::string path;  // empty: every path of the photon
    bool whole_path = false;  // phase on the path irrespective of polarization
};

/// Merges `photon` from `paths` (N = 2^m of them) onto the ancilla. carriers[i] marks bit i of the
/// path index, most significant first. `interference` defaults to the N-point Fourier matrix.
GateResult merging_n(const HybridState &s, int photon, const std::vector<std::string> &paths, int ancilla,
                     const std::vector<PhaseCarrier> &carriers, const GateParams &p,
                     std::optional<Eigen::MatrixXcd> interference = std::nullopt);
GateResult merging(const HybridState &s, int photon, const std::string &path_a, const std::string &path_b, int ancilla,
                   const PhaseCarrier &carrier, const GateParams &p);

/// Corrections for each (rail k, sign) outcome of a merge with interference W: element ops that undo
/// W_kj / |W_kj| on component j. Entry [2k + s] with s = 0 for |+> and 1 for |->.
std::vector<std::vector<ElementOp>> merging_feed_forward_table(const Eigen::MatrixXcd &w, int ancilla,
                                                               const std::vector<PhaseCarrier> &carriers);


}  // namespace qubus

#endif
