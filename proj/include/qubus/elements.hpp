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

#ifndef QUBUS_ELEMENTS_HPP
#define QUBUS_ELEMENTS_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qubus/hybrid_state.hpp"

namespace qubus {

enum class ElementKind {
    PhotonBS,
    PhotonMix,
    PBS,
    PBSCombine,
    PBSpm,
    PBSpmCombine,
    WavePlateX,
    WavePlateZ,
    WavePlateU,
    PolPhase,
    PathPhase,
    PathSwitch,
    XPM,
    QubusPhase,
    QubusBS,
};

const char *element_kind_name(ElementKind k);
ElementKind element_kind_from_name(const std::string &name);

/// Selects the branches where `photon` sits on `path`, optionally restricted to one polarization.
struct XpmSelector {
    int photon = 0;
    std::string path;
    std::optional<Pol> pol;
    friend bool operator==(const XpmSelector &, const XpmSelector &) = default;
};

/// One optical element. Path roles per kind:
///   PhotonBS, PhotonMix, PathSwitch: {a, b}
///   PBS: {in, out_h, out_v}            PBSCombine: {in_h, in_v, out}
///   PBSpm: {in, out_plus, out_minus}   PBSpmCombine: {in_plus, in_minus, out}
///   WavePlateX/Z/U, PolPhase: {path} or {} for every path of the photon
///   PathPhase: {path}                  XPM: {path} with `pol` and `modes = {qubus}`
///   QubusPhase: modes {m}              QubusBS: modes {a, b}
struct ElementOp {
    ElementKind kind = ElementKind::PhotonBS;
    int photon = 0;
    std::vector<std::string> paths;
    std::optional<Pol> pol;
    std::vector<int> modes;
    double parameter = 0.0;
    std::array<Complex, 4> matrix{};  // WavePlateU, row-major in the (H, V) basis
    friend bool operator==(const ElementOp &, const ElementOp &) = default;
};

std::string describe(const ElementOp &op);

HybridState photon_bs(const HybridState &s, int photon, const std::string &a, const std::string &b);
/// |x>_a -> cos t |x>_a + sin t |x>_b,  |x>_b -> -sin t |x>_a + cos t |x>_b
HybridState photon_mix(const HybridState &s, int photon, const std::string &a, const std::string &b, double t);
HybridState pbs(const HybridState &s, int photon, const std::string &in, const std::string &out_h, const std::string &out_v);
HybridState pbs_combine(const HybridState &s, int photon, const std::string &in_h, const std::string &in_v,
                        const std::string &out);
HybridState pbs_pm(const HybridState &s, int photon, const std::string &in, const std::string &out_plus,
                   const std::string &out_minus);
HybridState pbs_pm_combine(const HybridState &s, int photon, const std::string &in_plus, const std::string &in_minus,
                           const std::string &out);
/// An empty `path` acts on every path of the photon.
HybridState sigma_x(const HybridState &s, int photon, const std::string &path = "");
HybridState sigma_z(const HybridState &s, int photon, const std::string &path = "");
HybridState wave_plate(const HybridState &s, int photon, const std::string &path, const std::array<Complex, 4> &u);
/// Multiplies |V> on the path by e^{i phi}.
HybridState pol_phase(const HybridState &s, int photon, const std::string &path, double phi);
/// Multiplies both polarizations on the path by e^{i phi}.
HybridState path_phase(const HybridState &s, int photon, const std::string &path, double phi);
HybridState path_switch(const HybridState &s, int photon, const std::string &a, const std::string &b);
HybridState xpm(const HybridState &s, int mode, const XpmSelector &sel, double theta);
HybridState qubus_phase(const HybridState &s, int mode, double phi);
/// (a1, a2) -> ((a1 - a2)/sqrt2, (a1 + a2)/sqrt2)
HybridState qubus_bs(const HybridState &s, int mode_a, int mode_b);

HybridState apply_element(const HybridState &s, const ElementOp &op);
HybridState apply_elements(const HybridState &s, const std::vector<ElementOp> &ops);

namespace op {
ElementOp photon_bs(int photon, std::string a, std::string b);
ElementOp photon_mix(int photon, std::string a, std::string b, double t);
ElementOp pbs(int photon, std::string in, std::string out_h, std::string out_v);
ElementOp pbs_combine(int photon, std::string in_h, std::string in_v, std::string out);
ElementOp pbs_pm(int photon, std::string in, std::string out_plus, std::string out_minus);
ElementOp pbs_pm_combine(int photon, std::string in_plus, std::string in_minus, std::string out);
ElementOp sigma_x(int photon, std::string path = "");
ElementOp sigma_z(int photon, std::string path = "");
ElementOp wave_plate(int photon, std::string path, const std::array<Complex, 4> &u);
ElementOp pol_phase(int photon, std::string path, double phi);
ElementOp path_phase(int photon, std::string path, double phi);
ElementOp path_switch(int photon, std::string a, std::string b);
ElementOp xpm(int mode, XpmSelector sel, double theta);
ElementOp qubus_phase(int mode, double phi);
ElementOp qubus_bs(int mode_a, int mode_b);
}  // namespace op

}  // namespace qubus

#endif
