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

#include "qubus/elements.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qubus/error.hpp"

namespace qubus {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

struct Image {
    Complex c;
    Slot s;
};

PathId registered(const ModeRegistry &reg, int photon, const std::string &path) {
    PathId p = intern_path(path);
    if (!reg.has_path(photon, p))
        fail(ErrorCode::Registry, "path '" + path + "' is not registered for photon " + std::to_string(photon));
    return p;
}

PathId ensure(ModeRegistry &reg, int photon, const std::string &path) {
    reg.add_path(photon, path);
    return intern_path(path);
}

// Applies a linear map to one photon's slot in every branch. `f` fills the image of a slot and
// returns false to leave the slot untouched.
template <class F>
HybridState map_photon(const HybridState &s, ModeRegistry reg, int photon, F f, bool merge = true) {
    auto idx = reg.photon_index(photon);
    std::vector<Branch> out;
    out.reserve(s.size() * 2);
    std::vector<Image> img;
    for (const auto &b : s.branches()) {
        img.clear();
        if (!f(b.photons[idx], img)) {
            out.push_back(b);
            continue;
        }
        for (const auto &im : img) {
            if (im.c == 0.0) continue;
            Branch nb = b;
            nb.amplitude *= im.c;
            nb.photons[idx] = im.s;
            out.push_back(std::move(nb));
        }
    }
    HybridState r(std::move(reg), std::move(out));
    return merge ? canonicalize(r) : r;
}

void require_norm_kept(const HybridState &before, const HybridState &after, const char *what) {
    double n0 = norm(before);
    double n1 = norm(after);
    if (std::abs(n1 - n0) > 1e-9 * std::max(1.0, n0))
        fail(ErrorCode::Validation, std::string(what) + ": photon is not in the expected input layout (norm " +
                                        std::to_string(n0) + " -> " + std::to_string(n1) + ")");
}

bool on_path(const Slot &s, PathId p, bool all) { return all || s.path == p; }

}  // namespace

const char *element_kind_name(ElementKind k) {
    switch (k) {
        case ElementKind::PhotonBS: return "photon_bs";
        case ElementKind::PhotonMix: return "photon_mix";
        case ElementKind::PBS: return "pbs";
        case ElementKind::PBSCombine: return "pbs_combine";
        case ElementKind::PBSpm: return "pbs_pm";
        case ElementKind::PBSpmCombine: return "pbs_pm_combine";
        case ElementKind::WavePlateX: return "sigma_x";
        case ElementKind::WavePlateZ: return "sigma_z";
        case ElementKind::WavePlateU: return "wave_plate";
        case ElementKind::PolPhase: return "pol_phase";
        case ElementKind::PathPhase: return "path_phase";
        case ElementKind::PathSwitch: return "path_switch";
        case ElementKind::XPM: return "xpm";
        case ElementKind::QubusPhase: return "qubus_phase";
        case ElementKind::QubusBS: return "qubus_bs";
    }
    return "unknown";
}

ElementKind element_kind_from_name(const std::string &name) {
    for (int k = 0; k <= static_cast<int>(ElementKind::QubusBS); ++k) {
        auto kind = static_cast<ElementKind>(k);
        if (name == element_kind_name(kind)) return kind;
    }
    fail(ErrorCode::Parse, "unknown element kind '" + name + "'");
}

std::string describe(const ElementOp &op) {
    std::ostringstream out;
    out << element_kind_name(op.kind);
    if (op.kind == ElementKind::QubusPhase || op.kind == ElementKind::QubusBS) {
        for (int m : op.modes) out << " q" << m;
    } else {
        out << " photon " << op.photon;
        for (const auto &p : op.paths) out << " " << p;
        if (op.pol) out << " " << pol_char(*op.pol);
        if (op.kind == ElementKind::XPM) out << " -> q" << op.modes.at(0);
    }
    if (op.parameter != 0.0) out << " (" << op.parameter << ")";
    return out.str();
}

HybridState photon_bs(const HybridState &s, int photon, const std::string &a, const std::string &b) {
    ModeRegistry reg = s.registry();
    PathId pa = registered(reg, photon, a);
    PathId pb = ensure(reg, photon, b);
    if (pa == pb) fail(ErrorCode::InvalidArgument, "beam splitter needs two distinct paths");
    return map_photon(s, reg, photon, [&](Slot x, std::vector<Image> &img) {
        if (x.path == pa) {
            img = {{kInvSqrt2, {pa, x.pol}}, {kInvSqrt2, {pb, x.pol}}};
        } else if (x.path == pb) {
            img = {{kInvSqrt2, {pa, x.pol}}, {-kInvSqrt2, {pb, x.pol}}};
        } else {
            return false;
        }
        return true;
    });
}

HybridState photon_mix(const HybridState &s, int photon, const std::string &a, const std::string &b, double t) {
    ModeRegistry reg = s.registry();
    PathId pa = registered(reg, photon, a);
    PathId pb = ensure(reg, photon, b);
    if (pa == pb) fail(ErrorCode::InvalidArgument, "mixer needs two distinct paths");
    double c = std::cos(t), sn = std::sin(t);
    return map_photon(s, reg, photon, [&](Slot x, std::vector<Image> &img) {
        if (x.path == pa) {
            img = {{c, {pa, x.pol}}, {sn, {pb, x.pol}}};
        } else if (x.path == pb) {
            img = {{-sn, {pa, x.pol}}, {c, {pb, x.pol}}};
        } else {
            return false;
        }
        return true;
    });
}

HybridState pbs(const HybridState &s, int photon, const std::string &in, const std::string &out_h, const std::string &out_v) {
    ModeRegistry reg = s.registry();
    PathId pin = registered(reg, photon, in);
    PathId ph = ensure(reg, photon, out_h);
    PathId pv = ensure(reg, photon, out_v);
    if (ph == pv) fail(ErrorCode::InvalidArgument, "PBS outputs must differ");
    for (PathId p : {ph, pv}) {
        if (p == pin) continue;
        for (const auto &b : s.branches())
            if (s.slot(b, photon).path == p)
                fail(ErrorCode::Validation, "PBS output path '" + path_name(p) + "' is already occupied");
    }
    return map_photon(
        s, reg, photon,
        [&](Slot x, std::vector<Image> &img) {
            if (x.path != pin) return false;
            img = {{1.0, {x.pol == Pol::H ? ph : pv, x.pol}}};
            return true;
        },
        false);
}

HybridState pbs_combine(const HybridState &s, int photon, const std::string &in_h, const std::string &in_v,
                        const std::string &out) {
    ModeRegistry reg = s.registry();
    PathId ph = registered(reg, photon, in_h);
    PathId pv = registered(reg, photon, in_v);
    PathId po = ensure(reg, photon, out);
    if (ph == pv) fail(ErrorCode::InvalidArgument, "PBS inputs must differ");
    auto r = map_photon(s, reg, photon, [&](Slot x, std::vector<Image> &img) {
        if (x.path == ph) {
            if (x.pol == Pol::H) img = {{1.0, {po, Pol::H}}};
        } else if (x.path == pv) {
            if (x.pol == Pol::V) img = {{1.0, {po, Pol::V}}};
        } else if (x.path == po) {
            fail(ErrorCode::Validation, "PBS output path '" + out + "' is already occupied");
        } else {
            return false;
        }
        return true;
    });
    require_norm_kept(s, r, "pbs_combine");
    return r;
}

HybridState pbs_pm(const HybridState &s, int photon, const std::string &in, const std::string &out_plus,
                   const std::string &out_minus) {
    ModeRegistry reg = s.registry();
    PathId pin = registered(reg, photon, in);
    PathId pp = ensure(reg, photon, out_plus);
    PathId pm = ensure(reg, photon, out_minus);
    if (pp == pm) fail(ErrorCode::InvalidArgument, "PBS outputs must differ");
    for (PathId p : {pp, pm}) {
        if (p == pin) continue;
        for (const auto &b : s.branches())
            if (s.slot(b, photon).path == p)
                fail(ErrorCode::Validation, "PBS output path '" + path_name(p) + "' is already occupied");
    }
    return map_photon(s, reg, photon, [&](Slot x, std::vector<Image> &img) {
        if (x.path != pin) return false;
        double sign = x.pol == Pol::H ? 1.0 : -1.0;
        img = {{0.5, {pp, Pol::H}}, {0.5, {pp, Pol::V}}, {0.5 * sign, {pm, Pol::H}}, {-0.5 * sign, {pm, Pol::V}}};
        return true;
    });
}

HybridState pbs_pm_combine(const HybridState &s, int photon, const std::string &in_plus, const std::string &in_minus,
                           const std::string &out) {
    ModeRegistry reg = s.registry();
    PathId pp = registered(reg, photon, in_plus);
    PathId pm = registered(reg, photon, in_minus);
    PathId po = ensure(reg, photon, out);
    if (pp == pm) fail(ErrorCode::InvalidArgument, "PBS inputs must differ");
    auto r = map_photon(s, reg, photon, [&](Slot x, std::vector<Image> &img) {
        if (x.path == pp) {
            img = {{0.5, {po, Pol::H}}, {0.5, {po, Pol::V}}};
        } else if (x.path == pm) {
            double sign = x.pol == Pol::H ? 1.0 : -1.0;
            img = {{0.5 * sign, {po, Pol::H}}, {-0.5 * sign, {po, Pol::V}}};
        } else if (x.path == po) {
            fail(ErrorCode::Validation, "PBS output path '" + out + "' is already occupied");
        } else {
            return false;
        }
        return true;
    });
    require_norm_kept(s, r, "pbs_pm_combine");
    return r;
}

HybridState sigma_x(const HybridState &s, int photon, const std::string &path) {
    bool all = path.empty();
    PathId p = all ? 0 : registered(s.registry(), photon, path);
    return map_photon(
        s, s.registry(), photon,
        [&](Slot x, std::vector<Image> &img) {
            if (!on_path(x, p, all)) return false;
            img = {{1.0, {x.path, x.pol == Pol::H ? Pol::V : Pol::H}}};
            return true;
        },
        false);
}

HybridState sigma_z(const HybridState &s, int photon, const std::string &path) { return pol_phase(s, photon, path, std::numbers::pi); }

HybridState wave_plate(const HybridState &s, int photon, const std::string &path, const std::array<Complex, 4> &u) {
    bool all = path.empty();
    PathId p = all ? 0 : registered(s.registry(), photon, path);
    return map_photon(s, s.registry(), photon, [&](Slot x, std::vector<Image> &img) {
        if (!on_path(x, p, all)) return false;
        int col = x.pol == Pol::H ? 0 : 1;
        img = {{u[col], {x.path, Pol::H}}, {u[2 + col], {x.path, Pol::V}}};
        return true;
    });
}

HybridState pol_phase(const HybridState &s, int photon, const std::string &path, double phi) {
    bool all = path.empty();
    PathId p = all ? 0 : registered(s.registry(), photon, path);
    Complex f = std::polar(1.0, phi);
    if (phi == std::numbers::pi) f = -1.0;
    return map_photon(
        s, s.registry(), photon,
        [&](Slot x, std::vector<Image> &img) {
            if (!on_path(x, p, all) || x.pol != Pol::V) return false;
            img = {{f, x}};
            return true;
        },
        false);
}

HybridState path_phase(const HybridState &s, int photon, const std::string &path, double phi) {
    PathId p = registered(s.registry(), photon, path);
    Complex f = std::polar(1.0, phi);
    if (phi == std::numbers::pi) f = -1.0;
    return map_photon(
        s, s.registry(), photon,
        [&](Slot x, std::vector<Image> &img) {
            if (x.path != p) return false;
            img = {{f, x}};
            return true;
        },
        false);
}

HybridState path_switch(const HybridState &s, int photon, const std::string &a, const std::string &b) {
    ModeRegistry reg = s.registry();
    PathId pa = ensure(reg, photon, a);
    PathId pb = ensure(reg, photon, b);
    return map_photon(
        s, reg, photon,
        [&](Slot x, std::vector<Image> &img) {
            if (x.path == pa) {
                img = {{1.0, {pb, x.pol}}};
            } else if (x.path == pb) {
                img = {{1.0, {pa, x.pol}}};
            } else {
                return false;
            }
            return true;
        },
        false);
}

HybridState xpm(const HybridState &s, int mode, const XpmSelector &sel, double theta) {
    auto q = s.registry().qubus_index(mode);
    PathId p = registered(s.registry(), sel.photon, sel.path);
    auto idx = s.registry().photon_index(sel.photon);
    Complex f = std::polar(1.0, theta);
    auto branches = s.branches();
    for (auto &b : branches) {
        const Slot &x = b.photons[idx];
        if (x.path == p && (!sel.pol || *sel.pol == x.pol)) b.qubus[q] *= f;
    }
    return HybridState(s.registry(), std::move(branches));
}

HybridState qubus_phase(const HybridState &s, int mode, double phi) {
    auto q = s.registry().qubus_index(mode);
    Complex f = std::polar(1.0, phi);
    auto branches = s.branches();
    for (auto &b : branches) b.qubus[q] *= f;
    return HybridState(s.registry(), std::move(branches));
}

HybridState qubus_bs(const HybridState &s, int mode_a, int mode_b) {
    auto qa = s.registry().qubus_index(mode_a);
    auto qb = s.registry().qubus_index(mode_b);
    if (qa == qb) fail(ErrorCode::InvalidArgument, "qubus beam splitter needs two distinct modes");
    auto branches = s.branches();
    for (auto &b : branches) {
        Complex a1 = b.qubus[qa], a2 = b.qubus[qb];
        b.qubus[qa] = (a1 - a2) * kInvSqrt2;
        b.qubus[qb] = (a1 + a2) * kInvSqrt2;
    }
    return HybridState(s.registry(), std::move(branches));
}

namespace {

const std::string &role(const ElementOp &op, std::size_t i) {
    if (op.paths.size() <= i)
        fail(ErrorCode::InvalidArgument, std::string(element_kind_name(op.kind)) + " is missing path argument " + std::to_string(i + 1));
    return op.paths[i];
}

std::string optional_path(const ElementOp &op) { return op.paths.empty() ? std::string() : op.paths[0]; }

int mode(const ElementOp &op, std::size_t i) {
    if (op.modes.size() <= i)
        fail(ErrorCode::InvalidArgument, std::string(element_kind_name(op.kind)) + " is missing qubus mode " + std::to_string(i + 1));
    return op.modes[i];
}

}  // namespace

HybridState apply_element(const HybridState &s, const ElementOp &o) {
    if (!std::isfinite(o.parameter)) fail(ErrorCode::Numeric, "non-finite element parameter");
    switch (o.kind) {
        case ElementKind::PhotonBS: return photon_bs(s, o.photon, role(o, 0), role(o, 1));
        case ElementKind::PhotonMix: return photon_mix(s, o.photon, role(o, 0), role(o, 1), o.parameter);
        case ElementKind::PBS: return pbs(s, o.photon, role(o, 0), role(o, 1), role(o, 2));
        case ElementKind::PBSCombine: return pbs_combine(s, o.photon, role(o, 0), role(o, 1), role(o, 2));
        case ElementKind::PBSpm: return pbs_pm(s, o.photon, role(o, 0), role(o, 1), role(o, 2));
        case ElementKind::PBSpmCombine: return pbs_pm_combine(s, o.photon, role(o, 0), role(o, 1), role(o, 2));
        case ElementKind::WavePlateX: return sigma_x(s, o.photon, optional_path(o));
        case ElementKind::WavePlateZ: return sigma_z(s, o.photon, optional_path(o));
        case ElementKind::WavePlateU: return wave_plate(s, o.photon, optional_path(o), o.matrix);
        case ElementKind::PolPhase: return pol_phase(s, o.photon, optional_path(o), o.parameter);
        case ElementKind::PathPhase: return path_phase(s, o.photon, role(o, 0), o.parameter);
        case ElementKind::PathSwitch: return path_switch(s, o.photon, role(o, 0), role(o, 1));
        case ElementKind::XPM: return xpm(s, mode(o, 0), XpmSelector{o.photon, role(o, 0), o.pol}, o.parameter);
        case ElementKind::QubusPhase: return qubus_phase(s, mode(o, 0), o.parameter);
        case ElementKind::QubusBS: return qubus_bs(s, mode(o, 0), mode(o, 1));
    }
    fail(ErrorCode::InvalidArgument, "unknown element kind");
}

HybridState apply_elements(const HybridState &s, const std::vector<ElementOp> &ops) {
    HybridState r = s;
    for (const auto &o : ops) r = apply_element(r, o);
    return r;
}

namespace op {

namespace {
ElementOp photonic(ElementKind k, int photon, std::vector<std::string> paths, double parameter = 0.0) {
    ElementOp o;
    o.kind = k;
    o.photon = photon;
    o.paths = std::move(paths);
    o.parameter = parameter;
    return o;
}
std::vector<std::string> maybe(std::string path) {
    if (path.empty()) return {};
    return {std::move(path)};
}
}  // namespace

ElementOp photon_bs(int photon, std::string a, std::string b) { return photonic(ElementKind::PhotonBS, photon, {a, b}); }
ElementOp photon_mix(int photon, std::string a, std::string b, double t) {
    return photonic(ElementKind::PhotonMix, photon, {a, b}, t);
}
ElementOp pbs(int photon, std::string in, std::string out_h, std::string out_v) {
    return photonic(ElementKind::PBS, photon, {in, out_h, out_v});
}
ElementOp pbs_combine(int photon, std::string in_h, std::string in_v, std::string out) {
    return photonic(ElementKind::PBSCombine, photon, {in_h, in_v, out});
}
ElementOp pbs_pm(int photon, std::string in, std::string out_plus, std::string out_minus) {
    return photonic(ElementKind::PBSpm, photon, {in, out_plus, out_minus});
}
ElementOp pbs_pm_combine(int photon, std::string in_plus, std::string in_minus, std::string out) {
    return photonic(ElementKind::PBSpmCombine, photon, {in_plus, in_minus, out});
}
ElementOp sigma_x(int photon, std::string path) { return photonic(ElementKind::WavePlateX, photon, maybe(path)); }
ElementOp sigma_z(int photon, std::string path) { return photonic(ElementKind::WavePlateZ, photon, maybe(path)); }
ElementOp wave_plate(int photon, std::string path, const std::array<Complex, 4> &u) {
    auto o = photonic(ElementKind::WavePlateU, photon, maybe(path));
    o.matrix = u;
    return o;
}
ElementOp pol_phase(int photon, std::string path, double phi) {
    return photonic(ElementKind::PolPhase, photon, maybe(path), phi);
}
ElementOp path_phase(int photon, std::string path, double phi) {
    return photonic(ElementKind::PathPhase, photon, {path}, phi);
}
ElementOp path_switch(int photon, std::string a, std::string b) { return photonic(ElementKind::PathSwitch, photon, {a, b}); }
ElementOp xpm(int mode, XpmSelector sel, double theta) {
    auto o = photonic(ElementKind::XPM, sel.photon, {sel.path}, theta);
    o.pol = sel.pol;
    o.modes = {mode};
    return o;
}
ElementOp qubus_phase(int mode, double phi) {
    ElementOp o;
    o.kind = ElementKind::QubusPhase;
    o.modes = {mode};
    o.parameter = phi;
    return o;
}
ElementOp qubus_bs(int mode_a, int mode_b) {
    ElementOp o;
    o.kind = ElementKind::QubusBS;
    o.modes = {mode_a, mode_b};
    return o;
}

}  // namespace op

}  // namespace qubus
