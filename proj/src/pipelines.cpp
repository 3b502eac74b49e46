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

#include "qubus/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "qubus/error.hpp"
#include "qubus/synthesis.hpp"

namespace qubus {

namespace {

constexpr double kPi = std::numbers::pi;

std::string single_path(const HybridState &s, int photon, const char *role) {
    if (!s.registry().has_photon(photon))
        fail(ErrorCode::Registry, std::string(role) + " photon " + std::to_string(photon) + " is not in the state");
    auto occ = s.occupied_paths(photon);
    if (occ.size() != 1)
        fail(ErrorCode::Validation, std::string(role) + " photon " + std::to_string(photon) + " must occupy a single path");
    return path_name(occ.front());
}

void require_distinct(const std::vector<int> &ids) {
    std::set<int> seen(ids.begin(), ids.end());
    if (seen.size() != ids.size()) fail(ErrorCode::InvalidArgument, "photons must be distinct");
}

void require_scale(std::size_t logical) {
    if (logical > static_cast<std::size_t>(kMaxLogicalPhotons))
        fail(ErrorCode::InvalidArgument, "at most " + std::to_string(kMaxLogicalPhotons) +
                                             " logical photons are supported (state space grows as 2^n paths)");
}

double expectation(const HybridState &s, const HybridState &t) { return std::real(inner_product(s, t)); }

int fresh_photon(const HybridState &s) {
    const auto &ids = s.registry().photon_ids();
    return ids.empty() ? 1 : *std::max_element(ids.begin(), ids.end()) + 1;
}

std::vector<std::string> fresh_paths(ModeRegistry reg, int photon, const std::vector<std::string> &hints) {
    std::vector<std::string> out;
    for (const auto &h : hints) {
        std::string name = reg.fresh_path(h);
        reg.add_path(photon, name);
        out.push_back(name);
    }
    return out;
}

void keep(GateResult &into, GateResult &&from) {
    into.report.absorb(from.report);
    for (auto &o : from.outcome_states) into.outcome_states.push_back(std::move(o));
    into.state = std::move(from.state);
}

GateResult bell_stage(const HybridState &s, int a, int b, const std::string &name,
                      const std::function<std::vector<ElementOp>(BellState)> &ff, const GateParams &p) {
    std::vector<Candidate> candidates;
    for (auto &rec : bell_outcomes(s, a, b, p.probability_floor)) {
        auto st = apply_elements(rec.collapsed, ff(static_cast<BellState>(rec.value)));
        candidates.push_back({bell_name(static_cast<BellState>(rec.value)), rec.probability, std::move(st),
                              {name, rec.kind, rec.value, rec.target, rec.probability, 0.0}});
    }
    GateResult r = settle(name, std::move(candidates), p);
    r.report.resources.bell_measurements = 1;
    return r;
}

bool bell_x(BellState b) { return b == BellState::PsiPlus || b == BellState::PsiMinus; }
bool bell_z(BellState b) { return b == BellState::PhiMinus || b == BellState::PsiMinus; }

struct Split {
    std::string h;
    std::string v;
};

std::vector<XpmSelector> predecessor_selectors(const std::vector<int> &c, const std::vector<Split> &split,
                                               const std::string &first_path, std::size_t i) {
    if (i == 1) return {{c[0], first_path, Pol::H}};
    return {{c[i - 1], split[i - 1].h, std::nullopt}, {c[i - 1], split[i - 1].v, Pol::H}};
}

PhaseCarrier carrier_for(const std::vector<int> &c, const std::vector<Split> &split, std::size_t i) {
    if (i == 0) return {c[0], "", false};
    return {c[i], split[i].v, false};
}

/// Routes the controls so that photon c[n-1] sits on split[n-1].v exactly when every control is V.
GateResult control_chain(const HybridState &s, const std::vector<int> &c, const GateParams &p, CPath3Layout layout,
                         std::vector<Split> &split, std::string &first_path) {
    GateResult out;
    out.state = s;
    first_path = single_path(s, c[0], "control");
    split.assign(c.size(), {});
    if (c.size() < 2) return out;
    std::string p1 = single_path(s, c[1], "control");
    auto r = c_path(s, c[0], c[1], p);
    split[1] = {p1, r.report.paths["v"].front()};
    keep(out, std::move(r));
    for (std::size_t i = 1; i + 1 < c.size(); ++i) {
        std::string t = single_path(out.state, c[i + 1], "control");
        CPath3Spec spec{c[i], split[i].h, split[i].v, c[i + 1], "", layout, {}, ""};
        if (layout == CPath3Layout::SharedMode) spec.shared = predecessor_selectors(c, split, first_path, i);
        auto r3 = c_path3(out.state, spec, p);
        split[i + 1] = {t, r3.report.paths["v"].front()};
        keep(out, std::move(r3));
    }
    return out;
}

/// Moves the controls back onto single paths, top down. Returns the photon carrying each control.
std::vector<int> unwind_controls(GateResult &out, const std::vector<int> &c, const std::vector<Split> &split,
                                 int &recycled, const GateParams &p) {
    std::vector<int> holder(c.size());
    holder[0] = c[0];
    for (std::size_t i = c.size() - 1; i >= 1; --i) {
        auto m = merging(out.state, c[i], split[i].h, split[i].v, recycled, carrier_for(c, split, i - 1), p);
        holder[i] = recycled;
        recycled = c[i];
        keep(out, std::move(m));
    }
    return holder;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

HybridState add_plus_ancilla(const HybridState &s, int *id) {
    int a = fresh_photon(s);
    std::string path = s.registry().fresh_path("a" + std::to_string(a));
    const double h = std::sqrt(0.5);
    if (id) *id = a;
    return tensor(s, HybridState::photon(a, path, h, h));
}

HybridState add_teleport_ancillas(const HybridState &s, int n, TeleportAncillas *out) {
    if (n < 2) fail(ErrorCode::InvalidArgument, "teleportation transform needs at least two photons");
    TeleportAncillas anc;
    const double h = std::sqrt(0.5);
    anc.pair_a = fresh_photon(s);
    anc.pair_b = anc.pair_a + 1;
    std::string pa = s.registry().fresh_path("e" + std::to_string(anc.pair_a));
    std::string pb = s.registry().fresh_path("e" + std::to_string(anc.pair_b));
    auto pair = HybridState::from_terms({{h, {{anc.pair_a, pa, Pol::H}, {anc.pair_b, pb, Pol::H}}},
                                         {h, {{anc.pair_a, pa, Pol::V}, {anc.pair_b, pb, Pol::V}}}});
    HybridState t = tensor(s, pair);
    for (int i = 0; i + 1 < n; ++i) {
        int id = 0;
        t = add_plus_ancilla(t, &id);
        anc.switches.push_back(id);
    }
    if (out) *out = anc;
    return t;
}

namespace {

std::vector<Complex> factor_out(const HybridState &s, const std::vector<int> &photons, std::size_t dim,
                                const std::function<std::optional<std::size_t>(const Branch &)> &index) {
    const auto &reg = s.registry();
    std::vector<std::size_t> idx;
    for (int ph : photons) idx.push_back(reg.photon_index(ph));
    auto rest_of = [&](const Branch &b) {
        std::vector<Slot> r;
        for (std::size_t i = 0; i < b.photons.size(); ++i)
            if (std::find(idx.begin(), idx.end(), i) == idx.end()) r.push_back(b.photons[i]);
        return r;
    };
    const Branch *ref = nullptr;
    for (const auto &b : s.branches())
        if (!ref || std::abs(b.amplitude) > std::abs(ref->amplitude)) ref = &b;
    std::vector<Complex> v(dim, 0.0);
    if (!ref) return v;
    auto ref_rest = rest_of(*ref);
    for (const auto &b : s.branches()) {
        if (rest_of(b) != ref_rest) continue;
        bool same = true;
        for (std::size_t q = 0; q < b.qubus.size(); ++q)
            if (std::abs(b.qubus[q] - ref->qubus[q]) > 1e-9 * (1.0 + std::abs(ref->qubus[q]))) same = false;
        if (!same) continue;
        auto k = index(b);
        if (!k) fail(ErrorCode::Validation, "photon sits outside the listed rails");
        v[*k] += b.amplitude;
    }
    double n = 0.0;
    for (auto c : v) n += std::norm(c);
    n = std::sqrt(n);
    for (auto &c : v) c /= n;
    return v;
}

}  // namespace

std::vector<Complex> logical_amplitudes(const HybridState &s, const std::vector<int> &photons) {
    for (int ph : photons) single_path(s, ph, "logical");
    const auto &reg = s.registry();
    std::vector<std::size_t> idx;
    for (int ph : photons) idx.push_back(reg.photon_index(ph));
    return factor_out(s, photons, std::size_t{1} << photons.size(), [&](const Branch &b) {
        std::size_t k = 0;
        for (auto i : idx) k = (k << 1) | (b.photons[i].pol == Pol::V ? 1 : 0);
        return std::optional<std::size_t>(k);
    });
}

std::vector<Complex> qudit_amplitudes(const HybridState &s, int photon, const std::vector<std::string> &paths) {
    auto i = s.registry().photon_index(photon);
    std::map<PathId, std::size_t> pos;
    for (std::size_t j = 0; j < paths.size(); ++j) pos[intern_path(paths[j])] = j;
    return factor_out(s, {photon}, 2 * paths.size(), [&](const Branch &b) -> std::optional<std::size_t> {
        auto it = pos.find(b.photons[i].path);
        if (it == pos.end()) return std::nullopt;
        return 2 * it->second + (b.photons[i].pol == Pol::V ? 1 : 0);
    });
}

HybridState restricted_unitary(const HybridState &s, const std::vector<int> &photons, const std::vector<std::string> &rails,
                               const Eigen::MatrixXcd &u) {
    const std::size_t k = photons.size();
    if (k == 0 || rails.size() != k) fail(ErrorCode::InvalidArgument, "restricted unitary needs one rail per photon");
    if (u.rows() != (1L << k)) fail(ErrorCode::InvalidArgument, "restricted unitary dimension must be 2^k");
    require_unitary(u);
    const auto &reg = s.registry();
    std::vector<std::size_t> idx;
    std::vector<PathId> rail;
    for (std::size_t i = 0; i < k; ++i) {
        idx.push_back(reg.photon_index(photons[i]));
        rail.push_back(intern_path(rails[i]));
        if (!reg.has_path(photons[i], rail.back()))
            fail(ErrorCode::Registry, "path '" + rails[i] + "' is not registered for photon " + std::to_string(photons[i]));
    }
    std::vector<Branch> out;
    for (const auto &b : s.branches()) {
        bool on = true;
        for (std::size_t i = 0; i < k; ++i) on = on && b.photons[idx[i]].path == rail[i];
        if (!on) {
            out.push_back(b);
            continue;
        }
        long in = 0;
        for (std::size_t i = 0; i < k; ++i) in = (in << 1) | (b.photons[idx[i]].pol == Pol::V ? 1 : 0);
        for (long o = 0; o < u.rows(); ++o) {
            Complex c = u(o, in);
            if (c == 0.0) continue;
            Branch nb = b;
            nb.amplitude *= c;
            for (std::size_t i = 0; i < k; ++i)
                nb.photons[idx[i]].pol = (o >> (k - 1 - i) & 1) ? Pol::V : Pol::H;
            out.push_back(std::move(nb));
        }
    }
    return canonicalize(HybridState(reg, std::move(out)));
}

// ---------------------------------------------------------------------------------------------

GateResult to_qudit_circuit(const HybridState &s, const std::vector<int> &photons, const GateParams &p) {
    const std::size_t n = photons.size();
    if (n < 2) fail(ErrorCode::InvalidArgument, "the qudit transform needs at least two photons");
    require_scale(n);
    require_distinct(photons);
    for (int ph : photons) single_path(s, ph, "input");
    GateResult out;
    out.report.gate = "to_qudit_circuit";
    out.state = s;
    const int q = photons.back();
    std::vector<std::string> paths{single_path(s, q, "input")};

    auto r = c_path(out.state, photons[n - 2], q, p);
    std::string v = r.report.paths["v"].front();
    keep(out, std::move(r));
    paths.push_back(v);
    keep(out, disentangler(out.state, photons[n - 2], q, {v}, p));

    for (std::size_t c = n - 2; c-- > 0;) {
        auto r2 = c_path2(out.state, photons[c], q, paths, p);
        auto moved = r2.report.paths["v"];
        keep(out, std::move(r2));
        keep(out, disentangler(out.state, photons[c], q, moved, p));
        paths.insert(paths.end(), moved.begin(), moved.end());
    }
    out.report.paths["qudit"] = paths;
    out.report.photons["qudit"] = {q};
    out.report.photons["companions"] = std::vector<int>(photons.begin(), photons.end() - 1);
    return out;
}

GateResult to_qudit_teleport(const HybridState &s, const std::vector<int> &photons, const TeleportAncillas &anc,
                             const GateParams &p) {
    const std::size_t n = photons.size();
    if (n < 2) fail(ErrorCode::InvalidArgument, "the qudit transform needs at least two photons");
    require_scale(n);
    if (anc.switches.size() != n - 1)
        fail(ErrorCode::InvalidArgument, "teleportation needs " + std::to_string(n - 1) + " switch photons, got " +
                                             std::to_string(anc.switches.size()));
    std::vector<int> all = photons;
    all.push_back(anc.pair_a);
    all.push_back(anc.pair_b);
    all.insert(all.end(), anc.switches.begin(), anc.switches.end());
    require_distinct(all);
    for (int ph : all) single_path(s, ph, "teleportation");
    {
        HybridState u = normalize(s);
        auto xx = sigma_x(sigma_x(u, anc.pair_a), anc.pair_b);
        auto zz = sigma_z(sigma_z(u, anc.pair_a), anc.pair_b);
        if (std::abs(expectation(u, xx) - 1.0) > 1e-9 || std::abs(expectation(u, zz) - 1.0) > 1e-9)
            fail(ErrorCode::Validation, "photons " + std::to_string(anc.pair_a) + "," + std::to_string(anc.pair_b) +
                                            " are not in |Phi+>");
        for (int sw : anc.switches) {
            auto x = sigma_x(u, sw);
            if (std::abs(expectation(u, x) - 1.0) > 1e-9)
                fail(ErrorCode::Validation, "switch photon " + std::to_string(sw) + " is not in |+>");
        }
    }

    GateResult out;
    out.report.gate = "to_qudit_teleport";
    out.state = s;
    const int q = anc.pair_a;
    std::vector<std::string> paths{single_path(s, q, "pair")};
    auto r = c_path(out.state, anc.switches[0], q, p);
    paths.push_back(r.report.paths["v"].front());
    keep(out, std::move(r));
    for (std::size_t i = 1; i + 1 < n; ++i) {
        auto r2 = c_path2(out.state, anc.switches[i], q, paths, p);
        auto moved = r2.report.paths["v"];
        keep(out, std::move(r2));
        std::vector<std::string> next;
        for (std::size_t j = 0; j < paths.size(); ++j) {
            next.push_back(paths[j]);
            next.push_back(moved[j]);
        }
        paths = next;
    }

    const std::size_t dim = paths.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t mask = std::size_t{1} << (n - 2 - i);
        auto ff = [=](BellState b) {
            std::vector<ElementOp> ops;
            if (bell_x(b))
                for (std::size_t j = 0; j < dim; ++j)
                    if (!(j & mask)) ops.push_back(op::path_switch(q, paths[j], paths[j | mask]));
            if (bell_z(b))
                for (std::size_t j = 0; j < dim; ++j)
                    if (j & mask) ops.push_back(op::path_phase(q, paths[j], kPi));
            return ops;
        };
        keep(out, bell_stage(out.state, photons[i], anc.switches[i], "bell", ff, p));
    }
    auto last = [=](BellState b) {
        std::vector<ElementOp> ops;
        if (bell_x(b)) ops.push_back(op::sigma_x(q));
        if (bell_z(b)) ops.push_back(op::sigma_z(q));
        return ops;
    };
    keep(out, bell_stage(out.state, photons[n - 1], anc.pair_b, "bell", last, p));
    out.report.resources.ancilla_photons = static_cast<int>(n + 1);
    out.report.paths["qudit"] = paths;
    out.report.photons["qudit"] = {q};
    return out;
}

GateResult from_qudit(const HybridState &s, int qudit, const std::vector<std::string> &paths,
                      const std::vector<int> &companions, const GateParams &p, std::optional<int> ancilla,
                      std::optional<Eigen::MatrixXcd> interference) {
    const std::size_t m = companions.size();
    if (m < 1) fail(ErrorCode::InvalidArgument, "the inverse transform needs at least one companion photon");
    require_scale(m + 1);
    if (paths.size() != (std::size_t{1} << m))
        fail(ErrorCode::InvalidArgument, "a qudit with " + std::to_string(m) + " companions spans " +
                                             std::to_string(1u << m) + " paths, got " + std::to_string(paths.size()));
    std::vector<int> all = companions;
    all.push_back(qudit);
    require_distinct(all);

    GateResult out;
    out.report.gate = "from_qudit";
    out.state = s;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t shift = m - 1 - i;
        EntanglerArgs a;
        a.photon = companions[i];
        a.target = qudit;
        for (std::size_t j = 0; j < paths.size(); ++j) (j >> shift & 1 ? a.group1 : a.group0).push_back(paths[j]);
        keep(out, entangler(out.state, m == 1 ? 2 : 3, a, p));
    }
    int anc = 0;
    if (ancilla) {
        anc = *ancilla;
    } else {
        out.state = add_plus_ancilla(out.state, &anc);
    }
    std::vector<PhaseCarrier> carriers;
    for (int c : companions) carriers.push_back({c, "", false});
    keep(out, merging_n(out.state, qudit, paths, anc, carriers, p, interference));
    std::vector<int> logical = companions;
    logical.push_back(anc);
    out.report.photons["logical"] = logical;
    out.report.photons["recycled"] = {qudit};
    return out;
}

GateResult multi_qubit_gate(const HybridState &s, const std::vector<int> &photons, const Eigen::MatrixXcd &u,
                            const GateParams &p, std::optional<int> ancilla, std::optional<Eigen::MatrixXcd> interference) {
    const std::size_t n = photons.size();
    if (n < 2) fail(ErrorCode::InvalidArgument, "a multi-qubit gate needs at least two photons");
    require_scale(n);
    if (u.rows() != (1L << n) || u.cols() != u.rows())
        fail(ErrorCode::InvalidArgument, "gate matrix must be " + std::to_string(1 << n) + " x " + std::to_string(1 << n));
    require_unitary(u);

    GateResult out = to_qudit_circuit(s, photons, p);
    out.report.gate = n == 2 ? "two_qubit_gate" : "multi_qubit_gate";
    const int q = photons.back();
    const auto paths = out.report.paths["qudit"];
    std::vector<std::string> hints;
    for (const auto &x : paths) hints.push_back(x + "v");
    auto rails = fresh_paths(out.state.registry(), q, hints);
    std::vector<ElementOp> split, join;
    std::vector<std::string> order;
    for (std::size_t j = 0; j < paths.size(); ++j) {
        split.push_back(op::pbs(q, paths[j], paths[j], rails[j]));
        split.push_back(op::sigma_x(q, rails[j]));
        join.push_back(op::sigma_x(q, rails[j]));
        join.push_back(op::pbs_combine(q, paths[j], rails[j], paths[j]));
        order.push_back(paths[j]);
        order.push_back(rails[j]);
    }
    HybridState t = apply_elements(out.state, split);
    t = mesh_apply(t, q, order, reck_decompose(u));
    out.state = apply_elements(t, join);
    out.report.resources.lomis += 1;

    std::vector<int> companions(photons.begin(), photons.end() - 1);
    auto back = from_qudit(out.state, q, paths, companions, p, ancilla, interference);
    out.report.photons = back.report.photons;
    keep(out, std::move(back));
    out.report.paths.clear();
    return out;
}

GateResult two_qubit_gate(const HybridState &s, int photon1, int photon2, const Eigen::MatrixXcd &u, const GateParams &p,
                          std::optional<int> ancilla) {
    return multi_qubit_gate(s, {photon1, photon2}, u, p, ancilla);
}

GateResult cn_uk(const HybridState &s, const std::vector<int> &controls, const std::vector<int> &targets,
                 const Eigen::MatrixXcd &uk, const GateParams &p, CPath3Layout layout) {
    const std::size_t n = controls.size(), k = targets.size();
    if (n < 1 || k < 1) fail(ErrorCode::InvalidArgument, "a controlled gate needs controls and targets");
    require_scale(n + k);
    std::vector<int> all = controls;
    all.insert(all.end(), targets.begin(), targets.end());
    require_distinct(all);
    for (int ph : all) single_path(s, ph, "input");
    if (uk.rows() != (1L << k) || uk.cols() != uk.rows())
        fail(ErrorCode::InvalidArgument, "target unitary must be " + std::to_string(1 << k) + " x " + std::to_string(1 << k));
    require_unitary(uk);

    std::vector<Split> split;
    std::string first_path;
    GateResult out = control_chain(s, controls, p, layout, split, first_path);
    out.report.gate = k == 1 ? "cn_u1" : "cn_uk";

    const std::size_t last = n - 1;
    std::vector<Split> tsplit(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::string t = single_path(out.state, targets[j], "target");
        GateResult r;
        if (n == 1) {
            r = c_path(out.state, controls[0], targets[j], p);
        } else {
            CPath3Spec spec{controls[last], split[last].h, split[last].v, targets[j], "", layout, {}, ""};
            if (layout == CPath3Layout::SharedMode) spec.shared = predecessor_selectors(controls, split, first_path, last);
            r = c_path3(out.state, spec, p);
        }
        tsplit[j] = {t, r.report.paths["v"].front()};
        keep(out, std::move(r));
    }

    std::vector<std::string> rails;
    for (const auto &t : tsplit) rails.push_back(t.v);
    if (k == 1) {
        std::array<Complex, 4> m{uk(0, 0), uk(0, 1), uk(1, 0), uk(1, 1)};
        out.state = wave_plate(out.state, targets[0], rails[0], m);
    } else {
        out.state = restricted_unitary(out.state, targets, rails, uk);
        out.report.resources.restricted_unitaries += 1;
    }

    int recycled = 0;
    out.state = add_plus_ancilla(out.state, &recycled);
    const PhaseCarrier marker = carrier_for(controls, split, last);
    std::vector<int> target_holder(k);
    for (std::size_t j = 0; j < k; ++j) {
        auto m = merging(out.state, targets[j], tsplit[j].h, tsplit[j].v, recycled, marker, p);
        target_holder[j] = recycled;
        recycled = targets[j];
        keep(out, std::move(m));
    }
    auto holder = unwind_controls(out, controls, split, recycled, p);
    holder.insert(holder.end(), target_holder.begin(), target_holder.end());
    out.report.resources.ancilla_photons = 1;
    out.report.photons["logical"] = holder;
    out.report.photons["recycled"] = {recycled};
    out.report.paths.clear();
    return out;
}

GateResult cn_u1(const HybridState &s, const std::vector<int> &controls, int target, const Eigen::Matrix2cd &u1,
                 const GateParams &p, CPath3Layout layout) {
    auto r = cn_uk(s, controls, {target}, Eigen::MatrixXcd(u1), p, layout);
    r.report.gate = "cn_u1";
    return r;
}

GateResult toffoli(const HybridState &s, const std::vector<int> &controls, int target, const GateParams &p,
                   CPath3Layout layout) {
    Eigen::Matrix2cd x;
    x << 0, 1, 1, 0;
    auto r = cn_u1(s, controls, target, x, p, layout);
    r.report.gate = "toffoli";
    return r;
}

}  // namespace qubus
