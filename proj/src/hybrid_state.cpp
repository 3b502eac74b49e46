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

#include "qubus/hybrid_state.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "qubus/error.hpp"
#include "state_internal.hpp"

namespace qubus {

namespace {

struct PathTable {
    std::shared_mutex mutex;
    std::unordered_map<std::string, PathId> ids;
    std::deque<std::string> names;
};

PathTable &path_table() {
    static PathTable table;
    return table;
}

double qubus_scale(Complex q) { return std::max(1.0, std::abs(q)); }

}  // namespace

char pol_char(Pol p) { return p == Pol::H ? 'H' : 'V'; }

Pol pol_from_char(char c) {
    if (c == 'H' || c == 'h') return Pol::H;
    if (c == 'V' || c == 'v') return Pol::V;
    fail(ErrorCode::Parse, std::string("unknown polarization '") + c + "'");
}

PathId intern_path(std::string_view name) {
    if (name.empty()) fail(ErrorCode::InvalidArgument, "empty path name");
    auto &t = path_table();
    std::string key(name);
    {
        std::shared_lock lock(t.mutex);
        auto it = t.ids.find(key);
        if (it != t.ids.end()) return it->second;
    }
    std::unique_lock lock(t.mutex);
    auto it = t.ids.find(key);
    if (it != t.ids.end()) return it->second;
    auto id = static_cast<PathId>(t.names.size());
    t.names.push_back(key);
    t.ids.emplace(key, id);
    return id;
}

const std::string &path_name(PathId id) {
    auto &t = path_table();
    std::shared_lock lock(t.mutex);
    if (id >= t.names.size()) fail(ErrorCode::InvalidArgument, "unknown path id " + std::to_string(id));
    return t.names[id];
}

// ---------------------------------------------------------------------------------------------
// ModeRegistry

void ModeRegistry::add_photon(int id) {
    auto it = std::lower_bound(photon_ids_.begin(), photon_ids_.end(), id);
    if (it != photon_ids_.end() && *it == id) fail(ErrorCode::Registry, "photon " + std::to_string(id) + " already registered");
    auto pos = it - photon_ids_.begin();
    photon_ids_.insert(it, id);
    paths_.insert(paths_.begin() + pos, std::vector<PathId>{});
}

void ModeRegistry::add_path(int photon_id, std::string_view path) {
    PathId pid = intern_path(path);
    auto own = owner(pid);
    if (own) {
        if (*own == photon_id) return;
        fail(ErrorCode::Registry, "path '" + std::string(path) + "' already belongs to photon " + std::to_string(*own));
    }
    paths_[photon_index(photon_id)].push_back(pid);
}

void ModeRegistry::remove_photon(int id) {
    auto idx = photon_index(id);
    photon_ids_.erase(photon_ids_.begin() + idx);
    paths_.erase(paths_.begin() + idx);
}

bool ModeRegistry::has_photon(int id) const { return std::binary_search(photon_ids_.begin(), photon_ids_.end(), id); }

std::size_t ModeRegistry::photon_index(int id) const {
    auto it = std::lower_bound(photon_ids_.begin(), photon_ids_.end(), id);
    if (it == photon_ids_.end() || *it != id) fail(ErrorCode::Registry, "unknown photon " + std::to_string(id));
    return static_cast<std::size_t>(it - photon_ids_.begin());
}

const std::vector<PathId> &ModeRegistry::paths(int photon_id) const { return paths_[photon_index(photon_id)]; }

bool ModeRegistry::has_path(int photon_id, PathId path) const {
    const auto &p = paths(photon_id);
    return std::find(p.begin(), p.end(), path) != p.end();
}

std::optional<int> ModeRegistry::owner(PathId path) const {
    for (std::size_t i = 0; i < photon_ids_.size(); ++i) {
        if (std::find(paths_[i].begin(), paths_[i].end(), path) != paths_[i].end()) return photon_ids_[i];
    }
    return std::nullopt;
}

std::optional<int> ModeRegistry::owner(std::string_view path) const { return owner(intern_path(path)); }

std::string ModeRegistry::fresh_path(std::string_view hint) const {
    std::string base(hint);
    if (!owner(base)) return base;
    for (int k = 2;; ++k) {
        std::string candidate = base + "_" + std::to_string(k);
        if (!owner(candidate)) return candidate;
    }
}

int ModeRegistry::add_qubus_mode() {
    int id = 0;
    for (int q : qubus_) id = std::max(id, q + 1);
    qubus_.push_back(id);
    return id;
}

void ModeRegistry::add_qubus_mode(int id) {
    if (has_qubus(id)) fail(ErrorCode::Registry, "qubus mode " + std::to_string(id) + " already registered");
    qubus_.push_back(id);
}

void ModeRegistry::remove_qubus_mode(int id) { qubus_.erase(qubus_.begin() + static_cast<long>(qubus_index(id))); }

bool ModeRegistry::has_qubus(int id) const { return std::find(qubus_.begin(), qubus_.end(), id) != qubus_.end(); }

std::size_t ModeRegistry::qubus_index(int id) const {
    auto it = std::find(qubus_.begin(), qubus_.end(), id);
    if (it == qubus_.end()) fail(ErrorCode::Registry, "unknown qubus mode " + std::to_string(id));
    return static_cast<std::size_t>(it - qubus_.begin());
}

bool ModeRegistry::compatible(const ModeRegistry &other) const {
    return photon_ids_ == other.photon_ids_ && qubus_ == other.qubus_;
}

// ---------------------------------------------------------------------------------------------
// HybridState

HybridState::HybridState() { branches_.push_back(Branch{Complex(1.0), {}, {}}); }

HybridState::HybridState(ModeRegistry registry, std::vector<Branch> branches)
    : registry_(std::move(registry)), branches_(std::move(branches)) {
    const auto &ids = registry_.photon_ids();
    for (const auto &b : branches_) {
        if (b.photons.size() != ids.size()) fail(ErrorCode::Registry, "branch photon count does not match registry");
        if (b.qubus.size() != registry_.qubus_modes().size())
            fail(ErrorCode::Registry, "branch qubus count does not match registry");
        if (!std::isfinite(b.amplitude.real()) || !std::isfinite(b.amplitude.imag()))
            fail(ErrorCode::Numeric, "non-finite branch amplitude");
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (!registry_.has_path(ids[i], b.photons[i].path))
                fail(ErrorCode::Registry, "path '" + path_name(b.photons[i].path) + "' is not registered for photon " +
                                              std::to_string(ids[i]));
        }
    }
}

HybridState HybridState::photon(int id, std::string_view path, Complex h, Complex v) {
    ModeRegistry reg;
    reg.add_photon(id);
    reg.add_path(id, path);
    PathId p = intern_path(path);
    std::vector<Branch> branches;
    if (h != 0.0) branches.push_back(Branch{h, {Slot{p, Pol::H}}, {}});
    if (v != 0.0) branches.push_back(Branch{v, {Slot{p, Pol::V}}, {}});
    return HybridState(std::move(reg), std::move(branches));
}

HybridState HybridState::coherent(int mode, Complex alpha) {
    ModeRegistry reg;
    reg.add_qubus_mode(mode);
    return HybridState(std::move(reg), {Branch{Complex(1.0), {}, {alpha}}});
}

HybridState HybridState::from_terms(const std::vector<Term> &terms) {
    ModeRegistry reg;
    for (const auto &t : terms) {
        for (const auto &l : t.photons) {
            if (!reg.has_photon(l.photon_id)) reg.add_photon(l.photon_id);
            reg.add_path(l.photon_id, l.path);
        }
    }
    std::vector<Branch> branches;
    for (const auto &t : terms) {
        if (t.photons.size() != reg.photon_ids().size())
            fail(ErrorCode::InvalidArgument, "every term must label every photon exactly once");
        Branch b{t.amplitude, std::vector<Slot>(t.photons.size()), {}};
        std::vector<bool> seen(t.photons.size(), false);
        for (const auto &l : t.photons) {
            auto idx = reg.photon_index(l.photon_id);
            if (seen[idx]) fail(ErrorCode::InvalidArgument, "photon " + std::to_string(l.photon_id) + " labelled twice");
            seen[idx] = true;
            b.photons[idx] = Slot{intern_path(l.path), l.pol};
        }
        branches.push_back(std::move(b));
    }
    return HybridState(std::move(reg), std::move(branches));
}

HybridState HybridState::polarization(const std::vector<int> &ids, const std::vector<std::string> &paths,
                                      const std::vector<Complex> &coefficients) {
    if (ids.size() != paths.size()) fail(ErrorCode::InvalidArgument, "photon and path lists differ in length");
    std::size_t n = ids.size();
    if (n >= 20 || coefficients.size() != (std::size_t{1} << n))
        fail(ErrorCode::InvalidArgument, "expected " + std::to_string(std::size_t{1} << n) + " coefficients");
    std::vector<Term> terms;
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        Term t{coefficients[k], {}};
        for (std::size_t i = 0; i < n; ++i) {
            bool v = (k >> (n - 1 - i)) & 1U;
            t.photons.push_back(PhotonLabel{ids[i], paths[i], v ? Pol::V : Pol::H});
        }
        terms.push_back(std::move(t));
    }
    return canonicalize(from_terms(terms), 0.0);
}

const Slot &HybridState::slot(const Branch &b, int photon_id) const { return b.photons[registry_.photon_index(photon_id)]; }

std::vector<PathId> HybridState::occupied_paths(int photon_id, double tol) const {
    auto idx = registry_.photon_index(photon_id);
    std::vector<PathId> out;
    for (PathId p : registry_.paths(photon_id)) {
        for (const auto &b : branches_) {
            if (b.photons[idx].path == p && std::abs(b.amplitude) > tol) {
                out.push_back(p);
                break;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Algebra

Complex coherent_overlap(Complex a, Complex b) {
    // <a|b> = exp(-|a-b|^2/2 + i Im(conj(a) b))
    double d = std::norm(a - b);
    double phase = std::imag(std::conj(a) * b);
    return std::polar(std::exp(-0.5 * d), phase);
}

namespace detail {

Complex qubus_overlap(const std::vector<Complex> &a, const std::vector<Complex> &b) {
    Complex r(1.0);
    for (std::size_t i = 0; i < a.size(); ++i) r *= coherent_overlap(a[i], b[i]);
    return r;
}

std::size_t SlotsHash::operator()(const std::vector<Slot> &v) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (const auto &s : v) {
        h ^= (static_cast<std::size_t>(s.path) << 1) ^ static_cast<std::size_t>(s.pol);
        h *= 1099511628211ULL;
    }
    return h;
}

bool qubus_close(const std::vector<Complex> &a, const std::vector<Complex> &b, double tol) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > tol * qubus_scale(a[i])) return false;
    }
    return true;
}

}  // namespace detail

Complex inner_product(const HybridState &a, const HybridState &b) {
    if (!a.registry().compatible(b.registry())) fail(ErrorCode::Registry, "inner product of states over different modes");
    std::unordered_map<std::vector<Slot>, std::vector<std::size_t>, detail::SlotsHash> groups;
    const auto &bb = b.branches();
    for (std::size_t j = 0; j < bb.size(); ++j) groups[bb[j].photons].push_back(j);
    Complex total(0.0);
    for (const auto &x : a.branches()) {
        auto it = groups.find(x.photons);
        if (it == groups.end()) continue;
        for (auto j : it->second) {
            total += std::conj(x.amplitude) * bb[j].amplitude * detail::qubus_overlap(x.qubus, bb[j].qubus);
        }
    }
    return total;
}

double norm(const HybridState &s) { return std::sqrt(std::max(0.0, inner_product(s, s).real())); }

HybridState scale(const HybridState &s, Complex factor) {
    auto branches = s.branches();
    for (auto &b : branches) b.amplitude *= factor;
    return HybridState(s.registry(), std::move(branches));
}

HybridState normalize(const HybridState &s) {
    double n = norm(s);
    if (!(n > 1e-300)) fail(ErrorCode::Numeric, "cannot normalize a zero state");
    return scale(s, 1.0 / n);
}

HybridState superpose(const HybridState &a, const HybridState &b) {
    if (!a.registry().compatible(b.registry())) fail(ErrorCode::Registry, "superposition of states over different modes");
    ModeRegistry reg = a.registry();
    for (int id : reg.photon_ids()) {
        for (PathId p : b.registry().paths(id)) reg.add_path(id, path_name(p));
    }
    auto branches = a.branches();
    branches.insert(branches.end(), b.branches().begin(), b.branches().end());
    return canonicalize(HybridState(std::move(reg), std::move(branches)), 0.0);
}

namespace {

void require_normalized(const HybridState &s, const char *which) {
    double n = norm(s);
    if (std::abs(n - 1.0) > 1e-8)
        fail(ErrorCode::Numeric, std::string("fidelity needs normalized states; ") + which + " has norm " + std::to_string(n));
}

bool subset_of(const ModeRegistry &small, const ModeRegistry &big) {
    for (int id : small.photon_ids())
        if (!big.has_photon(id)) return false;
    for (int q : small.qubus_modes())
        if (!big.has_qubus(q)) return false;
    return true;
}

// <t| (x) I |s> = sum_i w_i |R_i>, returns ||.||^2
double reduced_fidelity(const HybridState &s, const HybridState &t) {
    const auto &sr = s.registry();
    const auto &tr = t.registry();
    std::vector<std::size_t> keep_photon, rest_photon, keep_qubus, rest_qubus;
    for (std::size_t i = 0; i < sr.photon_ids().size(); ++i) {
        (tr.has_photon(sr.photon_ids()[i]) ? keep_photon : rest_photon).push_back(i);
    }
    for (std::size_t i = 0; i < sr.qubus_modes().size(); ++i) {
        (tr.has_qubus(sr.qubus_modes()[i]) ? keep_qubus : rest_qubus).push_back(i);
    }
    // target qubus order follows the target registry
    std::vector<std::size_t> target_qubus_index;
    for (auto i : keep_qubus) target_qubus_index.push_back(tr.qubus_index(sr.qubus_modes()[i]));

    std::unordered_map<std::vector<Slot>, std::vector<std::size_t>, detail::SlotsHash> tgroups;
    for (std::size_t j = 0; j < t.size(); ++j) tgroups[t.branches()[j].photons].push_back(j);

    struct Rest {
        Complex w;
        std::vector<Slot> photons;
        std::vector<Complex> qubus;
    };
    std::map<std::vector<Slot>, std::vector<Rest>> rest_groups;
    for (const auto &b : s.branches()) {
        std::vector<Slot> key;
        for (auto i : keep_photon) key.push_back(b.photons[i]);
        auto it = tgroups.find(key);
        if (it == tgroups.end()) continue;
        Complex w(0.0);
        for (auto j : it->second) {
            const auto &tb = t.branches()[j];
            Complex ov(1.0);
            for (std::size_t k = 0; k < keep_qubus.size(); ++k)
                ov *= coherent_overlap(tb.qubus[target_qubus_index[k]], b.qubus[keep_qubus[k]]);
            w += std::conj(tb.amplitude) * ov;
        }
        w *= b.amplitude;
        Rest r{w, {}, {}};
        for (auto i : rest_photon) r.photons.push_back(b.photons[i]);
        for (auto i : rest_qubus) r.qubus.push_back(b.qubus[i]);
        rest_groups[r.photons].push_back(std::move(r));
    }
    double total = 0.0;
    for (const auto &[key, items] : rest_groups) {
        for (const auto &x : items)
            for (const auto &y : items) total += (std::conj(x.w) * y.w * detail::qubus_overlap(x.qubus, y.qubus)).real();
    }
    return total;
}

}  // namespace

double fidelity(const HybridState &a, const HybridState &b) {
    require_normalized(a, "first state");
    require_normalized(b, "second state");
    double f;
    if (a.registry().compatible(b.registry())) {
        f = std::norm(inner_product(a, b));
    } else if (subset_of(b.registry(), a.registry())) {
        f = reduced_fidelity(a, b);
    } else if (subset_of(a.registry(), b.registry())) {
        f = reduced_fidelity(b, a);
    } else {
        fail(ErrorCode::Registry, "fidelity of states over unrelated modes");
    }
    return std::clamp(f, 0.0, 1.0);
}

HybridState canonicalize(const HybridState &s, double tol) {
    if (tol < 0) fail(ErrorCode::InvalidArgument, "negative canonicalization tolerance");
    std::map<std::vector<Slot>, std::vector<Branch>> groups;
    for (const auto &b : s.branches()) {
        auto &group = groups[b.photons];
        bool merged = false;
        for (auto &g : group) {
            if (detail::qubus_close(g.qubus, b.qubus, tol)) {
                g.amplitude += b.amplitude;
                merged = true;
                break;
            }
        }
        if (!merged) group.push_back(b);
    }
    std::vector<Branch> out;
    for (auto &[key, group] : groups) {
        for (auto &g : group) {
            if (std::abs(g.amplitude) > tol || (tol == 0.0 && g.amplitude != 0.0)) out.push_back(std::move(g));
        }
    }
    return HybridState(s.registry(), std::move(out));
}

HybridState tensor(const HybridState &a, const HybridState &b) {
    const auto &ra = a.registry();
    const auto &rb = b.registry();
    ModeRegistry reg;
    for (int id : ra.photon_ids()) {
        if (rb.has_photon(id)) fail(ErrorCode::Registry, "photon " + std::to_string(id) + " present in both factors");
        reg.add_photon(id);
        for (PathId p : ra.paths(id)) reg.add_path(id, path_name(p));
    }
    for (int id : rb.photon_ids()) {
        reg.add_photon(id);
        for (PathId p : rb.paths(id)) reg.add_path(id, path_name(p));
    }
    for (int q : ra.qubus_modes()) reg.add_qubus_mode(q);
    for (int q : rb.qubus_modes()) {
        if (ra.has_qubus(q)) fail(ErrorCode::Registry, "qubus mode " + std::to_string(q) + " present in both factors");
        reg.add_qubus_mode(q);
    }
    // position of each merged photon in its source factor
    std::vector<std::pair<int, std::size_t>> source;
    for (int id : reg.photon_ids()) {
        if (ra.has_photon(id))
            source.emplace_back(0, ra.photon_index(id));
        else
            source.emplace_back(1, rb.photon_index(id));
    }
    std::vector<Branch> out;
    out.reserve(a.size() * b.size());
    for (const auto &x : a.branches()) {
        for (const auto &y : b.branches()) {
            Branch br{x.amplitude * y.amplitude, {}, x.qubus};
            br.photons.reserve(source.size());
            for (auto [f, i] : source) br.photons.push_back(f == 0 ? x.photons[i] : y.photons[i]);
            br.qubus.insert(br.qubus.end(), y.qubus.begin(), y.qubus.end());
            out.push_back(std::move(br));
        }
    }
    return HybridState(std::move(reg), std::move(out));
}

HybridState add_qubus(const HybridState &s, Complex alpha, int *mode) {
    ModeRegistry reg = s.registry();
    int id = reg.add_qubus_mode();
    auto branches = s.branches();
    for (auto &b : branches) b.qubus.push_back(alpha);
    if (mode) *mode = id;
    return HybridState(std::move(reg), std::move(branches));
}

HybridState release_qubus(const HybridState &s, int mode, bool *released, double tol) {
    auto idx = s.registry().qubus_index(mode);
    const auto &br = s.branches();
    bool factors = true;
    for (const auto &b : br) {
        if (std::abs(b.qubus[idx] - br.front().qubus[idx]) > tol * qubus_scale(br.front().qubus[idx])) {
            factors = false;
            break;
        }
    }
    if (released) *released = factors;
    if (!factors) return s;
    ModeRegistry reg = s.registry();
    reg.remove_qubus_mode(mode);
    auto branches = br;
    for (auto &b : branches) b.qubus.erase(b.qubus.begin() + static_cast<long>(idx));
    return canonicalize(HybridState(std::move(reg), std::move(branches)));
}

}  // namespace qubus
