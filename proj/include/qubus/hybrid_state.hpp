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

#ifndef QUBUS_HYBRID_STATE_HPP
#define QUBUS_HYBRID_STATE_HPP

#include <complex>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qubus {

using Complex = std::complex<double>;

enum class Pol : std::uint8_t { H = 0, V = 1 };

char pol_char(Pol p);
Pol pol_from_char(char c);

/// Interned path name. Ids are stable for the lifetime of the process.
using PathId = std::uint32_t;
PathId intern_path(std::string_view name);
const std::string &path_name(PathId id);

/// The (path, polarization) slot held by one photon inside a branch.
struct Slot {
    PathId path;
    Pol pol;
    friend auto operator<=>(const Slot &, const Slot &) = default;
};

struct PhotonLabel {
    int photon_id;
    std::string path;
    Pol pol;
};

class ModeRegistry {
   public:
    void add_photon(int id);
    void add_path(int photon_id, std::string_view path);
    void remove_photon(int id);

    bool has_photon(int id) const;
    std::size_t photon_index(int id) const;
    const std::vector<int> &photon_ids() const { return photon_ids_; }
    const std::vector<PathId> &paths(int photon_id) const;
    bool has_path(int photon_id, PathId path) const;
    std::optional<int> owner(PathId path) const;
    std::optional<int> owner(std::string_view path) const;

    /// Returns `hint` if no photon uses it yet, otherwise the first free `hint_k`.
    std::string fresh_path(std::string_view hint) const;

    int add_qubus_mode();
    void add_qubus_mode(int id);
    void remove_qubus_mode(int id);
    bool has_qubus(int id) const;
    std::size_t qubus_index(int id) const;
    const std::vector<int> &qubus_modes() const { return qubus_; }

    /// Same photon ids and same qubus mode ids.
    bool compatible(const ModeRegistry &other) const;

   private:
    std::vector<int> photon_ids_;
    std::vector<std::vector<PathId>> paths_;
    std::vector<int> qubus_;
};

struct Branch {
    Complex amplitude;
    std::vector<Slot> photons;  // parallel to ModeRegistry::photon_ids()
    std::vector<Complex> qubus;  // parallel to ModeRegistry::qubus_modes()
};

struct Term {
    Complex amplitude;
    std::vector<PhotonLabel> photons;
};

class HybridState {
   public:
    /// The empty product: no photons, no qubus modes, amplitude 1.
    HybridState();
    HybridState(ModeRegistry registry, std::vector<Branch> branches);

    /// a|H> + b|V> for one photon on one path.
    static HybridState photon(int id, std::string_view path, Complex h, Complex v);
    /// A coherent state |alpha> on a single qubus mode.
    static HybridState coherent(int mode, Complex alpha);
    /// Photon-only state from labelled terms; photons and paths are registered on the fly.
    static HybridState from_terms(const std::vector<Term> &terms);
    /// Polarization register on one path per photon, lexicographic basis with H < V and the
    /// first listed photon most significant.
    static HybridState polarization(const std::vector<int> &ids, const std::vector<std::string> &paths,
                                    const std::vector<Complex> &coefficients);

    const ModeRegistry &registry() const { return registry_; }
    const std::vector<Branch> &branches() const { return branches_; }
    std::size_t size() const { return branches_.size(); }

    /// Slot of a photon in a branch.
    const Slot &slot(const Branch &b, int photon_id) const;
    /// Paths a photon occupies with nonzero amplitude, in registration order.
    std::vector<PathId> occupied_paths(int photon_id, double tol = 1e-12) const;

   private:
    ModeRegistry registry_;
    std::vector<Branch> branches_;
};

Complex coherent_overlap(Complex a, Complex b);
Complex inner_product(const HybridState &a, const HybridState &b);
double norm(const HybridState &s);
HybridState normalize(const HybridState &s);
HybridState scale(const HybridState &s, Complex factor);
/// Sum of two states over the same photons and qubus modes (not normalized).
HybridState superpose(const HybridState &a, const HybridState &b);

/// |<a|b>|^2 for states over the same modes. When one state's photons and qubus modes are a subset
/// of the other's, the larger state is reduced onto the smaller one first.
double fidelity(const HybridState &a, const HybridState &b);

HybridState canonicalize(const HybridState &s, double tol = 1e-12);
HybridState tensor(const HybridState &a, const HybridState &b);

/// Adds a qubus mode in |alpha> to every branch. Returns the new mode id through `mode`.
HybridState add_qubus(const HybridState &s, Complex alpha, int *mode);
/// Drops a qubus mode when it factors out of the state (same amplitude in every branch).
/// Returns the state unchanged otherwise; `released` reports which case happened.
HybridState release_qubus(const HybridState &s, int mode, bool *released = nullptr, double tol = 1e-9);

}  // namespace qubus

#endif
