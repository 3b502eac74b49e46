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

#include "qubus/synthesis.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "qubus/error.hpp"

namespace qubus {

namespace {

void rotate_rows(Eigen::MatrixXcd &m, int a, int b, double angle, double phase) {
    m.row(a) *= std::polar(1.0, phase);
    double c = std::cos(angle), s = std::sin(angle);
    Eigen::RowVectorXcd ra = m.row(a), rb = m.row(b);
    m.row(a) = c * ra - s * rb;
    m.row(b) = s * ra + c * rb;
}

HybridState with_paths(const HybridState &s, int photon, const std::vector<std::string> &paths) {
    ModeRegistry reg = s.registry();
    if (!reg.has_photon(photon)) fail(ErrorCode::Registry, "unknown photon " + std::to_string(photon));
    bool changed = false;
    for (const auto &p : paths) {
        if (reg.has_path(photon, intern_path(p))) continue;
        reg.add_path(photon, p);
        changed = true;
    }
    if (!changed) return s;
    return HybridState(std::move(reg), s.branches());
}

void check_paths(int photon, const HybridState &s, const std::vector<std::string> &paths, int dim) {
    if (static_cast<int>(paths.size()) != dim)
        fail(ErrorCode::InvalidArgument, "mesh acts on " + std::to_string(dim) + " modes but " +
                                             std::to_string(paths.size()) + " paths were given");
    std::set<std::string> seen(paths.begin(), paths.end());
    if (seen.size() != paths.size()) fail(ErrorCode::InvalidArgument, "mesh paths must be distinct");
    std::set<PathId> listed;
    for (const auto &p : paths) listed.insert(intern_path(p));
    for (PathId p : s.occupied_paths(photon))
        if (!listed.count(p))
            fail(ErrorCode::Validation, "photon " + std::to_string(photon) + " occupies path '" + path_name(p) +
                                            "' outside the mesh");
}

}  // namespace

Eigen::MatrixXcd Mesh::matrix() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dimension, dimension);
    for (const auto &r : rotations) rotate_rows(m, r.mode_a, r.mode_b, r.angle, r.phase);
    for (int k = 0; k < dimension; ++k) m.row(k) *= std::polar(1.0, phases[k]);
    return m;
}

double unitarity_deviation(const Eigen::MatrixXcd &u) {
    if (u.rows() != u.cols()) return INFINITY;
    Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

void require_unitary(const Eigen::MatrixXcd &u, double tol) {
    if (u.rows() == 0 || u.rows() != u.cols())
        fail(ErrorCode::InvalidArgument, "matrix must be square and non-empty");
    double dev = unitarity_deviation(u);
    if (!(dev < tol)) {
        std::ostringstream os;
        os << "matrix is not unitary (max |U^dagger U - I| = " << dev << ")";
        fail(ErrorCode::Validation, os.str());
    }
}

Mesh reck_decompose(const Eigen::MatrixXcd &u) {
    require_unitary(u);
    const int n = static_cast<int>(u.rows());
    Mesh mesh;
    mesh.dimension = n;
    Eigen::MatrixXcd m = u.adjoint();
    for (int col = 0; col + 1 < n; ++col) {
        for (int b = n - 1; b > col; --b) {
            int a = b - 1;
            Complex xa = m(a, col), xb = m(b, col);
            if (std::abs(xb) < 1e-15) continue;
            double angle = std::atan2(std::abs(xb), std::abs(xa));
            double phase = std::arg(xb) - std::arg(xa) + std::numbers::pi;
            phase = std::remainder(phase, 2 * std::numbers::pi);
            rotate_rows(m, a, b, angle, phase);
            m(b, col) = 0.0;
            mesh.rotations.push_back({a, b, angle, phase});
        }
    }
    mesh.phases.resize(n);
    for (int k = 0; k < n; ++k) mesh.phases[k] = -std::arg(m(k, k));
    return mesh;
}

std::vector<ElementOp> mesh_ops(const Mesh &mesh, int photon, const std::vector<std::string> &paths) {
    if (static_cast<int>(paths.size()) != mesh.dimension)
        fail(ErrorCode::InvalidArgument, "mesh dimension does not match the path list");
    std::vector<ElementOp> ops;
    for (const auto &r : mesh.rotations) {
        if (r.phase != 0.0) ops.push_back(op::path_phase(photon, paths[r.mode_a], r.phase));
        ops.push_back(op::photon_mix(photon, paths[r.mode_a], paths[r.mode_b], r.angle));
    }
    for (int k = 0; k < mesh.dimension; ++k)
        if (mesh.phases[k] != 0.0) ops.push_back(op::path_phase(photon, paths[k], mesh.phases[k]));
    return ops;
}

HybridState mesh_apply(const HybridState &s, int photon, const std::vector<std::string> &paths, const Mesh &mesh) {
    check_paths(photon, s, paths, mesh.dimension);
    std::set<PathId> listed;
    for (const auto &p : paths) listed.insert(intern_path(p));
    std::optional<Pol> pol;
    for (const auto &b : s.branches()) {
        const Slot &x = s.slot(b, photon);
        if (!listed.count(x.path)) continue;
        if (pol && *pol != x.pol)
            fail(ErrorCode::Validation, "photon " + std::to_string(photon) + " has mixed polarization across the mesh paths");
        pol = x.pol;
    }
    return apply_elements(with_paths(s, photon, paths), mesh_ops(mesh, photon, paths));
}

HybridState path_unitary(const HybridState &s, int photon, const std::vector<std::string> &paths,
                         const Eigen::MatrixXcd &u) {
    Mesh mesh = reck_decompose(u);
    check_paths(photon, s, paths, mesh.dimension);
    return apply_elements(with_paths(s, photon, paths), mesh_ops(mesh, photon, paths));
}

Eigen::MatrixXcd qft_matrix(int n) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "QFT dimension must be positive");
    Eigen::MatrixXcd f(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            long long e = (static_cast<long long>(j) * k) % n;
            f(k, j) = std::polar(norm, 2 * std::numbers::pi * static_cast<double>(e) / n);
        }
    return f;
}

Eigen::MatrixXcd random_haar_unitary(int n, std::uint64_t seed) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "unitary dimension must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    Eigen::MatrixXcd z(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double re = gauss(rng);
            double im = gauss(rng);
            z(i, j) = Complex(re, im);
        }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < n; ++k) {
        Complex d = r(k, k);
        double a = std::abs(d);
        q.col(k) *= a > 0 ? d / a : Complex(1.0);
    }
    return q;
}

Eigen::MatrixXcd hadamard_interference4() {
    Eigen::MatrixXcd u(4, 4);
    u << 1, 1, 1, 1, 1, 1, -1, -1, 1, -1, -1, 1, 1, -1, 1, -1;
    return u / 2.0;
}

}  // namespace qubus
