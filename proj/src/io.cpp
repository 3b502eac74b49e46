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


#include "qubus/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qubus/error.hpp"

namespace qubus {

namespace {

const Json &require(const Json &j, const char *key, const std::string &where) {
    if (!j.is_object() || !j.contains(key)) fail(ErrorCode::Parse, where + ": missing key '" + key + "'");
    return j.at(key);
}

template <typename T>
T get_as(const Json &j, const std::string &where) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception &e) {
        fail(ErrorCode::Parse, where + ": " + e.what());
    }
}

Pol pol_from_json(const Json &j, const std::string &where) {
    auto s = get_as<std::string>(j, where);
    if (s.size() != 1) fail(ErrorCode::Parse, where + ": polarization must be \"H\" or \"V\"");
    try {
        return pol_from_char(s[0]);
    } catch (const Error &) {
        fail(ErrorCode::Parse, where + ": polarization must be \"H\" or \"V\", got \"" + s + "\"");
    }
}

std::string pol_string(Pol p) { return std::string(1, pol_char(p)); }

struct BranchKey {
    std::vector<std::pair<std::string, int>> slots;
    std::vector<std::pair<double, double>> qubus;
    friend auto operator<=>(const BranchKey &, const BranchKey &) = default;
};

BranchKey branch_key(const Branch &b) {
    BranchKey k;
    for (const auto &s : b.photons) k.slots.emplace_back(path_name(s.path), static_cast<int>(s.pol));
    for (auto z : b.qubus) k.qubus.emplace_back(z.real(), z.imag());
    return k;
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json &j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    fail(ErrorCode::Parse, "expected a number or [re, im], got " + j.dump());
}

Json state_to_json(const HybridState &s) {
    const auto &reg = s.registry();
    Json out;
    Json photons = Json::array();
    for (int id : reg.photon_ids()) {
        Json paths = Json::array();
        for (PathId p : reg.paths(id)) paths.push_back(path_name(p));
        photons.push_back({{"id", id}, {"paths", paths}});
    }
    out["photons"] = photons;
    out["qubus"] = reg.qubus_modes();

    std::vector<const Branch *> order;
    for (const auto &b : s.branches()) order.push_back(&b);
    std::sort(order.begin(), order.end(),
              [](const Branch *a, const Branch *b) { return branch_key(*a) < branch_key(*b); });
    Json branches = Json::array();
    for (const Branch *b : order) {
        Json slots = Json::array();
        for (std::size_t i = 0; i < b->photons.size(); ++i)
            slots.push_back({{"id", reg.photon_ids()[i]},
                             {"path", path_name(b->photons[i].path)},
                             {"pol", pol_string(b->photons[i].pol)}});
        Json qubus = Json::array();
        for (auto z : b->qubus) qubus.push_back(complex_to_json(z));
        branches.push_back({{"amplitude", complex_to_json(b->amplitude)}, {"photons", slots}, {"qubus", qubus}});
    }
    out["branches"] = branches;
    return out;
}

HybridState state_from_json(const Json &j) {
    const std::string where = "state";
    ModeRegistry reg;
    for (const auto &ph : require(j, "photons", where)) {
        int id = get_as<int>(require(ph, "id", "state photon"), "state photon id");
        reg.add_photon(id);
        for (const auto &p : require(ph, "paths", "state photon " + std::to_string(id)))
            reg.add_path(id, get_as<std::string>(p, "state photon path"));
    }
    if (j.contains("qubus"))
        for (const auto &m : j.at("qubus")) reg.add_qubus_mode(get_as<int>(m, "qubus mode"));

    std::vector<Branch> branches;
    for (const auto &bj : require(j, "branches", where)) {
        Branch b;
        b.amplitude = complex_from_json(require(bj, "amplitude", "branch"));
        b.photons.resize(reg.photon_ids().size());
        std::vector<bool> seen(b.photons.size(), false);
        for (const auto &sj : require(bj, "photons", "branch")) {
            int id = get_as<int>(require(sj, "id", "branch photon"), "branch photon id");
            if (!reg.has_photon(id)) fail(ErrorCode::Registry, "branch refers to undeclared photon " + std::to_string(id));
            auto idx = reg.photon_index(id);
            auto path = get_as<std::string>(require(sj, "path", "branch photon"), "branch photon path");
            PathId pid = intern_path(path);
            if (!reg.has_path(id, pid))
                fail(ErrorCode::Registry, "photon " + std::to_string(id) + " has no declared path '" + path + "'");
            b.photons[idx] = {pid, pol_from_json(require(sj, "pol", "branch photon"), "branch photon")};
            seen[idx] = true;
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end())
            fail(ErrorCode::Parse, "every branch must place every declared photon");
        if (bj.contains("qubus"))
            for (const auto &z : bj.at("qubus")) b.qubus.push_back(complex_from_json(z));
        if (b.qubus.size() != reg.qubus_modes().size())
            fail(ErrorCode::Parse, "branch qubus amplitudes do not match the declared modes");
        branches.push_back(std::move(b));
    }
    return canonicalize(HybridState(std::move(reg), std::move(branches)));
}

Json element_to_json(const ElementOp &op) {
    Json j;
    j["kind"] = element_kind_name(op.kind);
    if (op.kind != ElementKind::QubusPhase && op.kind != ElementKind::QubusBS) j["photon"] = op.photon;
    if (!op.paths.empty()) j["paths"] = op.paths;
    if (op.pol) j["pol"] = pol_string(*op.pol);
    if (!op.modes.empty()) j["modes"] = op.modes;
    if (op.parameter != 0.0) j["parameter"] = op.parameter;
    if (op.kind == ElementKind::WavePlateU) {
        Json m = Json::array();
        for (auto z : op.matrix) m.push_back(complex_to_json(z));
        j["matrix"] = m;
    }
    return j;
}

ElementOp element_from_json(const Json &j) {
    ElementOp op;
    op.kind = element_kind_from_name(get_as<std::string>(require(j, "kind", "element"), "element kind"));
    if (j.contains("photon")) op.photon = get_as<int>(j.at("photon"), "element photon");
    if (j.contains("paths")) op.paths = get_as<std::vector<std::string>>(j.at("paths"), "element paths");
    if (j.contains("pol")) op.pol = pol_from_json(j.at("pol"), "element");
    if (j.contains("modes")) op.modes = get_as<std::vector<int>>(j.at("modes"), "element modes");
    if (j.contains("parameter")) op.parameter = get_as<double>(j.at("parameter"), "element parameter");
    if (j.contains("matrix")) {
        const auto &m = j.at("matrix");
        if (!m.is_array() || m.size() != 4) fail(ErrorCode::Parse, "wave plate matrix needs four entries, row-major");
        for (std::size_t i = 0; i < 4; ++i) op.matrix[i] = complex_from_json(m[i]);
    }
    return op;
}

Json resources_to_json(const Resources &r) {
    return {{"xpm_couplings", r.xpm_couplings},   {"qubus_modes", r.qubus_modes},
            {"detections", r.detections},         {"ancilla_photons", r.ancilla_photons},
            {"cpath_family", r.cpath_family},     {"disentanglers", r.disentanglers},
            {"entanglers", r.entanglers},         {"mergings", r.mergings},
            {"lomis", r.lomis},                   {"bell_measurements", r.bell_measurements},
            {"restricted_unitaries", r.restricted_unitaries}};
}

Json report_to_json(const GateReport &r) {
    Json j;
    j["gate"] = r.gate;
    j["success_probability"] = r.success_probability;
    j["min_fidelity"] = r.min_fidelity;
    j["resources"] = resources_to_json(r.resources);
    Json log = Json::array();
    for (const auto &rec : r.outcome_log)
        log.push_back({{"stage", rec.stage},
                       {"kind", record_kind_name(rec.kind)},
                       {"value", rec.value},
                       {"target", rec.target},
                       {"probability", rec.probability},
                       {"misidentification", rec.misidentification}});
    j["outcome_log"] = log;
    Json outcomes = Json::array();
    for (const auto &o : r.outcomes)
        outcomes.push_back(
            {{"stage", o.stage}, {"label", o.label}, {"probability", o.probability}, {"fidelity", o.fidelity}});
    j["outcomes"] = outcomes;
    Json paths = Json::object();
    for (const auto &[k, v] : r.paths) paths[k] = v;
    j["paths"] = paths;
    Json photons = Json::object();
    for (const auto &[k, v] : r.photons) photons[k] = v;
    j["photons"] = photons;
    return j;
}

Eigen::MatrixXcd matrix_from_json(const Json &j) {
    const Json &rows = j.is_object() ? require(j, "matrix", "matrix file") : j;
    if (!rows.is_array() || rows.empty()) fail(ErrorCode::Parse, "matrix must be a non-empty array of rows");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto &row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            fail(ErrorCode::Parse, "matrix row " + std::to_string(r) + " must have " + std::to_string(n) + " entries");
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

Json matrix_to_json(const Eigen::MatrixXcd &m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

Json mesh_to_json(const Mesh &m) {
    Json rot = Json::array();
    for (const auto &r : m.rotations)
        rot.push_back({{"mode_a", r.mode_a}, {"mode_b", r.mode_b}, {"angle", r.angle}, {"phase", r.phase}});
    return {{"dimension", m.dimension}, {"rotations", rot}, {"phases", m.phases}};
}

Mesh mesh_from_json(const Json &j) {
    Mesh m;
    m.dimension = get_as<int>(require(j, "dimension", "mesh"), "mesh dimension");
    for (const auto &r : require(j, "rotations", "mesh"))
        m.rotations.push_back({get_as<int>(require(r, "mode_a", "rotation"), "rotation mode_a"),
                               get_as<int>(require(r, "mode_b", "rotation"), "rotation mode_b"),
                               get_as<double>(require(r, "angle", "rotation"), "rotation angle"),
                               get_as<double>(require(r, "phase", "rotation"), "rotation phase")});
    m.phases = get_as<std::vector<double>>(require(j, "phases", "mesh"), "mesh phases");
    if (static_cast<int>(m.phases.size()) != m.dimension) fail(ErrorCode::Parse, "mesh needs one phase per mode");
    for (const auto &r : m.rotations)
        if (r.mode_a < 0 || r.mode_b < 0 || r.mode_a >= m.dimension || r.mode_b >= m.dimension || r.mode_a == r.mode_b)
            fail(ErrorCode::Parse, "mesh rotation modes out of range");
    return m;
}

Json table_to_json(const SweepTable &t) { return {{"columns", t.columns}, {"rows", t.rows}}; }

Json fig2_to_json(const Fig2Data &d) {
    Json peaks = Json::array();
    for (const auto &p : d.peaks) peaks.push_back({{"k", p.k}, {"mean", p.mean}, {"pmf", p.pmf}});
    return {{"beta2", d.beta2},
            {"threshold", d.threshold},
            {"dominant_lo", d.dominant_lo},
            {"dominant_hi", d.dominant_hi},
            {"dominant_count", d.dominant_count},
            {"mass_8_35", d.mass_8_35},
            {"beta_pmf", d.beta_pmf},
            {"peaks", peaks}};
}

std::string fig2_beta_csv(const Fig2Data &d) {
    std::string out = "n,probability\n";
    for (std::size_t n = 0; n < d.beta_pmf.size(); ++n) out += std::to_string(n) + "," + format_number(d.beta_pmf[n]) + "\n";
    return out;
}

std::string fig2_peaks_csv(const Fig2Data &d) {
    std::string out = "k,n,probability\n";
    for (const auto &p : d.peaks)
        for (std::size_t n = 0; n < p.pmf.size(); ++n)
            out += std::to_string(p.k) + "," + std::to_string(n) + "," + format_number(p.pmf[n]) + "\n";
    return out;
}

GateParams params_from_json(const Json &j, GateParams p) {
    if (!j.is_object()) fail(ErrorCode::Parse, "parameters must be a JSON object");
    for (const auto &[key, value] : j.items()) {
        if (key == "alpha") p.alpha = get_as<double>(value, key);
        else if (key == "theta") p.theta = get_as<double>(value, key);
        else if (key == "gamma") p.gamma = complex_from_json(value);
        else if (key == "theta_probe") p.theta_probe = get_as<double>(value, key);
        else if (key == "eta") p.eta = get_as<double>(value, key);
        else if (key == "seed") p.seed = get_as<std::uint64_t>(value, key);
        else if (key == "qnd_mode") {
            auto m = get_as<std::string>(value, key);
            if (m == "ideal") p.qnd_mode = QndMode::Ideal;
            else if (m == "binned") p.qnd_mode = QndMode::Binned;
            else fail(ErrorCode::Parse, "qnd_mode must be \"ideal\" or \"binned\"");
        } else if (key == "policy") {
            auto m = get_as<std::string>(value, key);
            if (m == "enumerate") p.policy = OutcomePolicy::Enumerate;
            else if (m == "sample") p.policy = OutcomePolicy::Sample;
            else fail(ErrorCode::Parse, "policy must be \"enumerate\" or \"sample\"");
        } else if (key == "probability_floor") p.probability_floor = get_as<double>(value, key);
        else if (key == "fidelity_tolerance") p.fidelity_tolerance = get_as<double>(value, key);
        else fail(ErrorCode::Parse, "unknown parameter '" + key + "'");
    }
    return p;
}

Json params_to_json(const GateParams &p) {
    return {{"alpha", p.alpha},
            {"theta", p.theta},
            {"gamma", p.gamma.imag() == 0.0 ? Json(p.gamma.real()) : complex_to_json(p.gamma)},
            {"theta_probe", p.theta_probe},
            {"eta", p.eta},
            {"seed", p.seed},
            {"qnd_mode", p.qnd_mode == QndMode::Ideal ? "ideal" : "binned"},
            {"policy", p.policy == OutcomePolicy::Enumerate ? "enumerate" : "sample"}};
}

SweepSpec sweep_spec_from_json(const Json &j, const GateParams &base) {
    SweepSpec spec;
    spec.base = base;
    spec.quantity = sweep_quantity_from_name(get_as<std::string>(require(j, "quantity", "sweep"), "sweep quantity"));
    const auto &grid = require(j, "grid", "sweep");
    if (grid.is_array()) {
        for (const auto &g : grid)
            spec.grid.emplace_back(get_as<std::string>(require(g, "name", "grid entry"), "grid name"),
                                   get_as<std::vector<double>>(require(g, "values", "grid entry"), "grid values"));
    } else if (grid.is_object()) {
        for (const auto &[k, v] : grid.items()) spec.grid.emplace_back(k, get_as<std::vector<double>>(v, "grid " + k));
    } else {
        fail(ErrorCode::Parse, "sweep grid must be an object or an array of {name, values}");
    }
    if (j.contains("params")) spec.base = params_from_json(j.at("params"), base);
    if (j.contains("k1")) spec.k1 = get_as<int>(j.at("k1"), "k1");
    if (j.contains("k2")) spec.k2 = get_as<int>(j.at("k2"), "k2");
    if (j.contains("seed")) spec.seed = get_as<std::uint64_t>(j.at("seed"), "seed");
    if (j.contains("threads")) spec.threads = get_as<int>(j.at("threads"), "threads");
    spec.validate();
    return spec;
}

std::vector<Complex> haar_state(std::size_t dim, std::uint64_t seed) {
    Eigen::MatrixXcd u = random_haar_unitary(static_cast<int>(dim), seed);
    std::vector<Complex> v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = u(static_cast<Eigen::Index>(i), 0);
    return v;
}

namespace {

std::vector<Complex> kron(const std::vector<Complex> &a, const std::vector<Complex> &b) {
    std::vector<Complex> out;
    out.reserve(a.size() * b.size());
    for (auto x : a)
        for (auto y : b) out.push_back(x * y);
    return out;
}

std::uint64_t parse_seed(const std::string &text, const std::string &spec) {
    try {
        std::size_t used = 0;
        auto v = std::stoull(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception &) {
    }
    fail(ErrorCode::Parse, "bad seed in state spec '" + spec + "'");
}

int require_photons(int photons, const std::string &spec) {
    if (photons < 1) fail(ErrorCode::Parse, "state spec '" + spec + "' needs a photon count");
    return photons;
}

}  // namespace

StateSpec parse_state_spec(const std::string &spec, int photons) {
    StateSpec out;
    if (spec.empty()) fail(ErrorCode::Parse, "empty state spec");
    const bool basis = std::all_of(spec.begin(), spec.end(), [](char c) {
        return c == 'H' || c == 'V' || c == '+' || c == '-' || c == 'D' || c == 'A';
    });
    if (basis) {
        const double r = 1.0 / std::sqrt(2.0);
        out.coefficients = {1.0};
        for (char c : spec) {
            std::vector<Complex> q;
            if (c == 'H') q = {1.0, 0.0};
            else if (c == 'V') q = {0.0, 1.0};
            else if (c == '+' || c == 'D') q = {r, r};
            else q = {r, -r};
            out.coefficients = kron(out.coefficients, q);
        }
        out.photons = static_cast<int>(spec.size());
        out.product = true;
    } else if (spec.rfind("haar-product:", 0) == 0) {
        out.photons = require_photons(photons, spec);
        auto seed = parse_seed(spec.substr(13), spec);
        out.coefficients = {1.0};
        for (int i = 0; i < out.photons; ++i)
            out.coefficients = kron(out.coefficients, haar_state(2, seed * 1000003ULL + static_cast<std::uint64_t>(i)));
        out.product = true;
    } else if (spec.rfind("haar:", 0) == 0) {
        out.photons = require_photons(photons, spec);
        out.coefficients = haar_state(std::size_t{1} << out.photons, parse_seed(spec.substr(5), spec));
    } else {
        Json j;
        try {
            j = Json::parse(spec.front() == '[' ? spec : "[" + spec + "]");
        } catch (const nlohmann::json::exception &) {
            fail(ErrorCode::Parse, "unrecognised state spec '" + spec + "'");
        }
        for (const auto &z : j) out.coefficients.push_back(complex_from_json(z));
        std::size_t dim = out.coefficients.size();
        if (dim < 2 || (dim & (dim - 1)) != 0)
            fail(ErrorCode::Parse, "coefficient list length must be a power of two, got " + std::to_string(dim));
        out.photons = 0;
        while ((std::size_t{1} << out.photons) < dim) ++out.photons;
    }
    if (photons > 0 && out.photons != photons)
        fail(ErrorCode::InvalidArgument, "state spec '" + spec + "' describes " + std::to_string(out.photons) +
                                             " photons, expected " + std::to_string(photons));
    double n2 = 0.0;
    for (auto z : out.coefficients) n2 += std::norm(z);
    if (!(n2 > 0.0) || !std::isfinite(n2)) fail(ErrorCode::Numeric, "state spec '" + spec + "' has zero norm");
    for (auto &z : out.coefficients) z /= std::sqrt(n2);
    return out;
}

HybridState register_from_spec(const StateSpec &spec) {
    std::vector<int> ids;
    std::vector<std::string> paths;
    for (int i = 1; i <= spec.photons; ++i) {
        ids.push_back(i);
        paths.push_back(std::to_string(i));
    }
    return HybridState::polarization(ids, paths, spec.coefficients);
}

Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Parse, "cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        fail(ErrorCode::Parse, "'" + path + "' is not valid JSON: " + e.what());
    }
}

std::string dump_json(const Json &j) { return j.dump(2) + "\n"; }

}  // namespace qubus
