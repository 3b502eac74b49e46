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


#include "qubus/program.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>

#include "qubus/error.hpp"
#include "qubus/pipelines.hpp"
#include "qubus/synthesis.hpp"

namespace qubus {

namespace {

class Args {
   public:
    Args(const Json &j, std::string gate) : j_(j), gate_(std::move(gate)) {
        if (!j_.is_object()) fail(ErrorCode::Parse, gate_ + ": arguments must be a JSON object");
    }

    bool has(const char *key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    const Json &at(const char *key) const {
        if (!has(key)) fail(ErrorCode::Parse, gate_ + ": missing argument '" + key + "'");
        return j_.at(key);
    }

    template <typename T>
    T get(const char *key) const {
        try {
            return at(key).get<T>();
        } catch (const nlohmann::json::exception &) {
            fail(ErrorCode::Parse, gate_ + ": argument '" + key + "' has the wrong type: " + at(key).dump());
        }
    }

    template <typename T>
    T get(const char *key, T fallback) const {
        return has(key) ? get<T>(key) : fallback;
    }

    int photon(const char *key) const { return get<int>(key); }
    std::vector<int> photons(const char *key) const { return get<std::vector<int>>(key); }
    std::string path(const char *key) const { return get<std::string>(key, std::string()); }
    std::vector<std::string> paths(const char *key) const { return get<std::vector<std::string>>(key); }

    std::optional<int> optional_photon(const char *key) const {
        if (!has(key)) return std::nullopt;
        return get<int>(key);
    }

    CPath3Layout layout() const {
        auto l = get<std::string>("layout", "standard");
        if (l == "standard") return CPath3Layout::Standard;
        if (l == "shared") return CPath3Layout::SharedMode;
        fail(ErrorCode::Parse, gate_ + ": layout must be \"standard\" or \"shared\", got \"" + l + "\"");
    }

    PhaseCarrier carrier(const Json &c) const {
        Args a(c, gate_ + " carrier");
        return {a.photon("photon"), a.path("path"), a.get<bool>("whole_path", false)};
    }

   private:
    const Json &j_;
    std::string gate_;
};

Eigen::MatrixXcd pauli(char which) {
    Eigen::MatrixXcd m(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    if (which == 'x') m << 0, 1, 1, 0;
    else if (which == 'z') m << 1, 0, 0, -1;
    else m << r, r, r, -r;
    return m;
}

std::optional<Eigen::MatrixXcd> optional_matrix(const Args &a, const char *key, int dim) {
    if (!a.has(key)) return std::nullopt;
    return matrix_argument(a.at(key), dim);
}

std::vector<int> sequence(int from, int to) {
    std::vector<int> v;
    for (int i = from; i <= to; ++i) v.push_back(i);
    return v;
}

}  // namespace

const std::vector<std::string> &gate_names() {
    static const std::vector<std::string> names{
        "parity",     "cpath",     "cpath2",     "cpath3",      "disentangler", "entangler1", "entangler2",
        "entangler3", "entangler4", "merging",   "merging-n",   "two-qubit",    "multi-qubit", "toffoli",
        "cn-u1",      "cn-uk",      "to-qudit",  "from-qudit",  "teleport"};
    return names;
}

Eigen::MatrixXcd matrix_argument(const Json &j, int dim) {
    if (!j.is_string()) return matrix_from_json(j);
    const auto name = j.get<std::string>();
    Eigen::MatrixXcd m;
    if (name == "identity") {
        m = Eigen::MatrixXcd::Identity(dim, dim);
    } else if (name == "x" || name == "z" || name == "h") {
        m = pauli(name[0]);
    } else if (name == "cnot") {
        m = Eigen::MatrixXcd::Identity(4, 4);
        m.bottomRightCorner(2, 2) = pauli('x');
    } else if (name == "qft") {
        m = qft_matrix(dim);
    } else if (name == "hadamard4") {
        m = hadamard_interference4();
    } else if (name.rfind("haar:", 0) == 0) {
        std::uint64_t seed = 0;
        try {
            seed = std::stoull(name.substr(5));
        } catch (const std::exception &) {
            fail(ErrorCode::Parse, "bad seed in matrix name '" + name + "'");
        }
        m = random_haar_unitary(dim, seed);
    } else {
        fail(ErrorCode::Parse, "unknown matrix name '" + name + "'");
    }
    if (m.rows() != dim)
        fail(ErrorCode::InvalidArgument, "matrix '" + name + "' is " + std::to_string(m.rows()) + " x " +
                                             std::to_string(m.rows()) + ", expected " + std::to_string(dim));
    return m;
}

GateResult invoke_gate(const HybridState &s, const Json &call, const GateParams &p) {
    if (!call.is_object() || !call.contains("gate") || !call.at("gate").is_string())
        fail(ErrorCode::Parse, "gate call needs a \"gate\" name");
    const std::string g = call.at("gate").get<std::string>();
    const Args a(call, g);

    if (g == "element") {
        GateResult r;
        r.state = apply_element(s, element_from_json(a.at("op")));
        r.report.gate = "element";
        return r;
    }
    if (g == "parity") return parity_gate(s, a.photon("photon1"), a.photon("photon2"), p, a.path("new_path"));
    if (g == "cpath") return c_path(s, a.photon("control"), a.photon("target"), p, a.path("v_path"));
    if (g == "cpath2")
        return c_path2(s, a.photon("control"), a.photon("target"), a.paths("paths"), p,
                       a.get<std::vector<std::string>>("new_paths", {}));
    if (g == "cpath3") {
        CPath3Spec spec;
        spec.control = a.photon("control");
        spec.first = a.get<std::string>("first");
        spec.second = a.get<std::string>("second");
        spec.target = a.photon("target");
        spec.v_path = a.path("v_path");
        spec.layout = a.layout();
        spec.rail = a.path("rail");
        if (a.has("shared"))
            for (const auto &sel : a.at("shared")) {
                Args sa(sel, "cpath3 shared selector");
                XpmSelector x{sa.photon("photon"), sa.get<std::string>("path"), std::nullopt};
                if (sa.has("pol")) x.pol = pol_from_char(sa.get<std::string>("pol").at(0));
                spec.shared.push_back(x);
            }
        return c_path3(s, spec, p);
    }
    if (g == "disentangler")
        return disentangler(s, a.photon("control"), a.photon("target"), a.paths("v_paths"), p);
    if (g.rfind("entangler", 0) == 0 && g.size() == 10 && g[9] >= '1' && g[9] <= '4') {
        EntanglerArgs e;
        e.photon = a.photon("photon");
        e.target = a.photon("target");
        e.paths = a.get<std::vector<std::string>>("paths", {});
        e.group0 = a.get<std::vector<std::string>>("group0", {});
        e.group1 = a.get<std::vector<std::string>>("group1", {});
        return entangler(s, g[9] - '0', e, p);
    }
    if (g == "merging")
        return merging(s, a.photon("photon"), a.get<std::string>("path_a"), a.get<std::string>("path_b"),
                       a.photon("ancilla"), a.carrier(a.at("carrier")), p);
    if (g == "merging-n") {
        auto paths = a.paths("paths");
        std::vector<PhaseCarrier> carriers;
        for (const auto &c : a.at("carriers")) carriers.push_back(a.carrier(c));
        return merging_n(s, a.photon("photon"), paths, a.photon("ancilla"), carriers, p,
                         optional_matrix(a, "interference", static_cast<int>(paths.size())));
    }
    if (g == "two-qubit" || g == "multi-qubit") {
        auto photons = a.photons("photons");
        if (g == "two-qubit" && photons.size() != 2) fail(ErrorCode::InvalidArgument, "two-qubit needs two photons");
        if (photons.empty() || photons.size() > static_cast<std::size_t>(kMaxLogicalPhotons))
            fail(ErrorCode::InvalidArgument, g + ": between 2 and " + std::to_string(kMaxLogicalPhotons) + " photons");
        const int dim = 1 << photons.size();
        return multi_qubit_gate(s, photons, matrix_argument(a.at("matrix"), dim), p, a.optional_photon("ancilla"),
                                optional_matrix(a, "interference", dim / 2));
    }
    if (g == "toffoli") return toffoli(s, a.photons("controls"), a.photon("target"), p, a.layout());
    if (g == "cn-u1") {
        Eigen::MatrixXcd u = matrix_argument(a.at("matrix"), 2);
        return cn_u1(s, a.photons("controls"), a.photon("target"), Eigen::Matrix2cd(u), p, a.layout());
    }
    if (g == "cn-uk") {
        auto targets = a.photons("targets");
        if (targets.empty() || targets.size() > static_cast<std::size_t>(kMaxLogicalPhotons))
            fail(ErrorCode::InvalidArgument, "cn-uk: bad number of targets");
        return cn_uk(s, a.photons("controls"), targets, matrix_argument(a.at("matrix"), 1 << targets.size()), p,
                     a.layout());
    }
    if (g == "to-qudit") return to_qudit_circuit(s, a.photons("photons"), p);
    if (g == "teleport") {
        auto photons = a.photons("photons");
        TeleportAncillas anc;
        HybridState t = s;
        if (a.has("ancillas")) {
            Args aa(a.at("ancillas"), "teleport ancillas");
            anc.pair_a = aa.photon("pair_a");
            anc.pair_b = aa.photon("pair_b");
            anc.switches = aa.photons("switches");
        } else {
            t = add_teleport_ancillas(s, static_cast<int>(photons.size()), &anc);
        }
        return to_qudit_teleport(t, photons, anc, p);
    }
    if (g == "from-qudit") {
        auto paths = a.paths("paths");
        return from_qudit(s, a.photon("qudit"), paths, a.photons("companions"), p, a.optional_photon("ancilla"),
                          optional_matrix(a, "interference", static_cast<int>(paths.size())));
    }
    fail(ErrorCode::Parse, "unknown gate '" + g + "'");
}

// ---------------------------------------------------------------------------------------------
// Programs

namespace {

using StepReports = std::map<std::string, GateReport>;

Json resolve_reference(const std::string &ref, const StepReports &steps) {
    static const std::regex pattern(R"(@([^.\[\]]+)\.(photons|paths)\.([^\[\]]+)(?:\[(\d+)\])?)");
    std::smatch m;
    if (!std::regex_match(ref, m, pattern))
        fail(ErrorCode::Parse, "bad reference '" + ref + "'; expected @step.photons.key or @step.paths.key");
    auto it = steps.find(m[1].str());
    if (it == steps.end()) fail(ErrorCode::Registry, "reference '" + ref + "' names an unknown step");
    const GateReport &r = it->second;
    Json value;
    if (m[2] == "photons") {
        auto f = r.photons.find(m[3].str());
        if (f == r.photons.end()) fail(ErrorCode::Registry, "reference '" + ref + "': no such photon group");
        value = f->second;
    } else {
        auto f = r.paths.find(m[3].str());
        if (f == r.paths.end()) fail(ErrorCode::Registry, "reference '" + ref + "': no such path group");
        value = f->second;
    }
    if (m[4].matched) {
        auto i = std::stoul(m[4].str());
        if (i >= value.size()) fail(ErrorCode::Registry, "reference '" + ref + "': index out of range");
        return value[i];
    }
    return value;
}

Json resolve(const Json &j, const StepReports &steps) {
    if (j.is_string()) {
        const auto &s = j.get_ref<const std::string &>();
        if (!s.empty() && s[0] == '@') return resolve_reference(s, steps);
        return j;
    }
    if (j.is_array() || j.is_object()) {
        Json out = j;
        for (auto it = out.begin(); it != out.end(); ++it) *it = resolve(*it, steps);
        return out;
    }
    return j;
}

HybridState single_photon(int id, const std::string &path, const Json &state) {
    const double r = 1.0 / std::sqrt(2.0);
    if (state.is_string()) {
        auto s = state.get<std::string>();
        if (s == "H") return HybridState::photon(id, path, 1.0, 0.0);
        if (s == "V") return HybridState::photon(id, path, 0.0, 1.0);
        if (s == "+" || s == "D") return HybridState::photon(id, path, r, r);
        if (s == "-" || s == "A") return HybridState::photon(id, path, r, -r);
        fail(ErrorCode::Parse, "ancilla state must be H, V, + or -, got \"" + s + "\"");
    }
    if (state.is_array() && state.size() == 2) {
        Complex h = complex_from_json(state[0]), v = complex_from_json(state[1]);
        double n = std::sqrt(std::norm(h) + std::norm(v));
        if (!(n > 0.0)) fail(ErrorCode::Numeric, "ancilla state has zero norm");
        return HybridState::photon(id, path, h / n, v / n);
    }
    fail(ErrorCode::Parse, "ancilla state must be a basis letter or [h, v]");
}

HybridState program_input(const Json &input) {
    if (input.is_string()) return register_from_spec(parse_state_spec(input.get<std::string>()));
    Args a(input, "program input");
    const Json &st = a.at("state");
    if (st.is_object()) return state_from_json(st);
    return register_from_spec(parse_state_spec(a.get<std::string>("state"), a.get<int>("photons", 0)));
}

}  // namespace

Json logical_json(const HybridState &s, const std::vector<int> &photons) {
    auto amps = logical_amplitudes(s, photons);
    Json out = Json::array();
    const std::size_t n = photons.size();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (std::abs(amps[i]) < 1e-12) continue;
        std::string basis;
        for (std::size_t b = 0; b < n; ++b) basis.push_back((i >> (n - 1 - b)) & 1 ? 'V' : 'H');
        out.push_back({{"basis", basis}, {"amplitude", complex_to_json(amps[i])}});
    }
    return out;
}

Json run_program(const Json &program, const GateParams &base) {
    Args prog(program, "program");
    GateParams p = prog.has("params") ? params_from_json(prog.at("params"), base) : base;
    HybridState state = program_input(prog.at("input"));
    if (prog.has("ancillas"))
        for (const auto &anc : prog.at("ancillas")) {
            Args a(anc, "ancilla");
            int id = a.photon("id");
            if (state.registry().has_photon(id))
                fail(ErrorCode::Registry, "ancilla photon " + std::to_string(id) + " is already declared");
            auto path = a.get<std::string>("path", std::to_string(id));
            if (state.registry().owner(path))
                fail(ErrorCode::Registry, "ancilla path '" + path + "' is already in use");
            state = tensor(state, single_photon(id, path, a.has("state") ? a.at("state") : Json("+")));
        }

    StepReports by_id;
    GateReport total;
    total.gate = "program";
    Json steps = Json::array();
    const Json &list = prog.at("steps");
    if (!list.is_array()) fail(ErrorCode::Parse, "program steps must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        Json call = resolve(list[i], by_id);
        std::string id = call.contains("id") ? call.at("id").get<std::string>() : std::to_string(i);
        if (by_id.count(id)) fail(ErrorCode::Parse, "duplicate step id '" + id + "'");
        GateResult r;
        try {
            r = invoke_gate(state, call, p);
        } catch (const Error &e) {
            throw Error(e.code(), "step '" + id + "': " + e.what());
        }
        state = std::move(r.state);
        total.absorb(r.report);
        steps.push_back({{"id", id}, {"report", report_to_json(r.report)}});
        by_id.emplace(id, std::move(r.report));
    }

    Json out;
    out["params"] = params_to_json(p);
    out["steps"] = steps;
    out["success_probability"] = total.success_probability;
    out["min_fidelity"] = total.min_fidelity;
    out["resources"] = resources_to_json(total.resources);
    if (prog.has("outputs")) {
        Json outputs = resolve(prog.at("outputs"), by_id);
        Args o(outputs, "program outputs");
        if (o.has("logical")) out["logical"] = logical_json(state, o.photons("logical"));
    }
    out["state"] = state_to_json(state);
    return out;
}

// ---------------------------------------------------------------------------------------------
// Gate demos

namespace {

struct Demo {
    std::vector<std::string> setup;
    GateResult result;
    std::vector<int> logical;
    int qudit = 0;
    std::vector<std::string> qudit_paths;
};

int default_photons(const std::string &name) {
    if (name == "parity" || name == "cpath" || name == "disentangler" || name == "entangler1" || name == "entangler2" || name == "merging" ||
        name == "two-qubit" || name == "teleport" || name == "cn-u1")
        return 2;
    if (name == "cn-uk") return 4;
    return 3;
}

void check_photons(const std::string &name, int n, int lo, int hi) {
    if (n < lo || n > hi)
        fail(ErrorCode::InvalidArgument, name + " takes between " + std::to_string(lo) + " and " + std::to_string(hi) +
                                             " input photons, got " + std::to_string(n));
}

Demo build_demo(const std::string &name, HybridState s, int n, const GateParams &p, const Json &options) {
    Demo d;
    auto run = [&](const Json &call) {
        d.result = invoke_gate(s, call, p);
        return d.result;
    };
    auto prepare = [&](const Json &call) {
        auto r = invoke_gate(s, call, p);
        d.setup.push_back(call.at("gate").get<std::string>());
        s = r.state;
        return r.report;
    };
    auto option = [&](const char *key, const Json &fallback) {
        return options.contains(key) ? options.at(key) : fallback;
    };
    const Json layout = option("layout", "standard");

    if (name == "parity") {
        check_photons(name, n, 2, 2);
        run({{"gate", "parity"}, {"photon1", 1}, {"photon2", 2}});
    } else if (name == "cpath") {
        check_photons(name, n, 2, 2);
        run({{"gate", "cpath"}, {"control", 1}, {"target", 2}});
    } else if (name == "cpath2") {
        check_photons(name, n, 3, 3);
        auto v = prepare({{"gate", "cpath"}, {"control", 1}, {"target", 3}}).paths.at("v").front();
        run({{"gate", "cpath2"}, {"control", 2}, {"target", 3}, {"paths", {"3", v}}});
    } else if (name == "cpath3") {
        check_photons(name, n, 3, 3);
        auto v = prepare({{"gate", "cpath"}, {"control", 1}, {"target", 2}}).paths.at("v").front();
        Json call{{"gate", "cpath3"}, {"control", 2}, {"first", "2"}, {"second", v}, {"target", 3}, {"layout", layout}};
        if (layout == "shared") call["shared"] = Json::array({{{"photon", 1}, {"path", "1"}, {"pol", "H"}}});
        run(call);
    } else if (name == "disentangler") {
        check_photons(name, n, 2, 2);
        auto v = prepare({{"gate", "cpath"}, {"control", 1}, {"target", 2}}).paths.at("v").front();
        run({{"gate", "disentangler"}, {"control", 1}, {"target", 2}, {"v_paths", {v}}});
    } else if (name == "entangler1") {
        check_photons(name, n, 2, 2);
        auto v = prepare({{"gate", "cpath"}, {"control", 1}, {"target", 2}}).paths.at("v").front();
        int anc = 0;
        s = add_plus_ancilla(s, &anc);
        run({{"gate", name}, {"photon", anc}, {"target", 2}, {"paths", {"2", v}}});
    } else if (name == "entangler4") {
        check_photons(name, n, 3, 3);
        auto r = prepare({{"gate", "to-qudit"}, {"photons", {1, 2, 3}}});
        int anc = 0;
        s = add_plus_ancilla(s, &anc);
        run({{"gate", name}, {"photon", anc}, {"target", 3}, {"paths", r.paths.at("qudit")}});
    } else if (name == "entangler2") {
        check_photons(name, n, 2, 2);
        auto r = prepare({{"gate", "to-qudit"}, {"photons", {1, 2}}});
        auto paths = r.paths.at("qudit");
        run({{"gate", name}, {"photon", 1}, {"target", 2}, {"group0", {paths[0]}}, {"group1", {paths[1]}}});
    } else if (name == "entangler3") {
        check_photons(name, n, 3, 3);
        auto r = prepare({{"gate", "to-qudit"}, {"photons", {1, 2, 3}}});
        auto paths = r.paths.at("qudit");
        run({{"gate", name},
             {"photon", 1},
             {"target", 3},
             {"group0", {paths[0], paths[1]}},
             {"group1", {paths[2], paths[3]}}});
    } else if (name == "merging") {
        check_photons(name, n, 2, 2);
        auto v = prepare({{"gate", "cpath"}, {"control", 1}, {"target", 2}}).paths.at("v").front();
        int anc = 0;
        s = add_plus_ancilla(s, &anc);
        run({{"gate", "merging"},
             {"photon", 2},
             {"path_a", "2"},
             {"path_b", v},
             {"ancilla", anc},
             {"carrier", {{"photon", 1}}}});
        d.logical = {1, anc};
    } else if (name == "merging-n") {
        check_photons(name, n, 3, 3);
        auto v = prepare({{"gate", "cpath"}, {"control", 1}, {"target", 3}}).paths.at("v").front();
        auto moved = prepare({{"gate", "cpath2"}, {"control", 2}, {"target", 3}, {"paths", {"3", v}}}).paths.at("v");
        int anc = 0;
        s = add_plus_ancilla(s, &anc);
        Json call{{"gate", "merging-n"},
                  {"photon", 3},
                  {"paths", {"3", moved[0], v, moved[1]}},
                  {"ancilla", anc},
                  {"carriers", {{{"photon", 1}}, {{"photon", 2}}}}};
        if (options.contains("interference")) call["interference"] = options.at("interference");
        run(call);
        d.logical = {1, 2, anc};
    } else if (name == "two-qubit" || name == "multi-qubit") {
        check_photons(name, n, 2, name == "two-qubit" ? 2 : kMaxLogicalPhotons);
        Json call{{"gate", name}, {"photons", sequence(1, n)}, {"matrix", option("matrix", n == 2 ? "cnot" : "qft")}};
        if (options.contains("interference")) call["interference"] = options.at("interference");
        d.logical = run(call).report.photons.at("logical");
    } else if (name == "toffoli") {
        check_photons(name, n, 2, kMaxLogicalPhotons);
        d.logical = run({{"gate", name}, {"controls", sequence(1, n - 1)}, {"target", n}, {"layout", layout}})
                        .report.photons.at("logical");
    } else if (name == "cn-u1") {
        check_photons(name, n, 2, kMaxLogicalPhotons);
        d.logical = run({{"gate", name},
                         {"controls", sequence(1, n - 1)},
                         {"target", n},
                         {"matrix", option("matrix", "h")},
                         {"layout", layout}})
                        .report.photons.at("logical");
    } else if (name == "cn-uk") {
        check_photons(name, n, 3, kMaxLogicalPhotons);
        int k = options.value("targets", 2);
        if (k < 1 || k >= n) fail(ErrorCode::InvalidArgument, "cn-uk needs at least one control and one target");
        d.logical = run({{"gate", name},
                         {"controls", sequence(1, n - k)},
                         {"targets", sequence(n - k + 1, n)},
                         {"matrix", option("matrix", k == 2 ? Json("cnot") : Json("haar:7"))},
                         {"layout", layout}})
                        .report.photons.at("logical");
    } else if (name == "to-qudit" || name == "teleport") {
        check_photons(name, n, 2, kMaxLogicalPhotons);
        auto r = run({{"gate", name}, {"photons", sequence(1, n)}});
        d.qudit = r.report.photons.at("qudit").front();
        d.qudit_paths = r.report.paths.at("qudit");
    } else if (name == "from-qudit") {
        check_photons(name, n, 2, kMaxLogicalPhotons);
        auto r = prepare({{"gate", "to-qudit"}, {"photons", sequence(1, n)}});
        d.logical = run({{"gate", name},
                         {"qudit", r.photons.at("qudit").front()},
                         {"paths", r.paths.at("qudit")},
                         {"companions", r.photons.at("companions")}})
                        .report.photons.at("logical");
    } else {
        fail(ErrorCode::Parse, "unknown gate '" + name + "'");
    }
    return d;
}

Json qudit_json(const HybridState &s, int photon, const std::vector<std::string> &paths) {
    auto amps = qudit_amplitudes(s, photon, paths);
    Json out = Json::array();
    for (std::size_t i = 0; i < amps.size(); ++i)
        out.push_back({{"path", paths[i / 2]}, {"pol", i % 2 ? "V" : "H"}, {"amplitude", complex_to_json(amps[i])}});
    return out;
}

Demo demo_for(const std::string &name, const std::string &input, const GateParams &p, const Json &options) {
    if (std::find(gate_names().begin(), gate_names().end(), name) == gate_names().end())
        fail(ErrorCode::Parse, "unknown gate '" + name + "'");
    int n = options.value("photons", 0);
    if (n == 0) n = default_photons(name);
    auto spec = parse_state_spec(input, input.rfind("haar", 0) == 0 ? n : 0);
    return build_demo(name, register_from_spec(spec), spec.photons, p, options);
}

double overlap_fidelity(const std::vector<Complex> &a, const std::vector<Complex> &b) {
    if (a.size() != b.size()) return 0.0;
    Complex ip = 0.0;
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ip += std::conj(a[i]) * b[i];
        na += std::norm(a[i]);
        nb += std::norm(b[i]);
    }
    return std::norm(ip) / (na * nb);
}

}  // namespace

Json run_gate_demo(const std::string &name, const std::string &input, const GateParams &p, const Json &options) {
    Demo d = demo_for(name, input, p, options);
    Json out;
    out["gate"] = name;
    out["input"] = input;
    out["params"] = params_to_json(p);
    out["setup"] = d.setup;
    out["report"] = report_to_json(d.result.report);
    if (!d.logical.empty()) {
        out["logical_photons"] = d.logical;
        out["logical"] = logical_json(d.result.state, d.logical);
    }
    if (!d.qudit_paths.empty()) out["qudit"] = qudit_json(d.result.state, d.qudit, d.qudit_paths);
    out["state"] = state_to_json(d.result.state);
    return out;
}

Json verify_case(const Json &c, const GateParams &base) {
    Args a(c, "golden case");
    const std::string name = a.get<std::string>("name", "unnamed");
    const double tol = a.get<double>("tolerance", 1e-8);
    GateParams p = a.has("params") ? params_from_json(a.at("params"), base) : base;
    const Json &expect = a.at("expect");
    double fid = 0.0;
    std::string compared;

    if (a.has("program")) {
        Json result = run_program(a.at("program"), p);
        HybridState got = state_from_json(result.at("state"));
        if (expect.is_object()) {
            fid = fidelity(got, state_from_json(expect));
            compared = "state";
        } else {
            if (!result.contains("logical")) fail(ErrorCode::Parse, name + ": program declares no logical outputs");
            const auto bits = result.at("logical").at(0).at("basis").get<std::string>().size();
            std::vector<Complex> got_amps(std::size_t{1} << bits);
            for (const auto &e : result.at("logical")) {
                auto basis = e.at("basis").get<std::string>();
                std::size_t idx = 0;
                for (char ch : basis) idx = idx * 2 + (ch == 'V');
                got_amps[idx] = complex_from_json(e.at("amplitude"));
            }
            fid = overlap_fidelity(parse_state_spec(expect.get<std::string>(), static_cast<int>(bits)).coefficients,
                                   got_amps);
            compared = "logical";
        }
    } else {
        Demo d = demo_for(a.get<std::string>("gate"), a.get<std::string>("input"), p,
                          a.has("options") ? a.at("options") : Json::object());
        if (expect.is_object()) {
            fid = fidelity(d.result.state, state_from_json(expect));
            compared = "state";
        } else if (!d.qudit_paths.empty()) {
            int bits = 1;
            while ((std::size_t{1} << bits) < 2 * d.qudit_paths.size()) ++bits;
            auto want = parse_state_spec(expect.get<std::string>(), bits).coefficients;
            fid = overlap_fidelity(want, qudit_amplitudes(d.result.state, d.qudit, d.qudit_paths));
            compared = "qudit";
        } else if (!d.logical.empty()) {
            auto want = parse_state_spec(expect.get<std::string>(), static_cast<int>(d.logical.size())).coefficients;
            fid = overlap_fidelity(want, logical_amplitudes(d.result.state, d.logical));
            compared = "logical";
        } else {
            fail(ErrorCode::Parse, name + ": this gate needs a full expected state");
        }
    }
    return {{"name", name}, {"compared", compared}, {"fidelity", fid}, {"passed", fid >= 1.0 - tol}};
}

}  // namespace qubus
