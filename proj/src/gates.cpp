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

#include "qubus/gates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "qubus/error.hpp"

namespace qubus {

namespace {

constexpr double kPi = std::numbers::pi;

std::string occupied_list(const HybridState &s, int photon) {
    std::string out;
    for (PathId p : s.occupied_paths(photon)) {
        if (!out.empty()) out += ",";
        out += path_name(p);
    }
    return out;
}

void require_photon(const HybridState &s, int photon, const char *role) {
    if (!s.registry().has_photon(photon))
        fail(ErrorCode::Registry, std::string(role) + " photon " + std::to_string(photon) + " is not in the state");
}

std::string single_path(const HybridState &s, int photon, const char *role) {
    require_photon(s, photon, role);
    auto occ = s.occupied_paths(photon);
    if (occ.size() != 1)
        fail(ErrorCode::Validation, std::string(role) + " photon " + std::to_string(photon) +
                                        " must occupy a single path (occupies " + occupied_list(s, photon) + ")");
    return path_name(occ.front());
}

void require_plus(const HybridState &s, int photon, const char *role) {
    single_path(s, photon, role);
    HybridState u = normalize(s);
    Complex x = inner_product(u, sigma_x(u, photon));
    if (std::abs(x - 1.0) > 1e-9)
        fail(ErrorCode::Validation, std::string(role) + " photon " + std::to_string(photon) + " is not in |+>");
}

void require_within(const HybridState &s, int photon, const std::vector<std::string> &paths, const char *role) {
    std::set<PathId> listed;
    for (const auto &p : paths) {
        if (!s.registry().has_path(photon, intern_path(p)))
            fail(ErrorCode::Registry, "path '" + p + "' is not registered for " + role + " photon " + std::to_string(photon));
        if (!listed.insert(intern_path(p)).second) fail(ErrorCode::InvalidArgument, "path '" + p + "' listed twice");
    }
    for (PathId p : s.occupied_paths(photon))
        if (!listed.count(p))
            fail(ErrorCode::Validation, std::string(role) + " photon " + std::to_string(photon) + " occupies path '" +
                                            path_name(p) + "' outside the expected rails");
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

LoggedRecord log_of(const std::string &stage, const MeasurementRecord &r) {
    return {stage, r.kind, r.value, r.target, r.probability, r.misidentification};
}

bool is_power_of_two(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
    int m = 0;
    while ((std::size_t{1} << m) < n) ++m;
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

double GateParams::beta2() const {
    double s = std::sin(theta);
    return 2.0 * alpha * alpha * s * s;
}

GateParams GateParams::for_beta2(double beta2, double theta) {
    if (!(beta2 > 0.0) || std::sin(theta) == 0.0) fail(ErrorCode::InvalidArgument, "beta^2 and sin(theta) must be nonzero");
    GateParams p;
    p.theta = theta;
    double s = std::sin(theta);
    p.alpha = std::sqrt(beta2 / (2.0 * s * s));
    return p;
}

std::mt19937_64 &GateParams::generator() const {
    if (!rng_) rng_ = std::make_shared<std::mt19937_64>(seed);
    return *rng_;
}

Resources &Resources::operator+=(const Resources &o) {
    xpm_couplings += o.xpm_couplings;
    qubus_modes += o.qubus_modes;
    detections += o.detections;
    ancilla_photons += o.ancilla_photons;
    cpath_family += o.cpath_family;
    disentanglers += o.disentanglers;
    entanglers += o.entanglers;
    mergings += o.mergings;
    lomis += o.lomis;
    bell_measurements += o.bell_measurements;
    restricted_unitaries += o.restricted_unitaries;
    return *this;
}

void GateReport::absorb(const GateReport &sub) {
    outcome_log.insert(outcome_log.end(), sub.outcome_log.begin(), sub.outcome_log.end());
    outcomes.insert(outcomes.end(), sub.outcomes.begin(), sub.outcomes.end());
    success_probability *= sub.success_probability;
    min_fidelity = std::min(min_fidelity, sub.min_fidelity);
    resources += sub.resources;
}

// ---------------------------------------------------------------------------------------------
// Stage runners

GateResult settle(const std::string &stage, std::vector<Candidate> candidates, const GateParams &p) {
    if (candidates.empty()) fail(ErrorCode::Numeric, stage + ": no measurement outcome above the probability floor");
    std::size_t ref = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        auto qi = candidates[i].state.registry().qubus_modes().size();
        auto qr = candidates[ref].state.registry().qubus_modes().size();
        if (qi < qr || (qi == qr && candidates[i].probability > candidates[ref].probability)) ref = i;
    }
    std::size_t chosen = ref;
    if (p.policy == OutcomePolicy::Sample) {
        double total = 0.0;
        for (const auto &c : candidates) total += c.probability;
        double u = static_cast<double>(p.generator()() >> 11) * 0x1.0p-53 * total;
        double acc = 0.0;
        chosen = candidates.size() - 1;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            acc += candidates[i].probability;
            if (u < acc) {
                chosen = i;
                break;
            }
        }
    }

    GateResult r;
    r.report.gate = stage;
    r.report.success_probability = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        auto &c = candidates[i];
        double f = i == ref ? 1.0 : fidelity(c.state, candidates[ref].state);
        r.report.outcomes.push_back({stage, c.label, c.probability, f});
        r.report.min_fidelity = std::min(r.report.min_fidelity, f);
        if (f >= 1.0 - p.fidelity_tolerance) r.report.success_probability += c.probability;
        if (p.keep_outcome_states) r.outcome_states.push_back({stage, c.label, c.probability, c.state});
    }
    r.report.success_probability = std::min(r.report.success_probability, 1.0);
    r.report.outcome_log.push_back(candidates[chosen].record);
    r.state = std::move(candidates[chosen].state);
    return r;
}

HybridState xpm_interaction(const HybridState &s, const XpmStagePlan &plan, const GateParams &p, int *beam0, int *beam1) {
    if (!(p.alpha > 0.0)) fail(ErrorCode::InvalidArgument, "qubus amplitude must be positive");
    HybridState t = apply_elements(s, plan.prepare);
    int m0 = 0, m1 = 0;
    t = add_qubus(t, p.alpha, &m0);
    t = add_qubus(t, p.alpha, &m1);
    for (const auto &c : plan.couplings) {
        if (c.beam != 0 && c.beam != 1) fail(ErrorCode::InvalidArgument, "coupling beam must be 0 or 1");
        t = xpm(t, c.beam == 0 ? m0 : m1, c.selector, p.theta);
    }
    t = qubus_phase(t, m0, -p.theta);
    t = qubus_phase(t, m1, -p.theta);
    if (beam0) *beam0 = m0;
    if (beam1) *beam1 = m1;
    return t;
}

GateResult run_xpm_stage(const HybridState &s, const XpmStagePlan &plan, const GateParams &p) {
    int m0 = 0, m1 = 0;
    HybridState t = xpm_interaction(s, plan, p, &m0, &m1);
    t = qubus_bs(t, m0, m1);
    t = apply_elements(t, plan.finish);

    std::vector<MeasurementRecord> records;
    if (p.qnd_mode == QndMode::Ideal) {
        records = fock_outcomes(t, m0, p.probability_floor);
    } else {
        auto pmf = fock_distribution(t, m0);
        int max_peak = 1;
        for (std::size_t n = 0; n < pmf.size(); ++n)
            if (pmf[n] > p.probability_floor) max_peak = std::max(max_peak, static_cast<int>(n));
        auto cfg = QndConfig::with_default_bins(p.gamma, p.theta_probe, p.eta, max_peak);
        records = qnd_outcomes(t, m0, cfg, QndMode::Binned, p.probability_floor);
    }

    std::vector<Candidate> candidates;
    candidates.reserve(records.size());
    for (auto &rec : records) {
        HybridState st = plan.feed_forward ? apply_elements(rec.collapsed, plan.feed_forward(rec.value)) : rec.collapsed;
        st = release_qubus(st, m1);
        candidates.push_back({record_label(rec), rec.probability, std::move(st), log_of(plan.name, rec)});
    }
    GateResult r = settle(plan.name, std::move(candidates), p);
    r.report.resources.xpm_couplings = static_cast<int>(plan.couplings.size());
    r.report.resources.qubus_modes = 2;
    r.report.resources.detections = 1;
    return r;
}

GateResult run_presence_stage(const HybridState &s, const PresenceStagePlan &plan, const GateParams &p) {
    std::vector<Candidate> candidates;
    for (std::size_t k = 0; k < plan.rails.size(); ++k) {
        for (auto &rec : presence_outcomes(s, plan.photon, plan.rails[k], p.probability_floor)) {
            if (rec.value != 1) continue;
            HybridState st = plan.feed_forward ? apply_elements(rec.collapsed, plan.feed_forward(k)) : rec.collapsed;
            candidates.push_back({plan.rails[k], rec.probability, std::move(st), log_of(plan.name, rec)});
        }
    }
    GateResult r = settle(plan.name, std::move(candidates), p);
    r.report.resources.detections = static_cast<int>(plan.rails.size());
    return r;
}

// ---------------------------------------------------------------------------------------------
// Plans

XpmStagePlan parity_plan(const HybridState &s, int photon1, int photon2, const std::string &new_path) {
    std::string p1 = single_path(s, photon1, "first");
    std::string p2 = single_path(s, photon2, "second");
    if (photon1 == photon2) fail(ErrorCode::InvalidArgument, "parity gate needs two photons");
    XpmStagePlan plan;
    plan.name = "parity";
    plan.prepare = {op::photon_bs(photon2, p2, new_path)};
    plan.couplings = {
        {0, {photon1, p1, Pol::H}},       {0, {photon2, p2, Pol::H}}, {0, {photon2, new_path, Pol::V}},
        {1, {photon1, p1, Pol::V}},       {1, {photon2, p2, Pol::V}}, {1, {photon2, new_path, Pol::H}},
    };
    plan.feed_forward = [=](int n) {
        std::vector<ElementOp> ops;
        if (n == 0) return ops;
        ops.push_back(op::path_switch(photon2, p2, new_path));
        if (n % 2) ops.push_back(op::pol_phase(photon1, p1, kPi));
        return ops;
    };
    return plan;
}

XpmStagePlan c_path_plan(const HybridState &s, int control, int target, const std::string &v_path) {
    std::string c = single_path(s, control, "control");
    std::string t = single_path(s, target, "target");
    if (control == target) fail(ErrorCode::InvalidArgument, "control and target must differ");
    XpmStagePlan plan;
    plan.name = "c_path";
    plan.prepare = {op::photon_bs(target, t, v_path)};
    plan.couplings = {
        {0, {control, c, Pol::V}},
        {0, {target, t, std::nullopt}},
        {1, {control, c, Pol::H}},
        {1, {target, v_path, std::nullopt}},
    };
    plan.feed_forward = [=](int n) {
        std::vector<ElementOp> ops;
        if (n == 0) return ops;
        ops.push_back(op::path_switch(target, t, v_path));
        if (n % 2) ops.push_back(op::path_phase(target, t, kPi));
        return ops;
    };
    return plan;
}

XpmStagePlan c_path2_plan(const HybridState &s, int control, int target, const std::vector<std::string> &paths,
                          const std::vector<std::string> &new_paths) {
    std::string c = single_path(s, control, "control");
    require_photon(s, target, "target");
    if (control == target) fail(ErrorCode::InvalidArgument, "control and target must differ");
    if (paths.empty() || !is_power_of_two(paths.size()))
        fail(ErrorCode::InvalidArgument, "C-path-2 needs the target on a power-of-two number of paths");
    if (new_paths.size() != paths.size()) fail(ErrorCode::InvalidArgument, "C-path-2 needs one new path per target path");
    require_within(s, target, paths, "target");
    XpmStagePlan plan;
    plan.name = "c_path2";
    for (std::size_t i = 0; i < paths.size(); ++i) plan.prepare.push_back(op::photon_bs(target, paths[i], new_paths[i]));
    plan.couplings.push_back({0, {control, c, Pol::V}});
    for (const auto &p : paths) plan.couplings.push_back({0, {target, p, std::nullopt}});
    plan.couplings.push_back({1, {control, c, Pol::H}});
    for (const auto &q : new_paths) plan.couplings.push_back({1, {target, q, std::nullopt}});
    plan.feed_forward = [=](int n) {
        std::vector<ElementOp> ops;
        if (n == 0) return ops;
        for (std::size_t i = 0; i < paths.size(); ++i) ops.push_back(op::path_switch(target, paths[i], new_paths[i]));
        if (n % 2)
            for (const auto &p : paths) ops.push_back(op::path_phase(target, p, kPi));
        return ops;
    };
    return plan;
}

XpmStagePlan c_path3_plan(const HybridState &s, const CPath3Spec &spec) {
    require_photon(s, spec.control, "control");
    std::string t = single_path(s, spec.target, "target");
    if (spec.control == spec.target) fail(ErrorCode::InvalidArgument, "control and target must differ");
    if (spec.first == spec.second) fail(ErrorCode::InvalidArgument, "C-path-3 control paths must differ");
    require_within(s, spec.control, {spec.first, spec.second}, "control");
    const int c = spec.control;
    XpmStagePlan plan;
    plan.name = "c_path3";
    if (spec.layout == CPath3Layout::Standard) {
        if (spec.rail.empty()) fail(ErrorCode::InvalidArgument, "C-path-3 needs a rail for the separated polarization");
        plan.prepare = {op::pbs(c, spec.first, spec.first, spec.rail), op::sigma_x(c, spec.rail)};
    } else if (spec.shared.empty()) {
        fail(ErrorCode::InvalidArgument, "shared-mode C-path-3 needs the predecessor selectors");
    }
    plan.prepare.push_back(op::photon_bs(spec.target, t, spec.v_path));
    plan.couplings = {{0, {c, spec.second, Pol::V}}, {0, {spec.target, t, std::nullopt}}};
    if (spec.layout == CPath3Layout::Standard) {
        plan.couplings.push_back({1, {c, spec.first, Pol::H}});
        plan.couplings.push_back({1, {c, spec.rail, Pol::H}});
    } else {
        for (const auto &sel : spec.shared) {
            if (sel.photon == c || sel.photon == spec.target)
                fail(ErrorCode::InvalidArgument, "shared-mode selectors must belong to another photon");
            plan.couplings.push_back({1, sel});
        }
    }
    plan.couplings.push_back({1, {c, spec.second, Pol::H}});
    plan.couplings.push_back({1, {spec.target, spec.v_path, std::nullopt}});
    if (spec.layout == CPath3Layout::Standard)
        plan.finish = {op::sigma_x(c, spec.rail), op::pbs_combine(c, spec.first, spec.rail, spec.first)};
    const int target = spec.target;
    const std::string v = spec.v_path;
    plan.feed_forward = [=](int n) {
        std::vector<ElementOp> ops;
        if (n == 0) return ops;
        ops.push_back(op::path_switch(target, t, v));
        if (n % 2) ops.push_back(op::path_phase(target, t, kPi));
        return ops;
    };
    return plan;
}

XpmStagePlan entangler_polarization_plan(const HybridState &s, int ancilla, int target,
                                         const std::vector<std::string> &paths) {
    std::string a = single_path(s, ancilla, "ancilla");
    require_photon(s, target, "target");
    if (ancilla == target) fail(ErrorCode::InvalidArgument, "ancilla and target must differ");
    if (paths.empty()) fail(ErrorCode::InvalidArgument, "entangler needs at least one target path");
    require_within(s, target, paths, "target");
    XpmStagePlan plan;
    plan.name = "entangler";
    plan.couplings.push_back({0, {ancilla, a, Pol::H}});
    for (const auto &p : paths) plan.couplings.push_back({0, {target, p, Pol::V}});
    plan.couplings.push_back({1, {ancilla, a, Pol::V}});
    for (const auto &p : paths) plan.couplings.push_back({1, {target, p, Pol::H}});
    plan.feed_forward = [=](int n) {
        std::vector<ElementOp> ops;
        if (n == 0) return ops;
        ops.push_back(op::sigma_x(ancilla));
        if (n % 2) ops.push_back(op::sigma_z(ancilla));
        return ops;
    };
    return plan;
}

XpmStagePlan entangler_path_plan(const HybridState &s, int photon, int target, const std::vector<std::string> &group0,
                                 const std::vector<std::string> &group1) {
    std::string a = single_path(s, photon, "companion");
    require_photon(s, target, "target");
    if (photon == target) fail(ErrorCode::InvalidArgument, "companion and target must differ");
    if (group0.empty() || group1.empty()) fail(ErrorCode::InvalidArgument, "entangler needs two non-empty path groups");
    std::vector<std::string> all = group0;
    all.insert(all.end(), group1.begin(), group1.end());
    require_within(s, target, all, "target");
    XpmStagePlan plan;
    plan.name = "entangler";
    plan.couplings.push_back({0, {photon, a, Pol::H}});
    for (const auto &p : group1) plan.couplings.push_back({0, {target, p, std::nullopt}});
    plan.couplings.push_back({1, {photon, a, Pol::V}});
    for (const auto &p : group0) plan.couplings.push_back({1, {target, p, std::nullopt}});
    plan.feed_forward = [=](int n) {
        std::vector<ElementOp> ops;
        if (n == 0) return ops;
        ops.push_back(op::sigma_x(photon));
        if (n % 2) ops.push_back(op::sigma_z(photon));
        return ops;
    };
    return plan;
}

// ---------------------------------------------------------------------------------------------
// Gates

GateResult parity_gate(const HybridState &s, int photon1, int photon2, const GateParams &p, std::string new_path) {
    std::string p2 = single_path(s, photon2, "second");
    if (new_path.empty()) new_path = s.registry().fresh_path(p2 + "'");
    auto plan = parity_plan(s, photon1, photon2, new_path);
    GateResult r = run_xpm_stage(s, plan, p);
    r.report.gate = "parity";
    r.report.paths["even"] = {single_path(s, photon1, "first"), new_path};
    r.report.paths["odd"] = {single_path(s, photon1, "first"), p2};
    return r;
}

GateResult c_path(const HybridState &s, int control, int target, const GateParams &p, std::string v_path) {
    std::string t = single_path(s, target, "target");
    if (v_path.empty()) v_path = s.registry().fresh_path(t + "'");
    GateResult r = run_xpm_stage(s, c_path_plan(s, control, target, v_path), p);
    r.report.gate = "c_path";
    r.report.resources.cpath_family = 1;
    r.report.paths["h"] = {t};
    r.report.paths["v"] = {v_path};
    return r;
}

GateResult c_path2(const HybridState &s, int control, int target, const std::vector<std::string> &paths, const GateParams &p,
                   std::vector<std::string> new_paths) {
    require_photon(s, target, "target");
    if (new_paths.empty()) {
        std::vector<std::string> hints;
        for (const auto &q : paths) hints.push_back(q + "'");
        new_paths = fresh_paths(s.registry(), target, hints);
    }
    GateResult r = run_xpm_stage(s, c_path2_plan(s, control, target, paths, new_paths), p);
    r.report.gate = "c_path2";
    r.report.resources.cpath_family = 1;
    r.report.paths["h"] = paths;
    r.report.paths["v"] = new_paths;
    return r;
}

GateResult c_path3(const HybridState &s, CPath3Spec spec, const GateParams &p) {
    std::string t = single_path(s, spec.target, "target");
    if (spec.v_path.empty()) spec.v_path = s.registry().fresh_path(t + "'");
    if (spec.layout == CPath3Layout::Standard && spec.rail.empty()) {
        ModeRegistry reg = s.registry();
        reg.add_path(spec.target, spec.v_path);
        spec.rail = reg.fresh_path(spec.first + "'");
    }
    GateResult r = run_xpm_stage(s, c_path3_plan(s, spec), p);
    r.report.gate = "c_path3";
    r.report.resources.cpath_family = 1;
    r.report.paths["h"] = {t};
    r.report.paths["v"] = {spec.v_path};
    return r;
}

GateResult disentangler(const HybridState &s, int control, int target, const std::vector<std::string> &v_paths,
                        const GateParams &p) {
    std::string c = single_path(s, control, "control");
    require_photon(s, target, "target");
    for (const auto &v : v_paths)
        if (!s.registry().has_path(target, intern_path(v)))
            fail(ErrorCode::Registry, "path '" + v + "' is not registered for target photon " + std::to_string(target));
    std::string minus = s.registry().fresh_path(c + "-");
    HybridState t = pbs_pm(s, control, c, c, minus);
    PresenceStagePlan plan;
    plan.name = "disentangler";
    plan.photon = control;
    plan.rails = {c, minus};
    plan.feed_forward = [=](std::size_t rail) {
        std::vector<ElementOp> ops{op::pbs_pm_combine(control, c, minus, c)};
        if (rail == 1) {
            ops.push_back(op::sigma_z(control, c));
            for (const auto &v : v_paths) ops.push_back(op::path_phase(target, v, kPi));
        }
        return ops;
    };
    GateResult r = run_presence_stage(t, plan, p);
    r.report.gate = "disentangler";
    r.report.resources.disentanglers = 1;
    return r;
}

GateResult entangler(const HybridState &s, int variant, const EntanglerArgs &args, const GateParams &p) {
    XpmStagePlan plan;
    switch (variant) {
        case 1:
        case 4:
            require_plus(s, args.photon, "ancilla");
            if (variant == 1 && args.paths.size() != 2)
                fail(ErrorCode::InvalidArgument, "entangler variant 1 acts on a photon over exactly two paths");
            if (variant == 4 && (args.paths.size() < 2 || !is_power_of_two(args.paths.size())))
                fail(ErrorCode::InvalidArgument, "entangler variant 4 needs a power-of-two number of paths (at least 2)");
            plan = entangler_polarization_plan(s, args.photon, args.target, args.paths);
            break;
        case 2:
        case 3:
            require_plus(s, args.photon, "companion");
            if (variant == 2 && (args.group0.size() != 1 || args.group1.size() != 1))
                fail(ErrorCode::InvalidArgument, "entangler variant 2 needs one path in each group");
            if (variant == 3 && (args.group0.size() != args.group1.size() ||
                                 !is_power_of_two(args.group0.size() + args.group1.size())))
                fail(ErrorCode::InvalidArgument, "entangler variant 3 needs two equal groups spanning a power-of-two rail set");
            plan = entangler_path_plan(s, args.photon, args.target, args.group0, args.group1);
            break;
        default:
            fail(ErrorCode::InvalidArgument, "entangler variant must be 1, 2, 3 or 4");
    }
    plan.name = "entangler" + std::to_string(variant);
    GateResult r = run_xpm_stage(s, plan, p);
    r.report.gate = plan.name;
    r.report.resources.entanglers = 1;
    return r;
}

std::vector<std::vector<ElementOp>> merging_feed_forward_table(const Eigen::MatrixXcd &w, int ancilla,
                                                               const std::vector<PhaseCarrier> &carriers) {
    const auto n = static_cast<std::size_t>(w.rows());
    if (w.rows() != w.cols() || !is_power_of_two(n) || n < 2)
        fail(ErrorCode::InvalidArgument, "merging interference must be square with a power-of-two dimension");
    const int m = log2_exact(n);
    if (static_cast<int>(carriers.size()) != m)
        fail(ErrorCode::InvalidArgument, "merging over " + std::to_string(n) + " paths needs " + std::to_string(m) +
                                             " phase carriers");
    const double mag = 1.0 / std::sqrt(static_cast<double>(n));
    auto wrap = [](double x) { return std::remainder(x, 2 * kPi); };
    std::vector<std::vector<ElementOp>> table(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> rel(n);
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(std::abs(w(k, j)) - mag) > 1e-9)
                fail(ErrorCode::Validation, "merging interference must have entries of equal magnitude");
            rel[j] = std::arg(w(k, j) / w(k, 0));
        }
        std::vector<double> bit(m);
        for (int i = 0; i < m; ++i) bit[i] = rel[std::size_t{1} << (m - 1 - i)];
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (int i = 0; i < m; ++i)
                if (j >> (m - 1 - i) & 1) sum += bit[i];
            if (std::abs(wrap(sum - rel[j])) > 1e-9)
                fail(ErrorCode::Validation, "merging interference phases do not factor over the path-index bits");
        }
        std::vector<ElementOp> ops;
        for (int i = 0; i < m; ++i) {
            double phi = wrap(-bit[i]);
            if (std::abs(phi) < 1e-12) continue;
            const auto &c = carriers[i];
            bool flip = std::abs(std::abs(phi) - kPi) < 1e-12;
            if (c.whole_path)
                ops.push_back(op::path_phase(c.photon, c.path, flip ? kPi : phi));
            else if (flip)
                ops.push_back(op::sigma_z(c.photon, c.path));
            else
                ops.push_back(op::pol_phase(c.photon, c.path, phi));
        }
        table[2 * k] = ops;
        ops.insert(ops.begin(), op::sigma_z(ancilla));
        table[2 * k + 1] = std::move(ops);
    }
    return table;
}

GateResult merging_n(const HybridState &s, int photon, const std::vector<std::string> &paths, int ancilla,
                     const std::vector<PhaseCarrier> &carriers, const GateParams &p,
                     std::optional<Eigen::MatrixXcd> interference) {
    const std::size_t n = paths.size();
    if (n < 2 || !is_power_of_two(n)) fail(ErrorCode::InvalidArgument, "merging needs a power-of-two number of paths (at least 2)");
    require_photon(s, photon, "merged");
    require_within(s, photon, paths, "merged");
    require_plus(s, ancilla, "ancilla");
    for (const auto &c : carriers) {
        require_photon(s, c.photon, "carrier");
        if (c.photon == photon || c.photon == ancilla)
            fail(ErrorCode::InvalidArgument, "phase carriers must be other photons");
    }
    Eigen::MatrixXcd w = interference ? *interference : qft_matrix(static_cast<int>(n));
    if (w.rows() != static_cast<long>(n)) fail(ErrorCode::InvalidArgument, "interference dimension does not match the path count");
    require_unitary(w);
    auto table = merging_feed_forward_table(w, ancilla, carriers);

    GateReport report;
    report.gate = n == 2 ? "merging" : "merging_n";
    EntanglerArgs ea;
    ea.photon = ancilla;
    ea.target = photon;
    ea.paths = paths;
    GateResult ent = entangler(s, n == 2 ? 1 : 4, ea, p);
    report.absorb(ent.report);
    std::vector<OutcomeState> kept = std::move(ent.outcome_states);

    HybridState t = ent.state;
    Eigen::MatrixXcd bs(2, 2);
    bs << 1, 1, 1, -1;
    bs /= std::sqrt(2.0);
    if (n == 2 && (w - bs).cwiseAbs().maxCoeff() < 1e-14) {
        t = photon_bs(t, photon, paths[0], paths[1]);
    } else {
        t = path_unitary(t, photon, paths, w);
        if (n > 2) report.resources.lomis += 1;
    }
    std::vector<std::string> hints;
    for (const auto &q : paths) hints.push_back(q + "-");
    auto minus = fresh_paths(t.registry(), photon, hints);
    std::vector<std::string> rails;
    for (std::size_t k = 0; k < n; ++k) {
        t = pbs_pm(t, photon, paths[k], paths[k], minus[k]);
        rails.push_back(paths[k]);
        rails.push_back(minus[k]);
    }
    PresenceStagePlan plan;
    plan.name = report.gate;
    plan.photon = photon;
    plan.rails = rails;
    const std::string home = paths[0];
    plan.feed_forward = [=](std::size_t rail) {
        std::vector<ElementOp> ops = table[rail];
        if (rail % 2) ops.push_back(op::sigma_z(photon, rails[rail]));
        if (rails[rail] != home) ops.push_back(op::path_switch(photon, rails[rail], home));
        return ops;
    };
    GateResult det = run_presence_stage(t, plan, p);
    report.absorb(det.report);
    kept.insert(kept.end(), det.outcome_states.begin(), det.outcome_states.end());
    report.resources.mergings += 1;
    report.resources.ancilla_photons += 1;
    report.photons["merged"] = {ancilla};
    report.photons["recycled"] = {photon};
    report.paths["recycled"] = {home};
    return {det.state, std::move(report), std::move(kept)};
}

GateResult merging(const HybridState &s, int photon, const std::string &path_a, const std::string &path_b, int ancilla,
                   const PhaseCarrier &carrier, const GateParams &p) {
    Eigen::MatrixXcd bs(2, 2);
    bs << 1, 1, 1, -1;
    bs /= std::sqrt(2.0);
    return merging_n(s, photon, {path_a, path_b}, ancilla, {carrier}, p, bs);
}

}  // namespace qubus
