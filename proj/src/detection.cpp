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

#include "qubus/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "qubus/error.hpp"
#include "state_internal.hpp"

namespace qubus {

namespace {

constexpr double kImpossible = 1e-300;

MeasurementRecord make_record(RecordKind kind, int value, std::string target, const HybridState &unnormalized) {
    MeasurementRecord r;
    r.kind = kind;
    r.value = value;
    r.target = std::move(target);
    double n = norm(unnormalized);
    r.probability = n * n;
    if (!(r.probability > kImpossible))
        fail(ErrorCode::Numeric, "impossible outcome " + std::string(record_kind_name(kind)) + " " + std::to_string(value) +
                                     " on " + r.target);
    r.collapsed = canonicalize(scale(unnormalized, 1.0 / n));
    double m = norm(r.collapsed);
    if (m != 1.0) r.collapsed = scale(r.collapsed, 1.0 / m);
    return r;
}

std::string mode_target(int mode) { return "q" + std::to_string(mode); }

double log_poisson(double mean, int n) {
    if (mean <= 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return -mean + n * std::log(mean) - std::lgamma(n + 1.0);
}

}  // namespace

const char *bell_name(BellState b) {
    switch (b) {
        case BellState::PhiPlus: return "phi+";
        case BellState::PhiMinus: return "phi-";
        case BellState::PsiPlus: return "psi+";
        case BellState::PsiMinus: return "psi-";
    }
    return "?";
}

const char *record_kind_name(RecordKind k) {
    switch (k) {
        case RecordKind::Fock: return "fock";
        case RecordKind::Bin: return "bin";
        case RecordKind::Povm: return "povm";
        case RecordKind::Bell: return "bell";
        case RecordKind::Presence: return "presence";
    }
    return "?";
}

std::string record_label(const MeasurementRecord &r) {
    switch (r.kind) {
        case RecordKind::Fock: return "n=" + std::to_string(r.value);
        case RecordKind::Bin: return "k=" + std::to_string(r.value);
        case RecordKind::Povm: return "povm=" + std::to_string(r.value);
        case RecordKind::Bell: return bell_name(static_cast<BellState>(r.value));
        case RecordKind::Presence: return std::string(r.value ? "present " : "absent ") + r.target;
    }
    return "?";
}

// ---------------------------------------------------------------------------------------------
// QndConfig

double QndConfig::peak_mean(int n) const {
    double s = std::sin(n * theta_probe / 2.0);
    return 2.0 * std::norm(gamma) * s * s;
}

void QndConfig::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) fail(ErrorCode::InvalidArgument, "detector efficiency must lie in (0, 1]");
    if (!std::isfinite(theta_probe)) fail(ErrorCode::InvalidArgument, "probe angle must be finite");
    if (bins.empty()) fail(ErrorCode::InvalidArgument, "QND readout needs at least one bin");
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const auto &b = bins[i];
        if (!(b.lo < b.hi)) fail(ErrorCode::InvalidArgument, "empty bin for peak " + std::to_string(b.peak));
        if (std::abs(b.mean - peak_mean(b.peak)) > 1e-9 * std::max(1.0, b.mean))
            fail(ErrorCode::InvalidArgument, "bin mean for peak " + std::to_string(b.peak) + " does not match the probe response");
        if (i > 0 && bins[i - 1].hi > b.lo) fail(ErrorCode::InvalidArgument, "bins overlap or are out of order");
    }
}

QndConfig QndConfig::with_default_bins(Complex gamma, double theta_probe, double eta, int max_peak) {
    QndConfig cfg;
    cfg.gamma = gamma;
    cfg.theta_probe = theta_probe;
    cfg.eta = eta;
    if (max_peak < 1) max_peak = 1;
    std::vector<double> mu;
    for (int k = 0; k <= max_peak; ++k) {
        mu.push_back(cfg.peak_mean(k));
        if (k > 0 && !(mu[k] > mu[k - 1]))
            fail(ErrorCode::Numeric, "probe response is not monotone at peak " + std::to_string(k) +
                                         "; reduce theta_probe or the photon-number range");
    }
    for (int k = 0; k <= max_peak; ++k) {
        double lo = k == 0 ? 0.0 : 0.5 * (mu[k - 1] + mu[k]);
        double hi = k == max_peak ? std::numeric_limits<double>::infinity() : 0.5 * (mu[k] + mu[k + 1]);
        cfg.bins.push_back(QndBin{k, mu[k], lo, hi});
    }
    return cfg;
}

// ---------------------------------------------------------------------------------------------
// Fock measurement

double poisson_pmf(double mean, int n) { return std::exp(log_poisson(mean, n)); }

Complex fock_amplitude(Complex alpha, int n) {
    if (n < 0) fail(ErrorCode::InvalidArgument, "negative photon number");
    double r = std::abs(alpha);
    if (r == 0.0) return n == 0 ? Complex(1.0) : Complex(0.0);
    double logmag = -0.5 * r * r + n * std::log(r) - 0.5 * std::lgamma(n + 1.0);
    return std::polar(std::exp(logmag), n * std::arg(alpha));
}

int auto_cutoff(const HybridState &s, int mode) {
    auto q = s.registry().qubus_index(mode);
    double m = 0.0;
    for (const auto &b : s.branches()) m = std::max(m, std::norm(b.qubus[q]));
    return static_cast<int>(std::ceil(m + 12.0 * std::sqrt(m))) + 12;
}

std::vector<double> fock_distribution(const HybridState &s, int mode, std::optional<int> cutoff) {
    auto q = s.registry().qubus_index(mode);
    int nmax = cutoff ? *cutoff : auto_cutoff(s, mode);
    if (nmax < 0) fail(ErrorCode::InvalidArgument, "negative cutoff");

    struct Item {
        Complex amp;
        Complex alpha;
        std::vector<Complex> rest;
    };
    std::map<std::vector<Slot>, std::vector<Item>> groups;
    for (const auto &b : s.branches()) {
        Item it{b.amplitude, b.qubus[q], b.qubus};
        it.rest.erase(it.rest.begin() + static_cast<long>(q));
        groups[b.photons].push_back(std::move(it));
    }
    std::vector<double> pmf(static_cast<std::size_t>(nmax) + 1, 0.0);
    double total = 0.0;
    for (const auto &[key, items] : groups) {
        std::size_t g = items.size();
        for (std::size_t i = 0; i < g; ++i) {
            for (std::size_t j = i; j < g; ++j) {
                Complex gram = std::conj(items[i].amp) * items[j].amp * detail::qubus_overlap(items[i].rest, items[j].rest);
                if (gram == 0.0) continue;
                double factor = i == j ? 1.0 : 2.0;
                total += factor * (gram * coherent_overlap(items[i].alpha, items[j].alpha)).real();
                for (int n = 0; n <= nmax; ++n) {
                    Complex c = std::conj(fock_amplitude(items[i].alpha, n)) * fock_amplitude(items[j].alpha, n);
                    pmf[n] += factor * (gram * c).real();
                }
            }
        }
    }
    double sum = 0.0;
    for (auto &p : pmf) {
        p = std::max(p, 0.0) / total;
        sum += p;
    }
    double tail = 1.0 - sum;
    if (tail > 1e-10)
        fail(ErrorCode::Numeric, "Fock cutoff " + std::to_string(nmax) + " too small: tail mass " + std::to_string(tail));
    return pmf;
}

MeasurementRecord fock_project(const HybridState &s, int mode, int n) {
    if (n < 0) fail(ErrorCode::InvalidArgument, "negative photon number");
    auto q = s.registry().qubus_index(mode);
    ModeRegistry reg = s.registry();
    reg.remove_qubus_mode(mode);
    std::vector<Branch> out;
    out.reserve(s.size());
    for (const auto &b : s.branches()) {
        Complex c = fock_amplitude(b.qubus[q], n);
        if (c == 0.0) continue;
        Branch nb{b.amplitude * c, b.photons, b.qubus};
        nb.qubus.erase(nb.qubus.begin() + static_cast<long>(q));
        out.push_back(std::move(nb));
    }
    auto projected = canonicalize(HybridState(std::move(reg), std::move(out)), 0.0);
    return make_record(RecordKind::Fock, n, mode_target(mode), projected);
}

std::vector<MeasurementRecord> fock_outcomes(const HybridState &s, int mode, double floor) {
    auto pmf = fock_distribution(s, mode);
    std::vector<MeasurementRecord> out;
    for (std::size_t n = 0; n < pmf.size(); ++n) {
        if (pmf[n] > floor) out.push_back(fock_project(s, mode, static_cast<int>(n)));
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Binned QND readout

std::vector<double> binned_response(const QndConfig &cfg, int n) {
    double mu = cfg.peak_mean(n);
    std::vector<double> q(cfg.bins.size(), 0.0);
    auto bin_of = [&](double m) -> long {
        for (std::size_t i = 0; i < cfg.bins.size(); ++i)
            if (m >= cfg.bins[i].lo && m < cfg.bins[i].hi) return static_cast<long>(i);
        return -1;
    };
    double outside = 0.0;
    // no click: sum_m Poisson(m) (1 - eta)^m
    double no_click = std::exp(-cfg.eta * mu);
    long zero = -1;
    for (std::size_t i = 0; i < cfg.bins.size(); ++i)
        if (cfg.bins[i].peak == 0) zero = static_cast<long>(i);
    if (zero < 0)
        outside += no_click;
    else
        q[zero] += no_click;
    double width = 12.0 * std::sqrt(mu) + 12.0;
    int lo = std::max(1, static_cast<int>(std::floor(mu - width)));
    int hi = static_cast<int>(std::ceil(mu + width));
    double log_dark = cfg.eta < 1.0 ? std::log1p(-cfg.eta) : -std::numeric_limits<double>::infinity();
    for (int m = lo; m <= hi; ++m) {
        double w = poisson_pmf(mu, m);
        if (w == 0.0) continue;
        double click = -std::expm1(m * log_dark);
        long k = bin_of(m);
        if (k < 0)
            outside += w * click;
        else
            q[k] += w * click;
    }
    if (outside > 1e-12)
        fail(ErrorCode::Numeric, "ambiguous readout: photon number " + std::to_string(n) + " puts probability " +
                                     std::to_string(outside) + " outside every bin");
    return q;
}

std::vector<double> binned_distribution(const QndConfig &cfg, const std::vector<double> &pmf, double floor) {
    cfg.validate();
    std::vector<double> out(cfg.bins.size(), 0.0);
    for (std::size_t n = 0; n < pmf.size(); ++n) {
        if (pmf[n] <= floor * 1e-3) continue;
        auto q = binned_response(cfg, static_cast<int>(n));
        for (std::size_t k = 0; k < q.size(); ++k) out[k] += pmf[n] * q[k];
    }
    return out;
}

std::vector<MeasurementRecord> qnd_outcomes(const HybridState &s, int mode, const QndConfig &cfg, QndMode qmode,
                                            double floor) {
    if (qmode == QndMode::Ideal) return fock_outcomes(s, mode, floor);
    auto pmf = fock_distribution(s, mode);
    auto dist = binned_distribution(cfg, pmf, floor);
    std::vector<MeasurementRecord> out;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        if (dist[k] <= floor) continue;
        int peak = cfg.bins[k].peak;
        if (static_cast<std::size_t>(peak) >= pmf.size() || pmf[peak] <= kImpossible) {
            fail(ErrorCode::Numeric, "ambiguous readout: bin " + std::to_string(peak) + " fires with probability " +
                                         std::to_string(dist[k]) + " but that photon number cannot occur");
        }
        auto rec = fock_project(s, mode, peak);
        rec.kind = RecordKind::Bin;
        double correct = pmf[peak] * binned_response(cfg, peak)[k];
        rec.misidentification = std::max(0.0, 1.0 - correct / dist[k]);
        rec.probability = dist[k];
        out.push_back(std::move(rec));
    }
    return out;
}

MeasurementRecord qnd_measure(const HybridState &s, int mode, const QndConfig &cfg, QndMode qmode, std::mt19937_64 &rng) {
    auto outcomes = qnd_outcomes(s, mode, cfg, qmode);
    double total = 0.0;
    for (const auto &o : outcomes) total += o.probability;
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
    for (auto &o : outcomes) {
        if (u < o.probability) return std::move(o);
        u -= o.probability;
    }
    return std::move(outcomes.back());
}

namespace {

// sqrt(Pi_0)|a> = exp(-eta |a|^2 / 2) |sqrt(1 - eta) a>
HybridState silent_branch(const HybridState &s, int mode, double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) fail(ErrorCode::InvalidArgument, "detector efficiency must lie in (0, 1]");
    auto q = s.registry().qubus_index(mode);
    std::vector<Branch> attenuated = s.branches();
    double keep = std::sqrt(1.0 - eta);
    for (auto &b : attenuated) {
        b.amplitude *= std::exp(-0.5 * eta * std::norm(b.qubus[q]));
        b.qubus[q] *= keep;
    }
    return HybridState(s.registry(), std::move(attenuated));
}

}  // namespace

double no_click_probability(const HybridState &s, int mode, double eta) {
    return std::min(1.0, std::pow(norm(silent_branch(s, mode, eta)), 2));
}

MeasurementRecord povm_non_resolving(const HybridState &s, int mode, double eta, int outcome) {
    if (outcome != 0 && outcome != 1) fail(ErrorCode::InvalidArgument, "non-resolving detector outcome must be 0 or 1");
    HybridState none = silent_branch(s, mode, eta);
    double p0 = std::min(1.0, std::pow(norm(none), 2));
    if (outcome == 0) {
        auto r = make_record(RecordKind::Povm, 0, mode_target(mode), none);
        r.probability = p0;
        return r;
    }
    bool released = false;
    auto rest = release_qubus(s, mode, &released);
    if (!released) fail(ErrorCode::Validation, "click outcome needs the detected mode to factor out of the state");
    MeasurementRecord r;
    r.kind = RecordKind::Povm;
    r.value = 1;
    r.target = mode_target(mode);
    r.probability = 1.0 - p0;
    if (!(r.probability > kImpossible)) fail(ErrorCode::Numeric, "impossible outcome povm 1 on " + r.target);
    r.collapsed = rest;
    return r;
}

// ---------------------------------------------------------------------------------------------
// Photon measurements

MeasurementRecord qnd_presence(const HybridState &s, int photon, const std::string &path, bool present) {
    PathId p = intern_path(path);
    if (!s.registry().has_path(photon, p))
        fail(ErrorCode::Registry, "path '" + path + "' is not registered for photon " + std::to_string(photon));
    auto idx = s.registry().photon_index(photon);
    std::vector<Branch> kept;
    for (const auto &b : s.branches())
        if ((b.photons[idx].path == p) == present) kept.push_back(b);
    HybridState projected(s.registry(), std::move(kept));
    return make_record(RecordKind::Presence, present ? 1 : 0, "photon " + std::to_string(photon) + " path " + path, projected);
}

std::vector<MeasurementRecord> presence_outcomes(const HybridState &s, int photon, const std::string &path, double floor) {
    std::vector<MeasurementRecord> out;
    for (bool present : {true, false}) {
        PathId p = intern_path(path);
        auto idx = s.registry().photon_index(photon);
        bool any = false;
        for (const auto &b : s.branches())
            if ((b.photons[idx].path == p) == present && b.amplitude != 0.0) any = true;
        if (!any) continue;
        auto r = qnd_presence(s, photon, path, present);
        if (r.probability > floor) out.push_back(std::move(r));
    }
    return out;
}

MeasurementRecord bell_measure(const HybridState &s, int photon_a, int photon_b, BellState outcome) {
    if (photon_a == photon_b) fail(ErrorCode::InvalidArgument, "Bell measurement needs two photons");
    for (int ph : {photon_a, photon_b}) {
        if (s.occupied_paths(ph, 0.0).size() > 1)
            fail(ErrorCode::Validation, "Bell measurement needs photon " + std::to_string(ph) + " on a single path");
    }
    const auto &reg = s.registry();
    auto ia = reg.photon_index(photon_a);
    auto ib = reg.photon_index(photon_b);
    ModeRegistry out_reg = reg;
    out_reg.remove_photon(photon_a);
    out_reg.remove_photon(photon_b);
    const double h = 0.70710678118654752440;
    auto coefficient = [&](Pol a, Pol b) -> double {
        bool same = a == b;
        switch (outcome) {
            case BellState::PhiPlus: return same ? h : 0.0;
            case BellState::PhiMinus: return same ? (a == Pol::H ? h : -h) : 0.0;
            case BellState::PsiPlus: return same ? 0.0 : h;
            case BellState::PsiMinus: return same ? 0.0 : (a == Pol::H ? h : -h);
        }
        return 0.0;
    };
    std::vector<Branch> out;
    for (const auto &b : s.branches()) {
        double c = coefficient(b.photons[ia].pol, b.photons[ib].pol);
        if (c == 0.0) continue;
        Branch nb;
        nb.amplitude = b.amplitude * c;
        nb.qubus = b.qubus;
        for (std::size_t i = 0; i < b.photons.size(); ++i)
            if (i != ia && i != ib) nb.photons.push_back(b.photons[i]);
        out.push_back(std::move(nb));
    }
    auto projected = canonicalize(HybridState(std::move(out_reg), std::move(out)), 0.0);
    return make_record(RecordKind::Bell, static_cast<int>(outcome),
                       "photons " + std::to_string(photon_a) + "," + std::to_string(photon_b), projected);
}

std::vector<MeasurementRecord> bell_outcomes(const HybridState &s, int photon_a, int photon_b, double floor) {
    std::vector<MeasurementRecord> out;
    for (int k = 0; k < 4; ++k) {
        try {
            auto r = bell_measure(s, photon_a, photon_b, static_cast<BellState>(k));
            if (r.probability > floor) out.push_back(std::move(r));
        } catch (const Error &e) {
            if (e.code() != ErrorCode::Numeric) throw;
        }
    }
    return out;
}

}  // namespace qubus
