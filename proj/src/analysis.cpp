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

#include "qubus/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <set>
#include <sstream>
#include <thread>

#include "qubus/detection.hpp"
#include "qubus/error.hpp"
#include "qubus/synthesis.hpp"

namespace qubus {

namespace {

void require_physical(double alpha, double theta, double gamma, double eta, double theta_probe) {
    if (!(alpha >= 0.0) || !(gamma >= 0.0) || !std::isfinite(theta) || !std::isfinite(theta_probe))
        fail(ErrorCode::InvalidArgument, "alpha and gamma must be non-negative and angles finite");
    if (!(eta >= 0.0 && eta <= 1.0)) fail(ErrorCode::InvalidArgument, "detector efficiency must lie in [0, 1]");
}

std::string format_point(const std::vector<std::pair<std::string, double>> &pt) {
    std::ostringstream os;
    os.precision(10);
    os << "grid point (";
    for (std::size_t i = 0; i < pt.size(); ++i) os << (i ? ", " : "") << pt[i].first << "=" << pt[i].second;
    os << ")";
    return os.str();
}

const std::vector<std::string> &known_parameters() {
    static const std::vector<std::string> names{"alpha", "theta", "gamma", "theta_probe", "eta", "beta2"};
    return names;
}

}  // namespace

double error_probability_formula(double alpha, double theta, double gamma, double eta, double theta_probe) {
    require_physical(alpha, theta, gamma, eta, theta_probe);
    double s = std::sin(theta);
    double visibility = 1.0 - std::exp(-0.5 * eta * gamma * gamma * theta_probe * theta_probe);
    return std::exp(-2.0 * visibility * alpha * alpha * s * s);
}

double error_probability_direct(double alpha, double theta, double gamma, double eta, double theta_probe,
                                std::optional<int> cutoff) {
    require_physical(alpha, theta, gamma, eta, theta_probe);
    double s = std::sin(theta);
    double beta2 = 2.0 * alpha * alpha * s * s;
    int nmax = cutoff ? *cutoff : static_cast<int>(std::ceil(beta2 + 14.0 * std::sqrt(beta2))) + 30;
    if (nmax < 0) fail(ErrorCode::InvalidArgument, "cutoff must be non-negative");
    double mass = 0.0, total = 0.0;
    for (int n = 0; n <= nmax; ++n) {
        double w = poisson_pmf(beta2, n);
        mass += w;
        double h = std::sin(0.5 * n * theta_probe);
        total += w * std::exp(-eta * 2.0 * gamma * gamma * h * h);
    }
    if (1.0 - mass > 1e-14)
        fail(ErrorCode::Numeric, "cutoff " + std::to_string(nmax) + " leaves Poisson tail " + std::to_string(1.0 - mass));
    return std::clamp(total, 0.0, 1.0);
}

double peak_mean(double gamma, double theta_probe, int k) {
    double h = std::sin(0.5 * k * theta_probe);
    return 2.0 * gamma * gamma * h * h;
}

std::vector<double> poisson_distribution(double mean, double tail) {
    if (!(mean >= 0.0)) fail(ErrorCode::InvalidArgument, "Poisson mean must be non-negative");
    std::vector<double> pmf;
    double acc = 0.0;
    for (int n = 0;; ++n) {
        double p = poisson_pmf(mean, n);
        pmf.push_back(p);
        acc += p;
        if (n > mean && 1.0 - acc <= tail) break;
        if (n > mean + 40.0 * std::sqrt(mean) + 200.0) break;
    }
    return pmf;
}

double mass_between(const std::vector<double> &pmf, int lo, int hi) {
    double m = 0.0;
    for (int n = std::max(lo, 0); n <= hi && n < static_cast<int>(pmf.size()); ++n) m += pmf[n];
    return m;
}

double peak_overlap(double gamma, double theta_probe, int k1, int k2) {
    if (k1 == k2) fail(ErrorCode::InvalidArgument, "peak overlap needs two different peaks");
    if (k1 < 0 || k2 < 0) fail(ErrorCode::InvalidArgument, "peak indices must be non-negative");
    double m1 = peak_mean(gamma, theta_probe, k1), m2 = peak_mean(gamma, theta_probe, k2);
    double hi = std::max(m1, m2);
    int nmax = static_cast<int>(std::ceil(hi + 40.0 * std::sqrt(hi))) + 200;
    double total = 0.0;
    for (int n = 0; n <= nmax; ++n) total += std::min(poisson_pmf(m1, n), poisson_pmf(m2, n));
    return total;
}

Fig2Data fig2_data(double gamma, double theta_probe, double beta2, int peaks, double threshold) {
    if (!(beta2 > 0.0)) fail(ErrorCode::InvalidArgument, "beta^2 must be positive");
    if (peaks < 1) fail(ErrorCode::InvalidArgument, "at least one peak is needed");
    Fig2Data d;
    d.beta2 = beta2;
    d.threshold = threshold;
    d.beta_pmf = poisson_distribution(beta2);
    double top = *std::max_element(d.beta_pmf.begin(), d.beta_pmf.end());
    d.dominant_lo = -1;
    for (int n = 0; n < static_cast<int>(d.beta_pmf.size()); ++n) {
        if (d.beta_pmf[n] < threshold * top) continue;
        if (d.dominant_lo < 0) d.dominant_lo = n;
        d.dominant_hi = n;
    }
    d.dominant_count = d.dominant_hi - d.dominant_lo + 1;
    d.mass_8_35 = mass_between(d.beta_pmf, 8, 35);
    for (int k = 1; k <= peaks; ++k) {
        double mu = peak_mean(gamma, theta_probe, k);
        d.peaks.push_back({k, mu, poisson_distribution(mu)});
    }
    return d;
}

double parity_average_fidelity(const GateParams &p, std::uint64_t seed) {
    Eigen::VectorXcd v = random_haar_unitary(4, seed).col(0);
    std::vector<Complex> c(v.data(), v.data() + 4);
    auto s = HybridState::polarization({1, 2}, {"1", "2"}, c);
    GateParams q = p;
    q.keep_outcome_states = true;
    q.policy = OutcomePolicy::Enumerate;
    auto r = parity_gate(s, 1, 2, q, "3");
    auto ideal = HybridState::from_terms({{c[0], {{1, "1", Pol::H}, {2, "3", Pol::H}}},
                                          {c[3], {{1, "1", Pol::V}, {2, "3", Pol::V}}},
                                          {c[1], {{1, "1", Pol::H}, {2, "2", Pol::V}}},
                                          {c[2], {{1, "1", Pol::V}, {2, "2", Pol::H}}}});
    double num = 0.0, den = 0.0;
    for (const auto &o : r.outcome_states) {
        num += o.probability * fidelity(o.state, ideal);
        den += o.probability;
    }
    return num / den;
}

const char *sweep_quantity_name(SweepQuantity q) {
    switch (q) {
        case SweepQuantity::PEFormula: return "P_E_formula";
        case SweepQuantity::PEDirect: return "P_E_direct";
        case SweepQuantity::PeakOverlap: return "peak_overlap";
        case SweepQuantity::GateFidelity: return "gate_fidelity";
        case SweepQuantity::Pmf: return "pmf";
    }
    return "?";
}

SweepQuantity sweep_quantity_from_name(const std::string &name) {
    for (auto q : {SweepQuantity::PEFormula, SweepQuantity::PEDirect, SweepQuantity::PeakOverlap,
                   SweepQuantity::GateFidelity, SweepQuantity::Pmf})
        if (name == sweep_quantity_name(q)) return q;
    fail(ErrorCode::Parse, "unknown sweep quantity '" + name + "'");
}

void SweepSpec::validate() const {
    if (grid.empty()) fail(ErrorCode::InvalidArgument, "sweep grid is empty");
    std::set<std::string> seen;
    for (const auto &[name, values] : grid) {
        const auto &known = known_parameters();
        if (std::find(known.begin(), known.end(), name) == known.end())
            fail(ErrorCode::InvalidArgument, "unknown sweep parameter '" + name + "'");
        if (!seen.insert(name).second) fail(ErrorCode::InvalidArgument, "sweep parameter '" + name + "' given twice");
        if (values.empty()) fail(ErrorCode::InvalidArgument, "sweep parameter '" + name + "' has no values");
        for (double v : values) {
            if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "sweep parameter '" + name + "' has a non-finite value");
            if ((name == "alpha" || name == "beta2") && !(v > 0.0))
                fail(ErrorCode::InvalidArgument, "sweep parameter '" + name + "' must be positive");
            if ((name == "gamma" || name == "theta" || name == "theta_probe") && v < 0.0)
                fail(ErrorCode::InvalidArgument, "sweep parameter '" + name + "' must be non-negative");
            if (name == "eta" && !(v >= 0.0 && v <= 1.0))
                fail(ErrorCode::InvalidArgument, "sweep parameter 'eta' must lie in [0, 1]");
        }
    }
    if (seen.count("alpha") && seen.count("beta2"))
        fail(ErrorCode::InvalidArgument, "sweep either alpha or beta2, not both");
    if (k1 == k2 && quantity == SweepQuantity::PeakOverlap) fail(ErrorCode::InvalidArgument, "peak overlap needs k1 != k2");
}

SweepTable run_sweep(const SweepSpec &spec) {
    spec.validate();
    std::vector<std::vector<std::pair<std::string, double>>> points{{}};
    for (const auto &[name, values] : spec.grid) {
        std::vector<std::vector<std::pair<std::string, double>>> next;
        for (const auto &pt : points)
            for (double v : values) {
                auto q = pt;
                q.emplace_back(name, v);
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }

    auto evaluate = [&](const std::vector<std::pair<std::string, double>> &pt) {
        GateParams p = spec.base;
        std::optional<double> beta2;
        for (const auto &[name, v] : pt) {
            if (name == "alpha") p.alpha = v;
            else if (name == "theta") p.theta = v;
            else if (name == "gamma") p.gamma = v;
            else if (name == "theta_probe") p.theta_probe = v;
            else if (name == "eta") p.eta = v;
            else if (name == "beta2") beta2 = v;
        }
        if (beta2) {
            double s = std::sin(p.theta);
            if (s == 0.0) fail(ErrorCode::InvalidArgument, "beta2 sweep needs sin(theta) != 0");
            p.alpha = std::sqrt(*beta2 / (2.0 * s * s));
        }
        const double g = std::abs(p.gamma);
        switch (spec.quantity) {
            case SweepQuantity::PEFormula:
                return std::vector<double>{error_probability_formula(p.alpha, p.theta, g, p.eta, p.theta_probe)};
            case SweepQuantity::PEDirect:
                return std::vector<double>{error_probability_direct(p.alpha, p.theta, g, p.eta, p.theta_probe)};
            case SweepQuantity::PeakOverlap:
                return std::vector<double>{peak_overlap(g, p.theta_probe, spec.k1, spec.k2)};
            case SweepQuantity::GateFidelity:
                return std::vector<double>{parity_average_fidelity(p, spec.seed)};
            case SweepQuantity::Pmf:
                return poisson_distribution(p.beta2());
        }
        return std::vector<double>{};
    };

    const std::size_t count = points.size();
    std::vector<std::vector<double>> values(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                values[i] = evaluate(points[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    unsigned threads = spec.threads > 0 ? static_cast<unsigned>(spec.threads) : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(count));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto &t : pool) t.join();

    for (std::size_t i = 0; i < count; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const Error &e) {
            fail(e.code(), format_point(points[i]) + ": " + e.what());
        } catch (const std::exception &e) {
            fail(ErrorCode::Numeric, format_point(points[i]) + ": " + e.what());
        }
    }

    SweepTable table;
    for (const auto &g : spec.grid) table.columns.push_back(g.first);
    if (spec.quantity == SweepQuantity::Pmf) {
        table.columns.push_back("n");
        table.columns.push_back("pmf");
    } else {
        table.columns.push_back(sweep_quantity_name(spec.quantity));
    }
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> base;
        for (const auto &kv : points[i]) base.push_back(kv.second);
        if (spec.quantity == SweepQuantity::Pmf) {
            for (std::size_t n = 0; n < values[i].size(); ++n) {
                auto row = base;
                row.push_back(static_cast<double>(n));
                row.push_back(values[i][n]);
                table.rows.push_back(std::move(row));
            }
        } else {
            base.push_back(values[i].front());
            table.rows.push_back(std::move(base));
        }
    }
    return table;
}

std::string format_number(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string to_csv(const SweepTable &t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto &row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
        out += "\n";
    }
    return out;
}

}  // namespace qubus
