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

#ifndef QUBUS_ANALYSIS_HPP
#define QUBUS_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qubus/gates.hpp"

namespace qubus {

/// exp{-2 (1 - e^{-eta gamma^2 theta_probe^2 / 2}) alpha^2 sin^2 theta}
double error_probability_formula(double alpha, double theta, double gamma, double eta, double theta_probe);
/// sum_n Poisson(n; 2 alpha^2 sin^2 theta) exp(-eta mu_n), mu_n = 2 gamma^2 sin^2(n theta_probe / 2).
double error_probability_direct(double alpha, double theta, double gamma, double eta, double theta_probe,
                                std::optional<int> cutoff = std::nullopt);

/// Mean photon number of the probe for the k-th peak.
double peak_mean(double gamma, double theta_probe, int k);
/// sum_n min(Poisson(mu_k1, n), Poisson(mu_k2, n)).
double peak_overlap(double gamma, double theta_probe, int k1, int k2);

std::vector<double> poisson_distribution(double mean, double tail = 1e-16);
double mass_between(const std::vector<double> &pmf, int lo, int hi);

struct PeakPmf {
    int k = 0;
    double mean = 0.0;
    std::vector<double> pmf;
};

struct Fig2Data {
    double beta2 = 0.0;
    std::vector<double> beta_pmf;
    /// Photon numbers whose probability is at least `threshold` times the largest one.
    double threshold = 1e-4;
    int dominant_lo = 0;
    int dominant_hi = 0;
    int dominant_count = 0;
    double mass_8_35 = 0.0;
    std::vector<PeakPmf> peaks;
};

Fig2Data fig2_data(double gamma, double theta_probe, double beta2, int peaks = 4, double threshold = 1e-4);

/// Probability-weighted fidelity of the parity gate output with the ideal parity-sorted state, for a
/// Haar-random input drawn from `seed`.
double parity_average_fidelity(const GateParams &p, std::uint64_t seed);

enum class SweepQuantity { PEFormula, PEDirect, PeakOverlap, GateFidelity, Pmf };

const char *sweep_quantity_name(SweepQuantity q);
SweepQuantity sweep_quantity_from_name(const std::string &name);

/// Parameters: alpha, theta, gamma, theta_probe, eta, beta2. When beta2 is swept, alpha follows from beta2 and theta.
struct SweepSpec {
    std::vector<std::pair<std::string, std::vector<double>>> grid;
    SweepQuantity quantity = SweepQuantity::PEFormula;
    GateParams base;
    int k1 = 1;
    int k2 = 2;
    std::uint64_t seed = 0;
    int threads = 0;  // 0: hardware concurrency

    void validate() const;
};

struct SweepTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

SweepTable run_sweep(const SweepSpec &spec);
/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);
std::string to_csv(const SweepTable &t);

}  // namespace qubus

#endif
