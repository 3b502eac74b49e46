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

#ifndef QUBUS_DETECTION_HPP
#define QUBUS_DETECTION_HPP

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qubus/hybrid_state.hpp"

namespace qubus {

enum class QndMode { Ideal, Binned };

/// Photon counts in [lo, hi) on the probe detector are read as peak `peak`.
struct QndBin {
    int peak = 0;
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct QndConfig {
    Complex gamma = 100.0;
    double theta_probe = 0.05;
    double eta = 0.95;
    std::vector<QndBin> bins;

    /// Mean photon number reaching the probe detector when the signal holds n photons.
    double peak_mean(int n) const;
    void validate() const;
    /// Bins for peaks 0..max_peak with boundaries at the midpoints between consecutive means.
    static QndConfig with_default_bins(Complex gamma, double theta_probe, double eta, int max_peak);
};

enum class RecordKind { Fock, Bin, Povm, Bell, Presence };
enum class BellState { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

const char *bell_name(BellState b);
const char *record_kind_name(RecordKind k);

struct MeasurementRecord {
    RecordKind kind = RecordKind::Fock;
    /// Fock n, bin peak k, POVM element 0|1, BellState index, or 1/0 for present/absent.
    int value = 0;
    std::string target;
    double probability = 0.0;
    HybridState collapsed;
    /// Binned readout only: conditional probability that the true photon number differs from `value`.
    double misidentification = 0.0;
};

std::string record_label(const MeasurementRecord &r);

/// <n|alpha>, evaluated in the log domain.
Complex fock_amplitude(Complex alpha, int n);
double poisson_pmf(double mean, int n);
/// Photon-number cutoff used when none is given: mean + 12 sqrt(mean) over all branches, plus slack.
int auto_cutoff(const HybridState &s, int mode);

std::vector<double> fock_distribution(const HybridState &s, int mode, std::optional<int> cutoff = std::nullopt);
MeasurementRecord fock_project(const HybridState &s, int mode, int n);
/// Every Fock outcome whose probability exceeds `floor`.
std::vector<MeasurementRecord> fock_outcomes(const HybridState &s, int mode, double floor = 1e-12);

/// Conditional readout distribution q(k | n) of the binned probe chain, indexed like cfg.bins.
/// Throws when probability mass for this n lands outside every bin.
std::vector<double> binned_response(const QndConfig &cfg, int n);
/// Outcome distribution over cfg.bins given a photon-number pmf.
std::vector<double> binned_distribution(const QndConfig &cfg, const std::vector<double> &pmf, double floor = 1e-12);

std::vector<MeasurementRecord> qnd_outcomes(const HybridState &s, int mode, const QndConfig &cfg, QndMode qmode,
                                            double floor = 1e-12);
MeasurementRecord qnd_measure(const HybridState &s, int mode, const QndConfig &cfg, QndMode qmode, std::mt19937_64 &rng);

/// Non-resolving detector with efficiency eta. Outcome 0 applies the square root of the no-click
/// element and keeps the mode; outcome 1 removes the mode and needs it to factor out of the state.
/// Probability that a non-resolving detector with efficiency eta stays silent.
double no_click_probability(const HybridState &s, int mode, double eta);
MeasurementRecord povm_non_resolving(const HybridState &s, int mode, double eta, int outcome);

MeasurementRecord qnd_presence(const HybridState &s, int photon, const std::string &path, bool present);
std::vector<MeasurementRecord> presence_outcomes(const HybridState &s, int photon, const std::string &path,
                                                 double floor = 1e-12);

MeasurementRecord bell_measure(const HybridState &s, int photon_a, int photon_b, BellState outcome);
std::vector<MeasurementRecord> bell_outcomes(const HybridState &s, int photon_a, int photon_b, double floor = 1e-12);

}  // namespace qubus

#endif
