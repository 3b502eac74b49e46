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

#include <gtest/gtest.h>

#include <cmath>

#include "qubus/analysis.hpp"
#include "qubus/detection.hpp"
#include "qubus/error.hpp"

using namespace qubus;

namespace {
const double kAlpha = std::sqrt(4000.0);
}

TEST(ErrorProbability, FormulaAtReferencePoint) {
    double pe = error_probability_formula(kAlpha, 0.05, 100.0, 0.9, 0.05);
    double exponent = 2.0 * (1.0 - std::exp(-0.5 * 0.9 * 1e4 * 0.0025)) * 4000.0 * std::pow(std::sin(0.05), 2);
    EXPECT_NEAR(exponent, 19.98, 0.01);
    EXPECT_NEAR(pe, 2.1e-9, 0.2 * 2.1e-9);
}

TEST(ErrorProbability, FormulaLimits) {
    EXPECT_NEAR(error_probability_formula(kAlpha, 1e-9, 100.0, 0.9, 0.05), 1.0, 1e-12);
    EXPECT_NEAR(error_probability_formula(kAlpha, 0.05, 100.0, 0.0, 0.05), 1.0, 1e-15);
    EXPECT_THROW(error_probability_formula(kAlpha, 0.05, 100.0, 1.5, 0.05), Error);
}

TEST(ErrorProbability, DirectSum) {
    EXPECT_LE(error_probability_direct(kAlpha, 0.05, 100.0, 0.95, 0.05), 1e-8);
    EXPECT_EQ(error_probability_direct(kAlpha, 0.05, 0.0, 0.95, 0.05), 1.0);
    EXPECT_EQ(error_probability_direct(kAlpha, 0.0, 100.0, 0.95, 0.05), 1.0);
    EXPECT_THROW(error_probability_direct(kAlpha, 0.05, 100.0, 0.95, 0.05, 20), Error);
}

TEST(ErrorProbability, DirectIsMonotone) {
    double prev = 2.0;
    for (double a2 : {500.0, 1000.0, 2000.0, 4000.0}) {
        double v = error_probability_direct(std::sqrt(a2), 0.05, 100.0, 0.9, 0.05);
        EXPECT_LT(v, prev);
        prev = v;
    }
    prev = 2.0;
    for (double g : {10.0, 20.0, 50.0, 100.0}) {
        double v = error_probability_direct(kAlpha, 0.05, g, 0.9, 0.05);
        EXPECT_LT(v, prev);
        prev = v;
    }
    prev = 2.0;
    for (double eta : {0.1, 0.3, 0.6, 0.9}) {
        double v = error_probability_direct(kAlpha, 0.05, 100.0, eta, 0.05);
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(ErrorProbability, FormulaAndDirectExponentsAgree) {
    for (double th : {0.02, 0.05}) {
        double f = error_probability_formula(kAlpha, th, 100.0, 0.9, th);
        double d = error_probability_direct(kAlpha, th, 100.0, 0.9, th);
        double r = std::log(d) / std::log(f);
        EXPECT_GE(r, 0.5) << th;
        EXPECT_LE(r, 2.0) << th;
    }
}

TEST(ErrorProbability, DirectSumSeesProbePhaseRevival) {
    // near n theta = 2 pi the probe returns to vacuum and the no-click term is no longer small
    double f = error_probability_formula(kAlpha, 0.1, 100.0, 0.9, 0.1);
    double d = error_probability_direct(kAlpha, 0.1, 100.0, 0.9, 0.1);
    EXPECT_LT(f, 1e-30);
    EXPECT_GT(d, 1e-3);
    double revival = 0.0;
    for (int n = 55; n <= 70; ++n) {
        double h = std::sin(0.05 * n);
        revival += poisson_pmf(2 * 4000 * std::pow(std::sin(0.1), 2), n) * std::exp(-0.9 * 2e4 * h * h);
    }
    EXPECT_NEAR(revival / d, 1.0, 1e-3);
}

TEST(Peaks, MeansAndOverlaps) {
    const double expect[] = {12.50, 49.96, 112.3, 199.3};
    for (int k = 1; k <= 4; ++k) {
        double mu = peak_mean(100.0, 0.05, k);
        EXPECT_NEAR(mu, 2e4 * std::pow(std::sin(k * 0.025), 2), 1e-9);
        EXPECT_NEAR(mu, expect[k - 1], 0.05 + 1e-3 * expect[k - 1]);
    }
    for (int a = 1; a <= 4; ++a)
        for (int b = a + 1; b <= 4; ++b) EXPECT_LT(peak_overlap(100.0, 0.05, a, b), 1e-3);
    EXPECT_THROW(peak_overlap(100.0, 0.05, 2, 2), Error);
}

TEST(Fig2, DistributionsAndDominantRange) {
    auto d = fig2_data(100.0, 0.05, 20.0);
    double sum = 0.0;
    for (double x : d.beta_pmf) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-10);
    for (const auto &pk : d.peaks) {
        double s = 0.0;
        for (double x : pk.pmf) s += x;
        EXPECT_NEAR(s, 1.0, 1e-10);
    }
    EXPECT_GE(d.mass_8_35, 0.99);
    EXPECT_GT(d.dominant_count, 20);
    EXPECT_EQ(d.peaks.size(), 4u);
}

TEST(Sweep, SinglePointMatchesDirectCall) {
    SweepSpec spec;
    spec.grid = {{"theta", {0.05}}};
    spec.quantity = SweepQuantity::PEDirect;
    spec.base.eta = 0.9;
    auto t = run_sweep(spec);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0][1], error_probability_direct(kAlpha, 0.05, 100.0, 0.9, 0.05));
}

TEST(Sweep, GridOrderAndDeterminism) {
    SweepSpec spec;
    spec.grid = {{"theta", {0.02, 0.05, 0.1}}, {"eta", {0.5, 0.9}}};
    spec.quantity = SweepQuantity::PEFormula;
    spec.threads = 4;
    auto a = run_sweep(spec);
    spec.threads = 1;
    auto b = run_sweep(spec);
    ASSERT_EQ(a.rows.size(), 6u);
    EXPECT_EQ(a.rows, b.rows);
    EXPECT_EQ(a.rows[1][0], 0.02);
    EXPECT_EQ(a.rows[1][1], 0.9);
    EXPECT_EQ(to_csv(a), to_csv(b));
    EXPECT_EQ(to_csv(a).substr(0, 21), "theta,eta,P_E_formula");
}

TEST(Sweep, FormulaAndDirectWithinTenfold) {
    SweepSpec spec;
    spec.grid = {{"theta", {0.02, 0.05}}};
    spec.base.eta = 0.9;
    spec.quantity = SweepQuantity::PEFormula;
    auto f = run_sweep(spec);
    spec.quantity = SweepQuantity::PEDirect;
    auto d = run_sweep(spec);
    for (std::size_t i = 0; i < 2; ++i) {
        double ratio = f.rows[i][1] / d.rows[i][1];
        EXPECT_LT(ratio, 10.0);
        EXPECT_GT(ratio, 0.1);
    }
}

TEST(Sweep, GateFidelityGrowsWithBeta) {
    SweepSpec spec;
    spec.grid = {{"beta2", {0.5, 2.0, 8.0, 20.0}}};
    spec.quantity = SweepQuantity::GateFidelity;
    spec.seed = 7;
    auto t = run_sweep(spec);
    for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_GE(t.rows[i][1], t.rows[i - 1][1]);
    EXPECT_GT(t.rows.back()[1], 1.0 - 1e-8);
}

TEST(Sweep, ErrorsNameTheGridPoint) {
    SweepSpec spec;
    spec.grid = {{"eta", {0.5, 1.5}}};
    EXPECT_THROW(run_sweep(spec), Error);
    spec.grid = {};
    EXPECT_THROW(run_sweep(spec), Error);
    spec.grid = {{"theta", {0.05}}, {"theta_probe", {0.0}}};
    spec.quantity = SweepQuantity::PeakOverlap;
    spec.k1 = 1;
    spec.k2 = 2;
    auto t = run_sweep(spec);
    EXPECT_NEAR(t.rows[0][2], 1.0, 1e-12);
}
