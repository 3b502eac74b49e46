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


#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qubus/qubus.h"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct Failure {
    int exit_code;
    std::string message;
};

int exit_code_for(qubus_status s) {
    return s == QUBUS_ERR_PARSE || s == QUBUS_ERR_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
}

void check(qubus_status s, const std::string &context) {
    if (s != QUBUS_OK) throw Failure{exit_code_for(s), context + ": " + qubus_last_error()};
}

struct Text {
    char *ptr = nullptr;
    ~Text() { qubus_string_free(ptr); }
    std::string str() const { return ptr ? ptr : ""; }
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{kExitUsage, "cannot open '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Config {
    std::optional<double> alpha, theta, gamma, eta, theta_probe;
    std::optional<std::uint64_t> seed;
    std::string config_file;
    std::string format = "json";
    std::string out;
};

using ParamsPtr = std::unique_ptr<qubus_params, decltype(&qubus_params_destroy)>;

ParamsPtr make_params(const Config &c) {
    qubus_params *raw = nullptr;
    check(qubus_params_create(&raw), "parameters");
    ParamsPtr p(raw, qubus_params_destroy);
    if (!c.config_file.empty()) check(qubus_params_load_json(p.get(), read_file(c.config_file).c_str()), c.config_file);
    auto set = [&](const char *key, const std::optional<double> &v) {
        if (v) check(qubus_params_set(p.get(), key, *v), std::string("--") + key);
    };
    set("alpha", c.alpha);
    set("theta", c.theta);
    set("gamma", c.gamma);
    set("eta", c.eta);
    set("theta_probe", c.theta_probe);
    if (c.seed) check(qubus_params_set(p.get(), "seed", static_cast<double>(*c.seed)), "--seed");
    return p;
}

void emit(const Config &c, const std::string &text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(c.out, std::ios::binary);
    if (!out) throw Failure{kExitFailure, "cannot write '" + c.out + "'"};
    out << text;
}

void write_file(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Failure{kExitFailure, "cannot write '" + path.string() + "'"};
    out << text;
}

void require_json(const Config &c, const char *command) {
    if (c.format != "json") throw Failure{kExitUsage, std::string(command) + " only writes JSON"};
}

int cmd_verify(const Config &c, const qubus_params *p, const std::string &dir) {
    if (!fs::is_directory(dir)) throw Failure{kExitUsage, "'" + dir + "' is not a directory"};
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Failure{kExitUsage, "no golden cases in '" + dir + "'"};

    int passed = 0, failed = 0;
    std::string cases;
    for (const auto &f : files) {
        Text out;
        int ok = 0;
        auto status = qubus_verify_case(read_file(f.string()).c_str(), p, &out.ptr, &ok);
        if (status != QUBUS_OK) {
            std::cerr << f.filename().string() << ": " << qubus_last_error() << "\n";
            ++failed;
            continue;
        }
        ok ? ++passed : ++failed;
        std::cerr << (ok ? "PASS " : "FAIL ") << f.filename().string() << "\n";
        if (!cases.empty()) cases += ",\n";
        std::string body = out.str();
        while (!body.empty() && body.back() == '\n') body.pop_back();
        cases += body;
    }
    std::ostringstream summary;
    summary << "{\n\"cases\": [\n" << cases << "\n],\n\"passed\": " << passed << ",\n\"failed\": " << failed << "\n}\n";
    emit(c, summary.str());
    return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Qubus hybrid photonic circuit simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    Config cfg;
    app.add_option("--alpha", cfg.alpha, "Qubus coherent amplitude");
    app.add_option("--theta", cfg.theta, "Cross-phase shift per coupling");
    app.add_option("--gamma", cfg.gamma, "Probe beam amplitude");
    app.add_option("--eta", cfg.eta, "Detector efficiency");
    app.add_option("--theta-probe", cfg.theta_probe, "Probe cross-phase shift");
    app.add_option("--seed", cfg.seed, "Random seed (default 0)");
    app.add_option("--config", cfg.config_file, "JSON file with the same keys")->check(CLI::ExistingFile);
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", cfg.out, "Output file (default stdout)");

    std::string program_file;
    auto *run = app.add_subcommand("run", "Execute a circuit program");
    run->add_option("program", program_file, "Program JSON file")->required()->check(CLI::ExistingFile);

    std::string gate_name, gate_input, gate_matrix, gate_layout, gate_interference;
    int gate_photons = 0, gate_targets = 0;
    auto *gate = app.add_subcommand("gate", "Run one named gate on a prepared register");
    gate->add_option("name", gate_name, "Gate name")->required();
    gate->add_option("--input", gate_input, "State spec: basis string, coefficient list, haar:SEED or haar-product:SEED");
    gate->add_option("--photons", gate_photons, "Register size for random inputs");
    gate->add_option("--matrix", gate_matrix, "Matrix name or JSON file");
    gate->add_option("--interference", gate_interference, "Interference matrix name or JSON file for merges");
    gate->add_option("--layout", gate_layout, "C-path-3 coupling layout")->check(CLI::IsMember({"standard", "shared"}));
    gate->add_option("--targets", gate_targets, "Number of targets for cn-uk");

    std::string sweep_file;
    auto *sweep = app.add_subcommand("sweep", "Evaluate a quantity over a parameter grid");
    sweep->add_option("spec", sweep_file, "Sweep spec JSON file")->required()->check(CLI::ExistingFile);

    std::string matrix_file;
    auto *decompose = app.add_subcommand("decompose", "Decompose a unitary into a beam-splitter mesh");
    decompose->add_option("matrix", matrix_file, "Matrix JSON file")->required()->check(CLI::ExistingFile);

    double fig2_beta2 = 20.0;
    int fig2_peaks = 4;
    std::string fig2_dir;
    auto *fig2 = app.add_subcommand("fig2", "Photon-number and detector-peak distributions");
    fig2->add_option("--beta2", fig2_beta2, "Mean photon number of the displaced qubus component");
    fig2->add_option("--peaks", fig2_peaks, "Number of detector peaks")->check(CLI::Range(1, 64));
    fig2->add_option("--out-dir", fig2_dir, "Write fig2.json, fig2_beta.csv and fig2_peaks.csv here");

    std::string golden_dir;
    auto *verify = app.add_subcommand("verify", "Check golden cases");
    verify->add_option("golden_dir", golden_dir, "Directory of golden case JSON files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        ParamsPtr params = make_params(cfg);
        const qubus_params *p = params.get();
        if (*run) {
            require_json(cfg, "run");
            Text out;
            check(qubus_run_program(read_file(program_file).c_str(), p, &out.ptr), program_file);
            emit(cfg, out.str());
        } else if (*gate) {
            require_json(cfg, "gate");
            std::ostringstream opts;
            opts << "{";
            const char *sep = "";
            auto add = [&](const std::string &key, const std::string &value) {
                opts << sep << "\"" << key << "\": " << value;
                sep = ", ";
            };
            auto matrix_value = [&](const std::string &m) {
                if (!m.empty() && m.front() == '[') return m;
                return fs::is_regular_file(m) ? read_file(m) : "\"" + m + "\"";
            };
            if (gate_photons > 0) add("photons", std::to_string(gate_photons));
            if (gate_targets > 0) add("targets", std::to_string(gate_targets));
            if (!gate_matrix.empty()) add("matrix", matrix_value(gate_matrix));
            if (!gate_interference.empty()) add("interference", matrix_value(gate_interference));
            if (!gate_layout.empty()) add("layout", "\"" + gate_layout + "\"");
            opts << "}";
            std::string input = gate_input;
            if (input.empty()) {
                double seed = 0;
                check(qubus_params_get(p, "seed", &seed), "seed");
                input = "haar-product:" + std::to_string(static_cast<std::uint64_t>(seed));
            }
            Text out;
            check(qubus_gate_demo(gate_name.c_str(), input.c_str(), opts.str().c_str(), p, &out.ptr), gate_name);
            emit(cfg, out.str());
        } else if (*sweep) {
            Text out;
            check(qubus_sweep(read_file(sweep_file).c_str(), p,
                              cfg.format == "csv" ? QUBUS_FORMAT_CSV : QUBUS_FORMAT_JSON, &out.ptr),
                  sweep_file);
            emit(cfg, out.str());
        } else if (*decompose) {
            require_json(cfg, "decompose");
            Text out;
            double err = 0.0;
            check(qubus_decompose(read_file(matrix_file).c_str(), &out.ptr, &err), matrix_file);
            std::cerr << "reconstruction error " << err << "\n";
            emit(cfg, out.str());
        } else if (*fig2) {
            if (!fig2_dir.empty()) {
                fs::create_directories(fig2_dir);
                Text json, beta, peaks;
                check(qubus_fig2(p, fig2_beta2, QUBUS_FORMAT_JSON, fig2_peaks, &json.ptr), "fig2");
                check(qubus_fig2(p, fig2_beta2, QUBUS_FORMAT_CSV, 0, &beta.ptr), "fig2");
                check(qubus_fig2(p, fig2_beta2, QUBUS_FORMAT_CSV, fig2_peaks, &peaks.ptr), "fig2");
                write_file(fs::path(fig2_dir) / "fig2.json", json.str());
                write_file(fs::path(fig2_dir) / "fig2_beta.csv", beta.str());
                write_file(fs::path(fig2_dir) / "fig2_peaks.csv", peaks.str());
            } else {
                Text out;
                const bool csv = cfg.format == "csv";
                check(qubus_fig2(p, fig2_beta2, csv ? QUBUS_FORMAT_CSV : QUBUS_FORMAT_JSON, csv ? 0 : fig2_peaks,
                                 &out.ptr),
                      "fig2");
                emit(cfg, out.str());
            }
        } else if (*verify) {
            require_json(cfg, "verify");
            return cmd_verify(cfg, p, golden_dir);
        }
    } catch (const Failure &f) {
        std::cerr << "error: " << f.message << "\n";
        return f.exit_code;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}
