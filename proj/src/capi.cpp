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


#include "qubus/qubus.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "qubus/analysis.hpp"
#include "qubus/error.hpp"
#include "qubus/io.hpp"
#include "qubus/pipelines.hpp"
#include "qubus/program.hpp"
#include "qubus/synthesis.hpp"

struct qubus_params {
    qubus::GateParams p;
};

struct qubus_state {
    qubus::HybridState s;
};

namespace {

thread_local std::string last_error;

qubus_status status_of(qubus::ErrorCode c) {
    switch (c) {
        case qubus::ErrorCode::InvalidArgument: return QUBUS_ERR_INVALID_ARGUMENT;
        case qubus::ErrorCode::Registry: return QUBUS_ERR_REGISTRY;
        case qubus::ErrorCode::Numeric: return QUBUS_ERR_NUMERIC;
        case qubus::ErrorCode::Validation: return QUBUS_ERR_VALIDATION;
        case qubus::ErrorCode::Parse: return QUBUS_ERR_PARSE;
    }
    return QUBUS_ERR_INTERNAL;
}

template <typename F>
qubus_status guarded(F &&f) {
    last_error.clear();
    try {
        f();
        return QUBUS_OK;
    } catch (const qubus::Error &e) {
        last_error = e.what();
        return status_of(e.code());
    } catch (const nlohmann::json::exception &e) {
        last_error = e.what();
        return QUBUS_ERR_PARSE;
    } catch (const std::exception &e) {
        last_error = e.what();
        return QUBUS_ERR_INTERNAL;
    }
}

void require(bool ok, const char *what) {
    if (!ok) qubus::fail(qubus::ErrorCode::InvalidArgument, std::string("null argument: ") + what);
}

char *duplicate(const std::string &s) {
    char *out = static_cast<char *>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

qubus::Json parse(const char *text, const char *what) {
    require(text != nullptr, what);
    try {
        return qubus::Json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        qubus::fail(qubus::ErrorCode::Parse, std::string(what) + " is not valid JSON: " + e.what());
    }
}

const qubus::GateParams &params_or_default(const qubus_params *p) {
    static const qubus::GateParams defaults;
    return p ? p->p : defaults;
}

}  // namespace

extern "C" {

const char *qubus_last_error(void) { return last_error.c_str(); }

const char *qubus_version(void) { return "1.0.0"; }

const char *qubus_status_name(qubus_status status) {
    switch (status) {
        case QUBUS_OK: return "ok";
        case QUBUS_ERR_INVALID_ARGUMENT: return "invalid argument";
        case QUBUS_ERR_REGISTRY: return "registry conflict";
        case QUBUS_ERR_NUMERIC: return "numeric failure";
        case QUBUS_ERR_VALIDATION: return "validation failure";
        case QUBUS_ERR_PARSE: return "parse error";
        case QUBUS_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

void qubus_string_free(char *s) { std::free(s); }

qubus_status qubus_params_create(qubus_params **out) {
    return guarded([&] {
        require(out != nullptr, "out");
        *out = new qubus_params{};
    });
}

void qubus_params_destroy(qubus_params *p) { delete p; }

qubus_status qubus_params_set(qubus_params *p, const char *key, double value) {
    return guarded([&] {
        require(p != nullptr && key != nullptr, "params");
        const std::string k = key;
        if (k == "beta2") {
            auto q = qubus::GateParams::for_beta2(value, p->p.theta);
            p->p.alpha = q.alpha;
        } else if (k == "seed") {
            if (value < 0) qubus::fail(qubus::ErrorCode::InvalidArgument, "seed must be non-negative");
            p->p.seed = static_cast<std::uint64_t>(value);
        } else {
            p->p = qubus::params_from_json(qubus::Json{{k, value}}, p->p);
        }
    });
}

qubus_status qubus_params_get(const qubus_params *p, const char *key, double *value) {
    return guarded([&] {
        require(p != nullptr && key != nullptr && value != nullptr, "params");
        const std::string k = key;
        if (k == "alpha") *value = p->p.alpha;
        else if (k == "theta") *value = p->p.theta;
        else if (k == "gamma") *value = p->p.gamma.real();
        else if (k == "theta_probe") *value = p->p.theta_probe;
        else if (k == "eta") *value = p->p.eta;
        else if (k == "seed") *value = static_cast<double>(p->p.seed);
        else if (k == "beta2") *value = p->p.beta2();
        else qubus::fail(qubus::ErrorCode::InvalidArgument, "unknown parameter '" + k + "'");
    });
}

qubus_status qubus_params_load_json(qubus_params *p, const char *json) {
    return guarded([&] {
        require(p != nullptr, "params");
        p->p = qubus::params_from_json(parse(json, "parameter file"), p->p);
    });
}

qubus_status qubus_params_to_json(const qubus_params *p, char **out) {
    return guarded([&] {
        require(p != nullptr && out != nullptr, "params");
        *out = duplicate(qubus::dump_json(qubus::params_to_json(p->p)));
    });
}

qubus_status qubus_state_from_spec(const char *spec, int photons, qubus_state **out) {
    return guarded([&] {
        require(spec != nullptr && out != nullptr, "spec");
        *out = new qubus_state{qubus::register_from_spec(qubus::parse_state_spec(spec, photons))};
    });
}

qubus_status qubus_state_from_json(const char *json, qubus_state **out) {
    return guarded([&] {
        require(out != nullptr, "out");
        *out = new qubus_state{qubus::state_from_json(parse(json, "state"))};
    });
}

void qubus_state_destroy(qubus_state *s) { delete s; }

qubus_status qubus_state_to_json(const qubus_state *s, char **out) {
    return guarded([&] {
        require(s != nullptr && out != nullptr, "state");
        *out = duplicate(qubus::dump_json(qubus::state_to_json(s->s)));
    });
}

qubus_status qubus_state_branch_count(const qubus_state *s, size_t *out) {
    return guarded([&] {
        require(s != nullptr && out != nullptr, "state");
        *out = s->s.size();
    });
}

qubus_status qubus_state_fidelity(const qubus_state *a, const qubus_state *b, double *out) {
    return guarded([&] {
        require(a != nullptr && b != nullptr && out != nullptr, "state");
        *out = qubus::fidelity(a->s, b->s);
    });
}

qubus_status qubus_state_logical(const qubus_state *s, const int *photons, size_t n, double *amplitudes) {
    return guarded([&] {
        require(s != nullptr && photons != nullptr && amplitudes != nullptr, "state");
        auto amps = qubus::logical_amplitudes(s->s, std::vector<int>(photons, photons + n));
        for (std::size_t i = 0; i < amps.size(); ++i) {
            amplitudes[2 * i] = amps[i].real();
            amplitudes[2 * i + 1] = amps[i].imag();
        }
    });
}

qubus_status qubus_gate_apply(const qubus_state *in, const char *call_json, const qubus_params *p, qubus_state **out,
                              char **report) {
    return guarded([&] {
        require(in != nullptr && out != nullptr, "state");
        auto r = qubus::invoke_gate(in->s, parse(call_json, "gate call"), params_or_default(p));
        std::string text = report ? qubus::dump_json(qubus::report_to_json(r.report)) : std::string();
        auto *s = new qubus_state{std::move(r.state)};
        if (report) {
            try {
                *report = duplicate(text);
            } catch (...) {
                delete s;
                throw;
            }
        }
        *out = s;
    });
}

size_t qubus_gate_count(void) { return qubus::gate_names().size(); }

const char *qubus_gate_name(size_t index) {
    const auto &names = qubus::gate_names();
    return index < names.size() ? names[index].c_str() : nullptr;
}

qubus_status qubus_gate_demo(const char *name, const char *input, const char *options_json, const qubus_params *p,
                             char **out) {
    return guarded([&] {
        require(name != nullptr && input != nullptr && out != nullptr, "gate");
        qubus::Json options = options_json ? parse(options_json, "gate options") : qubus::Json::object();
        *out = duplicate(qubus::dump_json(qubus::run_gate_demo(name, input, params_or_default(p), options)));
    });
}

qubus_status qubus_run_program(const char *program_json, const qubus_params *p, char **out) {
    return guarded([&] {
        require(out != nullptr, "out");
        *out = duplicate(qubus::dump_json(qubus::run_program(parse(program_json, "program"), params_or_default(p))));
    });
}

qubus_status qubus_sweep(const char *spec_json, const qubus_params *p, qubus_format format, char **out) {
    return guarded([&] {
        require(out != nullptr, "out");
        auto spec = qubus::sweep_spec_from_json(parse(spec_json, "sweep spec"), params_or_default(p));
        auto table = qubus::run_sweep(spec);
        *out = duplicate(format == QUBUS_FORMAT_CSV ? qubus::to_csv(table)
                                                    : qubus::dump_json(qubus::table_to_json(table)));
    });
}

qubus_status qubus_decompose(const char *matrix_json, char **mesh, double *error) {
    return guarded([&] {
        require(mesh != nullptr, "mesh");
        Eigen::MatrixXcd u = qubus::matrix_from_json(parse(matrix_json, "matrix"));
        auto m = qubus::reck_decompose(u);
        if (error) *error = (m.matrix() - u).cwiseAbs().maxCoeff();
        *mesh = duplicate(qubus::dump_json(qubus::mesh_to_json(m)));
    });
}

qubus_status qubus_fig2(const qubus_params *p, double beta2, qubus_format format, int peaks, char **out) {
    return guarded([&] {
        require(out != nullptr, "out");
        const auto &q = params_or_default(p);
        auto d = qubus::fig2_data(q.gamma.real(), q.theta_probe, beta2, peaks > 0 ? peaks : 4);
        if (format == QUBUS_FORMAT_CSV)
            *out = duplicate(peaks > 0 ? qubus::fig2_peaks_csv(d) : qubus::fig2_beta_csv(d));
        else
            *out = duplicate(qubus::dump_json(qubus::fig2_to_json(d)));
    });
}

qubus_status qubus_error_probability(const qubus_params *p, double *formula, double *direct) {
    return guarded([&] {
        const auto &q = params_or_default(p);
        if (formula) *formula = qubus::error_probability_formula(q.alpha, q.theta, q.gamma.real(), q.eta, q.theta_probe);
        if (direct) *direct = qubus::error_probability_direct(q.alpha, q.theta, q.gamma.real(), q.eta, q.theta_probe);
    });
}

qubus_status qubus_verify_case(const char *case_json, const qubus_params *p, char **out, int *passed) {
    return guarded([&] {
        require(out != nullptr, "out");
        auto r = qubus::verify_case(parse(case_json, "golden case"), params_or_default(p));
        if (passed) *passed = r.at("passed").get<bool>() ? 1 : 0;
        *out = duplicate(qubus::dump_json(r));
    });
}

}  // extern "C"
