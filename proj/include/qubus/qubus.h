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


#ifndef QUBUS_QUBUS_H
#define QUBUS_QUBUS_H

#include <stddef.h>

#if defined(_WIN32)
#define QUBUS_API __declspec(dllexport)
#else
#define QUBUS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qubus_status {
    QUBUS_OK = 0,
    QUBUS_ERR_INVALID_ARGUMENT = 1,
    QUBUS_ERR_REGISTRY = 2,
    QUBUS_ERR_NUMERIC = 3,
    QUBUS_ERR_VALIDATION = 4,
    QUBUS_ERR_PARSE = 5,
    QUBUS_ERR_INTERNAL = 6
} qubus_status;

typedef enum qubus_format { QUBUS_FORMAT_JSON = 0, QUBUS_FORMAT_CSV = 1 } qubus_format;

typedef struct qubus_params qubus_params;
typedef struct qubus_state qubus_state;

/* Message of the last failed call on this thread; empty after a successful call. */
QUBUS_API const char *qubus_last_error(void);
QUBUS_API const char *qubus_version(void);
QUBUS_API const char *qubus_status_name(qubus_status status);

/* Strings returned through char ** outputs are owned by the caller. */
QUBUS_API void qubus_string_free(char *s);

QUBUS_API qubus_status qubus_params_create(qubus_params **out);
QUBUS_API void qubus_params_destroy(qubus_params *p);
/* Keys: alpha, theta, gamma, theta_probe, eta, seed, beta2 (sets alpha from theta). */
QUBUS_API qubus_status qubus_params_set(qubus_params *p, const char *key, double value);
QUBUS_API qubus_status qubus_params_get(const qubus_params *p, const char *key, double *value);
/* Applies a JSON object with the keys accepted by qubus_params_set plus qnd_mode and policy. */
QUBUS_API qubus_status qubus_params_load_json(qubus_params *p, const char *json);
QUBUS_API qubus_status qubus_params_to_json(const qubus_params *p, char **out);

/* Photons 1..n on paths "1".."n". `photons` may be 0 unless the spec is a random draw. */
QUBUS_API qubus_status qubus_state_from_spec(const char *spec, int photons, qubus_state **out);
QUBUS_API qubus_status qubus_state_from_json(const char *json, qubus_state **out);
QUBUS_API void qubus_state_destroy(qubus_state *s);
QUBUS_API qubus_status qubus_state_to_json(const qubus_state *s, char **out);
QUBUS_API qubus_status qubus_state_branch_count(const qubus_state *s, size_t *out);
QUBUS_API qubus_status qubus_state_fidelity(const qubus_state *a, const qubus_state *b, double *out);
/* Polarization amplitudes of single-path photons, interleaved re/im, 2 * 2^n doubles. */
QUBUS_API qubus_status qubus_state_logical(const qubus_state *s, const int *photons, size_t n, double *amplitudes);

/* Applies one gate call {"gate": name, ...arguments}. `report` may be NULL. */
QUBUS_API qubus_status qubus_gate_apply(const qubus_state *in, const char *call_json, const qubus_params *p,
                                        qubus_state **out, char **report);
QUBUS_API size_t qubus_gate_count(void);
QUBUS_API const char *qubus_gate_name(size_t index);
/* Runs a named gate on a canonical register built from `input`. `options_json` may be NULL. */
QUBUS_API qubus_status qubus_gate_demo(const char *name, const char *input, const char *options_json,
                                       const qubus_params *p, char **out);

QUBUS_API qubus_status qubus_run_program(const char *program_json, const qubus_params *p, char **out);
QUBUS_API qubus_status qubus_sweep(const char *spec_json, const qubus_params *p, qubus_format format, char **out);
/* Mesh JSON for a unitary matrix; `error` receives the largest reconstruction deviation when not NULL. */
QUBUS_API qubus_status qubus_decompose(const char *matrix_json, char **mesh, double *error);
/* Photon-number distribution for |beta|^2 = beta2 and the first `peaks` detector peaks. In CSV format
   `peaks` = 0 selects the photon-number distribution and `peaks` > 0 the detector peaks. */
QUBUS_API qubus_status qubus_fig2(const qubus_params *p, double beta2, qubus_format format, int peaks, char **out);
QUBUS_API qubus_status qubus_error_probability(const qubus_params *p, double *formula, double *direct);
/* Checks one golden case; `passed` receives 1 or 0. */
QUBUS_API qubus_status qubus_verify_case(const char *case_json, const qubus_params *p, char **out, int *passed);

#ifdef __cplusplus
}
#endif

#endif
