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

#ifndef QUBUS_STATE_INTERNAL_HPP
#define QUBUS_STATE_INTERNAL_HPP

#include <vector>

#include "qubus/hybrid_state.hpp"

namespace qubus::detail {

Complex qubus_overlap(const std::vector<Complex> &a, const std::vector<Complex> &b);
bool qubus_close(const std::vector<Complex> &a, const std::vector<Complex> &b, double tol);

struct SlotsHash {
    std::size_t operator()(const std::vector<Slot> &v) const noexcept;
};

}  // namespace qubus::detail

#endif
