// Copyright 2026 The Crossres Authors
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

#pragma once

#include <complex>
#include <vector>

namespace crossres {

// Powers of one mode inside a monomial: a^annihilate (a^dagger)^create.
struct ModeExponent {
  int annihilate = 0;
  int create = 0;

  int net() const { return annihilate - create; }
  int degree() const { return annihilate + create; }

  friend bool operator==(const ModeExponent&, const ModeExponent&) = default;
};

// One coupling g * sigma_+ A + h.c. where A = prod_k a_k^{m_k1} a_k^dagger^{m_k2}.
// exponents[k] belongs to mode k; every mode of the system has an entry.
struct InteractionTerm {
  std::complex<double> strength;
  std::vector<ModeExponent> exponents;

  friend bool operator==(const InteractionTerm&, const InteractionTerm&) = default;
};

}  // namespace crossres
