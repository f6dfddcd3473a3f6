// Copyright 2026 The darksim Authors
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

#include <array>
#include <span>

#include "darksim/numlin.hpp"

namespace darksim {

struct SpinParams {
    double delta_nu = 270.3;  // Hz
    double j_coupling = 4.1;  // Hz
};

struct RFField {
    double amplitude = 0.0;       // Hz
    double phase = 0.0;           // rad
    double carrier_offset = 0.0;  // Hz, relative to the mean Larmor frequency
};

// Computational basis, 0 = spin up.
enum class BasisState : int { s00 = 0, s01 = 1, s10 = 2, s11 = 3 };

struct SpinOperators {
    Op ix1, iy1, iz1, ix2, iy2, iz2;
    Op ix, iy, iz;          // total-spin sums
    Op ip1, im1, ip2, im2;  // raising/lowering
    Op identity;
};

const SpinOperators& spin_operators();

Op scalar_coupling_operator();  // I1 . I2
Op swap_operator();

Op internal_hamiltonian(const SpinParams& p);
Op equivalence_hamiltonian(double j_coupling);

Op rf_hamiltonian(const RFField& field, double t);
Op rf_hamiltonian(std::span<const RFField> fields, double t);

struct SingletTriplet {
    Ket s0, t1, t0, tm1;
};
SingletTriplet singlet_triplet_states();

Ket basis_ket(BasisState b);
Op projector(const Ket& v);

Op equilibrium_deviation();
Op singlet_deviation();  // |S0><S0| - 1/4

// Eigenstates of the internal Hamiltonian labeled by dominant basis overlap:
// column b of `vectors` and energies(b) belong to the eigenstate labeled b.
struct LabeledEigenbasis {
    Eigen::Vector4d energies;
    Op vectors;
};
LabeledEigenbasis labeled_eigenbasis(const SpinParams& p);

// E(b) - E(a), Hz.
double transition_frequency(const SpinParams& p, BasisState a, BasisState b);
// Same for explicit eigenvectors (useful when the spectrum is degenerate, e.g. delta_nu = 0).
double transition_frequency(const SpinParams& p, const Ket& a, const Ket& b);

// Offset of a co-rotating field that is resonant with a <-> b (total m must differ by one).
double resonance_offset(const SpinParams& p, BasisState a, BasisState b);

double total_magnetization(BasisState b);

// Propagator of the internal Hamiltonian over t seconds.
Op internal_propagator(const SpinParams& p, double t);

// Interaction-frame view of a state at time t after the frame clock started.
Op to_interaction_frame(const Op& rho, const SpinParams& p, double t);

}  // namespace darksim
