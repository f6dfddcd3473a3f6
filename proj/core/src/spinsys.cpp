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

#include "darksim/spinsys.hpp"

#include <cmath>

namespace darksim {

namespace {

Op kron22(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Op out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

SpinOperators build_operators() {
    const cplx I(0.0, 1.0);
    Eigen::Matrix2cd sx, sy, sz, sp, sm, id;
    sx << 0.0, 0.5, 0.5, 0.0;
    sy << 0.0, -0.5 * I, 0.5 * I, 0.0;
    sz << 0.5, 0.0, 0.0, -0.5;
    sp << 0.0, 1.0, 0.0, 0.0;
    sm << 0.0, 0.0, 1.0, 0.0;
    id.setIdentity();

    SpinOperators o;
    o.ix1 = kron22(sx, id);
    o.iy1 = kron22(sy, id);
    o.iz1 = kron22(sz, id);
    o.ix2 = kron22(id, sx);
    o.iy2 = kron22(id, sy);
    o.iz2 = kron22(id, sz);
    o.ix = o.ix1 + o.ix2;
    o.iy = o.iy1 + o.iy2;
    o.iz = o.iz1 + o.iz2;
    o.ip1 = kron22(sp, id);
    o.im1 = kron22(sm, id);
    o.ip2 = kron22(id, sp);
    o.im2 = kron22(id, sm);
    o.identity = Op::Identity();
    return o;
}

}  // namespace

const SpinOperators& spin_operators() {
    static const SpinOperators ops = build_operators();
    return ops;
}

Op scalar_coupling_operator() {
    const auto& o = spin_operators();
    return o.ix1 * o.ix2 + o.iy1 * o.iy2 + o.iz1 * o.iz2;
}

Op swap_operator() {
    Op s = Op::Zero();
    s(0, 0) = 1.0;
    s(1, 2) = 1.0;
    s(2, 1) = 1.0;
    s(3, 3) = 1.0;
    return s;
}

Op internal_hamiltonian(const SpinParams& p) {
    const auto& o = spin_operators();
    return 0.5 * p.delta_nu * o.iz1 - 0.5 * p.delta_nu * o.iz2 + p.j_coupling * scalar_coupling_operator();
}

Op equivalence_hamiltonian(double j_coupling) { return j_coupling * scalar_coupling_operator(); }

Op rf_hamiltonian(const RFField& field, double t) {
    const auto& o = spin_operators();
    if (field.amplitude == 0.0) return Op::Zero();
    if (field.carrier_offset == 0.0 && field.phase == 0.0) return field.amplitude * o.ix;
    const double a = kTwoPi * field.carrier_offset * t + field.phase;
    return field.amplitude * (std::cos(a) * o.ix + std::sin(a) * o.iy);
}

Op rf_hamiltonian(std::span<const RFField> fields, double t) {
    Op h = Op::Zero();
    for (const auto& f : fields) h += rf_hamiltonian(f, t);
    return h;
}

SingletTriplet singlet_triplet_states() {
    const double r = 1.0 / std::sqrt(2.0);
    SingletTriplet st;
    st.s0 << 0.0, r, -r, 0.0;
    st.t1 << 1.0, 0.0, 0.0, 0.0;
    st.t0 << 0.0, r, r, 0.0;
    st.tm1 << 0.0, 0.0, 0.0, 1.0;
    return st;
}

Ket basis_ket(BasisState b) {
    Ket v = Ket::Zero();
    v(static_cast<int>(b)) = 1.0;
    return v;
}

Op projector(const Ket& v) { return v * v.adjoint(); }

Op equilibrium_deviation() {
    const auto& o = spin_operators();
    return o.iz1 + o.iz2;
}

Op singlet_deviation() { return projector(singlet_triplet_states().s0) - 0.25 * Op::Identity(); }

LabeledEigenbasis labeled_eigenbasis(const SpinParams& p) {
    Eigen::SelfAdjointEigenSolver<Op> es(internal_hamiltonian(p));
    const Op& v = es.eigenvectors();
    LabeledEigenbasis out;
    std::array<int, 4> owner{-1, -1, -1, -1};
    for (int k = 0; k < 4; ++k) {
        int best = 0;
        double best_overlap = -1.0;
        for (int b = 0; b < 4; ++b) {
            const double w = std::norm(v(b, k));
            // strict comparison keeps the lower index on ties
            if (w > best_overlap + 1e-12) {
                best_overlap = w;
                best = b;
            }
        }
        if (owner[best] != -1)
            throw Error(Errc::DegenerateLabeling, "two eigenstates share dominant basis state " + std::to_string(best));
        owner[best] = k;
    }
    for (int b = 0; b < 4; ++b) {
        const int k = owner[b];
        Ket col = v.col(k);
        // fix the phase so the dominant amplitude is real positive
        const cplx d = col(b);
        col *= std::abs(d) / d;
        out.vectors.col(b) = col;
        out.energies(b) = es.eigenvalues()(k);
    }
    return out;
}

double transition_frequency(const SpinParams& p, BasisState a, BasisState b) {
    const auto eb = labeled_eigenbasis(p);
    return eb.energies(static_cast<int>(b)) - eb.energies(static_cast<int>(a));
}

double transition_frequency(const SpinParams& p, const Ket& a, const Ket& b) {
    const Op h = internal_hamiltonian(p);
    auto energy = [&](const Ket& v) {
        const double e = (v.adjoint() * h * v)(0).real() / v.squaredNorm();
        if ((h * v - e * v).norm() > 1e-9 * std::max(1.0, h.norm()))
            throw Error(Errc::InvalidValue, "transition_frequency: state is not an eigenvector");
        return e;
    };
    return energy(b) - energy(a);
}

double total_magnetization(BasisState b) {
    switch (b) {
        case BasisState::s00: return 1.0;
        case BasisState::s11: return -1.0;
        default: return 0.0;
    }
}

double resonance_offset(const SpinParams& p, BasisState a, BasisState b) {
    const double dm = total_magnetization(a) - total_magnetization(b);
    if (std::abs(std::abs(dm) - 1.0) > 1e-12)
        throw Error(Errc::InvalidValue, "resonance_offset: transition is not single-quantum");
    const auto eb = labeled_eigenbasis(p);
    return (eb.energies(static_cast<int>(a)) - eb.energies(static_cast<int>(b))) / dm;
}

Op internal_propagator(const SpinParams& p, double t) {
    return mat_exp_hermitian(internal_hamiltonian(p), kTwoPi * t);
}

Op to_interaction_frame(const Op& rho, const SpinParams& p, double t) {
    const Op u0 = internal_propagator(p, t);
    return u0.adjoint() * rho * u0;
}

}  // namespace darksim
