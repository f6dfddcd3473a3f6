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


#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>

#include "darksim/dynamics.hpp"
#include "darksim/error.hpp"
#include "oracles.hpp"

using namespace darksim;

namespace {

const SpinParams kMolecule{270.3, 4.1};

HamiltonianFn constant(const Op& h) {
    return [h](double) { return h; };
}

PropagationConfig cfg_with(double dt, Method m = Method::ExactSlice, int traj = 1, int stride = 0) {
    PropagationConfig c;
    c.dt = dt;
    c.method = m;
    c.n_trajectories = traj;
    c.record_stride = stride;
    return c;
}

// generator eigenvalue belonging to the eigenvector that best overlaps vec(x)
cplx mode_eigenvalue(const Super& g, const Op& x) {
    Eigen::ComplexEigenSolver<Matrix> es{Matrix(g)};
    const SuperVec v = vec(x).normalized();
    int best = 0;
    double ov = -1.0;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
        const double o = std::abs(v.dot(es.eigenvectors().col(k).normalized()));
        if (o > ov) {
            ov = o;
            best = k;
        }
    }
    return es.eigenvalues()(best);
}

Op random_density(std::mt19937_64& rng) {
    const Matrix a = oracle::random_hermitian(4, rng);
    Op r = Op(a * a.adjoint());
    return r / r.trace();
}

}  // namespace

TEST(EvolveUnitary, ZeroHamiltonian) {
    std::mt19937_64 rng(1);
    const Op rho = random_density(rng);
    EXPECT_EQ(evolve_unitary(rho, constant(Op::Zero()), 0.0, 0.3, cfg_with(1e-3)), rho);
}

TEST(EvolveUnitary, SingletStationaryUnderEquivalence) {
    const Op s = projector(singlet_triplet_states().s0);
    const Op out = evolve_unitary(s, constant(equivalence_hamiltonian(4.1)), 0.0, 1.7, cfg_with(1e-3));
    EXPECT_LE((out - s).norm(), 1e-9);
}

TEST(EvolveUnitary, T0MatchesSingleShotPropagator) {
    const Op t0 = projector(singlet_triplet_states().t0);
    const double t = 1.0 / (2.0 * kMolecule.delta_nu);
    const Op h = internal_hamiltonian(kMolecule);
    const Op out = evolve_unitary(t0, constant(h), 0.0, t, cfg_with(50e-6));
    const Op u = oracle::propagator_general(h, t);
    EXPECT_LE((out - u * t0 * u.adjoint()).norm(), 1e-9);
}

TEST(EvolveUnitary, PreservesSpectrum) {
    std::mt19937_64 rng(2);
    const Op rho = random_density(rng);
    const Op h = internal_hamiltonian(kMolecule) + 40.0 * spin_operators().ix;
    const Op out = evolve_unitary(rho, constant(h), 0.0, 0.05, cfg_with(50e-6));
    Eigen::SelfAdjointEigenSolver<Op> a(rho), b(out);
    EXPECT_LE((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(out.trace().real(), 1.0, 1e-10);
    EXPECT_LE((out - out.adjoint()).norm(), 1e-10);
}

TEST(Lindblad, TracePreservingGenerator) {
    RelaxationModel m{0.3, 0.2, 0.5, 0.7};
    const Super g = lindblad_superoperator(internal_hamiltonian(kMolecule), m);
    const SuperVec tr = vec(Op::Identity());
    EXPECT_LE((tr.adjoint() * g).norm(), 1e-12);
}

TEST(Lindblad, RejectsNonHermitian) {
    Op h = Op::Zero();
    h(0, 2) = cplx(0, 1);
    try {
        (void)lindblad_superoperator(h, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NotHermitian);
    }
}

TEST(Lindblad, CoherentLimit) {
    const Op h = internal_hamiltonian(kMolecule) + 25.0 * spin_operators().iy;
    std::mt19937_64 rng(4);
    const Op rho = random_density(rng);
    const double t = 0.013;
    const Op u = oracle::propagator_general(h, t);
    const Op got = apply_superoperator(expm(t * lindblad_superoperator(h, {})), rho);
    EXPECT_LE((got - u * rho * u.adjoint()).norm(), 1e-9);
    const Evolution ev = evolve_lindblad(rho, constant(h), {}, 0.0, t, cfg_with(1e-4));
    EXPECT_LE((ev.final_state - evolve_unitary(rho, constant(h), 0.0, t, cfg_with(1e-4))).norm(), 1e-9);
}

TEST(Lindblad, SingletImmuneToCommonDephasing) {
    RelaxationModel m;
    m.correlated_dephasing_rate = 2.0;
    const Super g = lindblad_superoperator(Op::Zero(), m);
    EXPECT_LE((g * vec(singlet_deviation())).norm(), 1e-14);
}

TEST(Lindblad, UncorrelatedDephasingRate) {
    const double k = 0.8;
    RelaxationModel m;
    m.uncorrelated_dephasing_rate = k;
    const Super g = lindblad_superoperator(Op::Zero(), m);
    Op c = Op::Zero();
    c(1, 2) = 1.0;  // |01><10|
    const cplx lam = mode_eigenvalue(g, c);
    // each spin contributes k (m_a m_b - (m_a^2 + m_b^2)/2) = -k/2
    EXPECT_NEAR(lam.real(), -k, 1e-12);
    EXPECT_NEAR(lam.imag(), 0.0, 1e-12);
    EXPECT_LE((g * vec(c) - lam * vec(c)).norm(), 1e-12);
}

TEST(Lindblad, DephasingKeepsMaximallyMixedFixed) {
    RelaxationModel m;
    m.uncorrelated_dephasing_rate = 0.4;
    m.correlated_dephasing_rate = 0.9;
    const Super g = lindblad_superoperator(internal_hamiltonian(kMolecule), m);
    EXPECT_LE((g * vec(Op(Op::Identity() / 4.0))).norm(), 1e-10);
}

TEST(Lindblad, InversionRecoveryMatchesGeneratorEigenvalue) {
    const double k = 0.05;
    RelaxationModel m;
    m.flip_rate = k;
    const SpinParams uncoupled{270.3, 0.0};
    const auto& o = spin_operators();
    const cplx lam = mode_eigenvalue(lindblad_superoperator(internal_hamiltonian(uncoupled), m), o.iz1);
    EXPECT_NEAR(measure_t1(m, uncoupled), -1.0 / lam.real(), 1e-9);
    EXPECT_NEAR(-1.0 / lam.real(), 1.0 / (2.0 * k), 1e-9);
    // with the coupling on, flip-flop mixing only perturbs it slightly
    EXPECT_NEAR(measure_t1(m, kMolecule), 1.0 / (2.0 * k), 1e-3 / (2.0 * k));
}

TEST(Lindblad, StepTooLarge) {
    const Op h = 2000.0 * spin_operators().ix;
    try {
        (void)evolve_lindblad(singlet_deviation(), constant(h), {}, 0.0, 0.01, cfg_with(1e-3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::StepTooLarge);
    }
}

TEST(Lindblad, InvariantsOverLongRun) {
    RelaxationModel m{0.03, 0.05, 0.01, 0.02};
    std::mt19937_64 rng(8);
    const Op rho = random_density(rng);
    const Evolution ev =
        evolve_lindblad(rho, constant(internal_hamiltonian(kMolecule)), m, 0.0, 30.0, cfg_with(1e-3, Method::ExactSlice, 1, 1000));
    ASSERT_EQ(ev.samples.size(), 31u);
    for (const Op& r : ev.samples) {
        EXPECT_NEAR(r.trace().real(), 1.0, 1e-9);
        EXPECT_LE((r - r.adjoint()).norm(), 1e-9);
        Eigen::SelfAdjointEigenSolver<Op> es(0.5 * (r + r.adjoint()));
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
    }
}

TEST(Lindblad, Rk4AgreesWithExactSlice) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> rate(0.0, 2.0);
    for (int inst = 0; inst < 20; ++inst) {
        const Op h = Op(oracle::random_hermitian(4, rng, 60.0));
        RelaxationModel m{rate(rng), rate(rng), rate(rng), rate(rng)};
        const Op rho = random_density(rng);
        const auto exact = evolve_lindblad(rho, constant(h), m, 0.0, 0.01, cfg_with(10e-6, Method::ExactSlice));
        const auto rk4 = evolve_lindblad(rho, constant(h), m, 0.0, 0.01, cfg_with(10e-6, Method::Rk4));
        EXPECT_LE((exact.final_state - rk4.final_state).norm(), 1e-6) << "instance " << inst;
    }
}

TEST(Lindblad, SplitAgreesWithExactSlice) {
    RelaxationModel m{0.03, 0.05, 0.2, 0.1};
    const Op h = internal_hamiltonian(kMolecule) + 5.0 * spin_operators().ix;
    const Op rho = singlet_deviation();
    const auto a = evolve_lindblad(rho, constant(h), m, 0.0, 0.5, cfg_with(50e-6, Method::ExactSlice));
    const auto b = evolve_lindblad(rho, constant(h), m, 0.0, 0.5, cfg_with(50e-6, Method::Split));
    // dissipator is split on 1 ms blocks
    EXPECT_LE((a.final_state - b.final_state).norm(), 1e-4);
}

TEST(Stochastic, ZeroNoiseIsLindblad) {
    RelaxationModel m{0.03, 0.05, 0.0, 0.0};
    NoiseProcess n;
    const auto h = constant(internal_hamiltonian(kMolecule));
    const auto a = evolve_stochastic_avg(singlet_deviation(), h, m, n, 0.0, 0.2, cfg_with(1e-3, Method::ExactSlice, 8, 10));
    const auto b = evolve_lindblad(singlet_deviation(), h, m, 0.0, 0.2, cfg_with(1e-3, Method::ExactSlice, 8, 10));
    EXPECT_EQ(a.final_state, b.final_state);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) EXPECT_EQ(a.samples[k], b.samples[k]);
}

TEST(Stochastic, StaticGaussianDephasing) {
    NoiseProcess n;
    n.rms_amplitude = 1.5;
    n.correlation_time = 1e4;  // frozen over the run
    n.seed = 17;
    const Op rho0 = spin_operators().ix1;
    const auto ev = evolve_stochastic_avg(rho0, constant(Op::Zero()), {}, n, 0.0, 0.3,
                                          cfg_with(1e-3, Method::Split, 2000, 50));
    ASSERT_EQ(ev.samples.size(), 7u);
    for (std::size_t k = 0; k < ev.samples.size(); ++k) {
        const double t = 0.05 * k;
        const double s2 = std::pow(kTwoPi * n.rms_amplitude * t, 2);
        const double want = std::exp(-0.5 * s2);
        const double got = (ev.samples[k] * spin_operators().ix1).trace().real();
        // sampling spread of cos(x) for x ~ N(0, s2)
        const double sigma = std::sqrt((0.5 * (1.0 + std::exp(-2.0 * s2)) - want * want) / 2000.0);
        EXPECT_NEAR(got, want, 3.0 * sigma + 1e-9) << "t=" << t;
        if (want >= 0.6) EXPECT_NEAR(got, want, 0.02 * want) << "t=" << t;
    }
}

TEST(Stochastic, StrongFieldDecouples) {
    NoiseProcess n;
    n.rms_amplitude = 1.5;
    n.correlation_time = 0.05;
    n.seed = 3;
    const auto& o = spin_operators();
    const Op rho0 = o.ix;
    const auto cfg = cfg_with(50e-6, Method::Split, 100, 0);
    const auto free = evolve_stochastic_avg(rho0, constant(Op::Zero()), {}, n, 0.0, 1.0, cfg);
    const auto locked = evolve_stochastic_avg(rho0, constant(Op(2000.0 * o.ix)), {}, n, 0.0, 1.0, cfg);
    const double c_free = (free.final_state * o.ix).trace().real();
    const double c_lock = (locked.final_state * o.ix).trace().real();
    EXPECT_GT(c_lock, c_free + 0.1);
}

TEST(Stochastic, DeterministicAcrossThreadCounts) {
    NoiseProcess n;
    n.rms_amplitude = 2.0;
    n.seed = 99;
    RelaxationModel m{0.03, 0.05, 0.0, 0.0};
    const auto h = constant(Op(internal_hamiltonian(kMolecule) + 3.0 * spin_operators().ix));
    const auto cfg = cfg_with(1e-3, Method::Split, 37, 20);
    setenv("DARKSIM_THREADS", "1", 1);
    const auto a = evolve_stochastic_avg(singlet_deviation(), h, m, n, 0.0, 0.2, cfg);
    setenv("DARKSIM_THREADS", "3", 1);
    const auto b = evolve_stochastic_avg(singlet_deviation(), h, m, n, 0.0, 0.2, cfg);
    unsetenv("DARKSIM_THREADS");
    EXPECT_EQ(a.final_state, b.final_state);
    for (std::size_t k = 0; k < a.samples.size(); ++k) EXPECT_EQ(a.samples[k], b.samples[k]);
    const Op& f = a.final_state;
    EXPECT_LE((f - f.adjoint()).norm(), 1e-12);
    EXPECT_LE(std::abs(f.trace()), 1e-12);
}

TEST(OrnsteinUhlenbeck, StationaryStatistics) {
    NoiseProcess n;
    n.rms_amplitude = 1.5;
    n.correlation_time = 0.05;
    n.correlation_coefficient = 0.6;
    n.seed = 5;
    OrnsteinUhlenbeckPair ou(n, 0);
    const double dt = 0.01;
    const int steps = 400000;
    double s11 = 0, s22 = 0, s12 = 0, lag = 0, prev = ou.field1();
    for (int k = 0; k < steps; ++k) {
        ou.advance(dt);
        const double a = ou.field1(), b = ou.field2();
        s11 += a * a;
        s22 += b * b;
        s12 += a * b;
        lag += a * prev;
        prev = a;
    }
    const double var = n.rms_amplitude * n.rms_amplitude;
    EXPECT_NEAR(s11 / steps, var, 0.05 * var);
    EXPECT_NEAR(s22 / steps, var, 0.05 * var);
    EXPECT_NEAR(s12 / steps / var, 0.6, 0.03);
    EXPECT_NEAR(lag / steps / var, std::exp(-dt / n.correlation_time), 0.03);
}

TEST(Calibration, RoundTrip) {
    const RFField lock{2000.0, 0.0, 0.0};
    const RelaxationModel m = fit_relaxation_rates(6.3, 12.0, lock);
    EXPECT_NEAR(measure_t1(m, kMolecule), 6.3, 0.01 * 6.3);
    EXPECT_NEAR(measure_ts(m, kMolecule, lock), 12.0, 0.02 * 12.0);
    EXPECT_GE(m.flip_rate, 0.0);
    EXPECT_GE(m.correlated_flip_rate, 0.0);
}

TEST(Calibration, FlipOnlyLimit) {
    // Uncorrelated transverse flips relax Iz1Iz2 at 2 R1 and the transverse
    // products at R1, so singlet order decays at (4/3) R1 under equivalence.
    const double k = 0.1;
    RelaxationModel m;
    m.flip_rate = k;
    const double r1 = 1.0 / measure_t1(m, SpinParams{270.3, 0.0});
    EXPECT_NEAR(r1, 2.0 * k, 1e-9);
    // the three products are separate generator modes; singlet order is their
    // equal mix, so its initial decay rate is the mean eigenvalue
    const Super g = lindblad_superoperator(equivalence_hamiltonian(4.1), m);
    const auto& o = spin_operators();
    const cplx zz = mode_eigenvalue(g, Op(o.iz1 * o.iz2));
    const cplx xx = mode_eigenvalue(g, Op(o.ix1 * o.ix2));
    const cplx yy = mode_eigenvalue(g, Op(o.iy1 * o.iy2));
    EXPECT_NEAR(-zz.real(), 2.0 * r1, 1e-9);
    EXPECT_NEAR(-xx.real(), r1, 1e-9);
    EXPECT_NEAR(-yy.real(), r1, 1e-9);
    const SuperVec sv = vec(singlet_deviation());
    const double rate0 = -(sv.dot(g * sv)).real() / sv.squaredNorm();
    EXPECT_NEAR(rate0, -(zz.real() + xx.real() + yy.real()) / 3.0, 1e-9);
    EXPECT_NEAR(rate0, 4.0 / 3.0 * r1, 1e-9);

    FitOptions opts;
    opts.allow_correlated_flips = false;
    const RFField lock{2000.0, 0.0, 0.0};
    const double t1 = 5.0;
    // flips alone cannot make the singlet outlive T1
    try {
        (void)fit_relaxation_rates(t1, t1 * 4.0 / 3.0, lock, opts);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::Infeasible);
    }
    RelaxationModel flips;
    flips.flip_rate = 1.0 / (2.0 * t1);
    const double ts_flip = measure_ts(flips, kMolecule, lock);
    EXPECT_GT(ts_flip, 0.7 * t1);
    EXPECT_LT(ts_flip, t1);
    const RelaxationModel fit = fit_relaxation_rates(t1, ts_flip, lock, opts);
    EXPECT_EQ(fit.correlated_flip_rate, 0.0);
    EXPECT_NEAR(fit.flip_rate, flips.flip_rate, 0.02 * flips.flip_rate);
}

TEST(Calibration, InfiniteSingletLifetimeInfeasible) {
    try {
        (void)fit_relaxation_rates(6.3, 1e9, RFField{2000.0, 0.0, 0.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::Infeasible);
    }
}

TEST(Lifetimes, FitOfExactExponential) {
    std::vector<double> t, y;
    for (int k = 0; k < 10; ++k) {
        t.push_back(0.5 * k);
        y.push_back(3.0 * std::exp(-t.back() / 2.5));
    }
    EXPECT_NEAR(exponential_time_constant(t, y), 2.5, 1e-12);
    y.assign(10, 1.0);
    EXPECT_EQ(exponential_time_constant(t, y), std::numeric_limits<double>::infinity());
}
