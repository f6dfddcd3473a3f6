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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "darksim/error.hpp"
#include "darksim/metrics.hpp"
#include "darksim/pulses.hpp"
#include "oracles.hpp"

using namespace darksim;

namespace {

const SpinParams kMolecule{270.3, 4.1};

Op hermitian(std::mt19937_64& rng) { return Op(oracle::random_hermitian(4, rng)); }

// equilibrium after an ideal 90 degree y pulse on both spins
Op excited_equilibrium() {
    const Op r = hard_pulse_rotation(HardPulse{kTwoPi / 4.0, kTwoPi / 4.0});
    return r * equilibrium_deviation() * r.adjoint();
}

SpectrumResult spectrum_of(const Op& rho, const SpinParams& p, double broadening = 0.2) {
    const double dt = 1e-3;
    const auto fid = simulate_fid(rho, p, {}, dt, 20000, broadening);
    return spectrum_from_fid(fid, dt, 131072, broadening);
}

double naive_corr(const Op& a, const Op& b) {
    const Op da = a - a.trace() / 4.0 * Op::Identity();
    const Op db = b - b.trace() / 4.0 * Op::Identity();
    return (da * db).trace().real() / std::sqrt((da * da).trace().real() * (db * db).trace().real());
}

}  // namespace

TEST(Correlation, SelfAndScale) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10; ++i) {
        const Op x = hermitian(rng);
        EXPECT_NEAR(correlation(x, x), 1.0, 1e-12);
        EXPECT_NEAR(correlation(3.7 * x, x), 1.0, 1e-12);
        EXPECT_NEAR(correlation(x, 0.01 * x), 1.0, 1e-12);
        EXPECT_NEAR(correlation(-x, x), -1.0, 1e-12);
    }
}

TEST(Correlation, SingletVersusT0) {
    const auto st = singlet_triplet_states();
    const Op s = projector(st.s0), t = projector(st.t0);
    EXPECT_NEAR(correlation(s, t), -1.0 / 3.0, 1e-12);
    EXPECT_NEAR(correlation(singlet_deviation(), t - Op::Identity() / 4.0), -1.0 / 3.0, 1e-12);
}

TEST(Correlation, MatchesDirectTraceFormula) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10; ++i) {
        const Op a = hermitian(rng), b = hermitian(rng);
        EXPECT_NEAR(correlation(a, b), naive_corr(a, b), 1e-12);
        EXPECT_NEAR(correlation(a, b), correlation(b, a), 1e-14);
        const Op u = oracle::propagator_general(hermitian(rng), 0.37);
        EXPECT_NEAR(correlation(u * a * u.adjoint(), u * b * u.adjoint()), correlation(a, b), 1e-10);
        EXPECT_LE(std::abs(correlation(a, b)), 1.0);
    }
}

TEST(Correlation, ZeroDeviation) {
    try {
        (void)correlation(Op(Op::Identity()), singlet_deviation());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ZeroDeviation);
    }
}

TEST(Populations, Examples) {
    const auto eq = deviation_populations(equilibrium_deviation());
    EXPECT_NEAR(eq[0], 1.0, 1e-15);
    EXPECT_NEAR(eq[1], 0.0, 1e-15);
    EXPECT_NEAR(eq[2], 0.0, 1e-15);
    EXPECT_NEAR(eq[3], -1.0, 1e-15);
    const auto st = singlet_triplet_states();
    for (double v : deviation_populations(projector(st.s0) - projector(st.t0))) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Populations, PiProbeMovesPopulation) {
    const Op dev = projector(basis_ket(BasisState::s00)) - Op::Identity() / 4.0;
    const PulseSegment seg = gaussian_probe_segment(0.52, BasisState::s00, BasisState::s01, kMolecule, kTwoPi / 2.0);
    const Op out = to_interaction_frame(evolve_unitary(dev, segment_schedule(seg, kMolecule, 50e-6)), kMolecule, 0.52);
    const auto pop = deviation_populations(out);
    EXPECT_NEAR(pop[0] + pop[1] + pop[2] + pop[3], 0.0, 1e-10);
    EXPECT_LT(pop[0], -0.2);
    EXPECT_GT(pop[1], 0.7);
    // oracle: same evolution from the direct propagator product
    Op u = Op::Identity();
    for (const auto& sl : segment_schedule(seg, kMolecule, 50e-6)) u = oracle::propagator_general(sl.hamiltonian, sl.duration) * u;
    const Op ref = to_interaction_frame(u * dev * u.adjoint(), kMolecule, 0.52);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(pop[k], ref(k, k).real(), 1e-9);
}

TEST(Fid, MaximallyMixedIsSilent) {
    for (const cplx& s : simulate_fid(Op(Op::Identity() / 4.0), kMolecule, {}, 1e-3, 100, 0.5))
        EXPECT_EQ(std::abs(s), 0.0);
}

TEST(Fid, UncoupledTwoLines) {
    const SpinParams p{270.3, 0.0};
    const auto lines = find_lines(spectrum_of(excited_equilibrium(), p));
    ASSERT_GE(lines.size(), 2u);
    std::vector<double> f{lines[0].frequency, lines[1].frequency};
    std::sort(f.begin(), f.end());
    EXPECT_NEAR(f[0], -270.3 / 2.0, 0.01);
    EXPECT_NEAR(f[1], 270.3 / 2.0, 0.01);
    EXPECT_NEAR(lines[0].height, lines[1].height, 1e-3 * lines[0].height);
    if (lines.size() > 2) EXPECT_LT(lines[2].height, 0.1 * lines[1].height);
}

TEST(Fid, CoupledFourLines) {
    const auto lines = find_lines(spectrum_of(excited_equilibrium(), kMolecule), 0.2);
    ASSERT_EQ(lines.size(), 4u);
    std::vector<double> f;
    for (const auto& l : lines) f.push_back(l.frequency);
    std::sort(f.begin(), f.end());
    const auto want = oracle::AbSystem(270.3, 4.1).lines(270.3, 4.1);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(f[k], want[k], 0.01);
}

TEST(Fid, LinearInInitialState) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 3; ++i) {
        const Op a = hermitian(rng), b = hermitian(rng);
        const double x = 0.7, y = -1.3;
        const auto sa = spectrum_from_fid(simulate_fid(a, kMolecule, {}, 1e-3, 512, 0.5), 1e-3);
        const auto sb = spectrum_from_fid(simulate_fid(b, kMolecule, {}, 1e-3, 512, 0.5), 1e-3);
        const auto sc = spectrum_from_fid(simulate_fid(Op(x * a + y * b), kMolecule, {}, 1e-3, 512, 0.5), 1e-3);
        double scale = 0.0;
        for (const auto& v : sc.amplitude) scale = std::max(scale, std::abs(v));
        for (std::size_t k = 0; k < sc.amplitude.size(); ++k)
            EXPECT_NEAR(std::abs(sc.amplitude[k] - (x * sa.amplitude[k] + y * sb.amplitude[k])), 0.0, 1e-8 * scale);
    }
}

TEST(Spectrum, PureToneAndAxis) {
    const double dt = 1e-3, f0 = 123.4;
    const std::size_t n = 1000;
    std::vector<cplx> fid(n);
    for (std::size_t k = 0; k < n; ++k) fid[k] = std::polar(1.0, kTwoPi * f0 * k * dt);
    const auto s = spectrum_from_fid(fid, dt);
    ASSERT_EQ(s.frequency.size(), n);
    EXPECT_NEAR(s.frequency.front(), -500.0, 1e-9);
    EXPECT_NEAR(s.frequency[n / 2], 0.0, 1e-12);
    for (std::size_t k = 1; k < n; ++k) EXPECT_NEAR(s.frequency[k] - s.frequency[k - 1], 1.0, 1e-9);
    std::size_t best = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(s.amplitude[k]) > std::abs(s.amplitude[best])) best = k;
    EXPECT_NEAR(s.frequency[best], 123.0, 1e-9);
    // rectangular window: |X(f)| = |sin(pi n d)/sin(pi d)| with d = (f - f0) dt
    for (int off = -3; off <= 3; ++off) {
        const double d = (s.frequency[best + off] - f0) * dt;
        const double want = std::abs(std::sin(M_PI * n * d) / std::sin(M_PI * d));
        EXPECT_NEAR(std::abs(s.amplitude[best + off]), want, 1e-8 * n);
    }
}

TEST(Spectrum, Parseval) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    std::vector<cplx> fid(777);
    for (auto& v : fid) v = cplx(g(rng), g(rng));
    const auto s = spectrum_from_fid(fid, 1e-3);
    double e_t = 0.0, e_f = 0.0;
    for (const auto& v : fid) e_t += std::norm(v);
    for (const auto& v : s.amplitude) e_f += std::norm(v);
    EXPECT_NEAR(e_f / fid.size(), e_t, 1e-8 * e_t);
}

TEST(Spectrum, ProbeOnlyGivesOneDominantLine) {
    const PulseSegment seg = gaussian_probe_segment(0.52, BasisState::s00, BasisState::s01, kMolecule, kTwoPi / 4.0);
    const Op rho = evolve_unitary(equilibrium_deviation(), segment_schedule(seg, kMolecule, 50e-6));
    const auto lines = find_lines(spectrum_of(rho, kMolecule), 0.0);
    ASSERT_GE(lines.size(), 2u);
    EXPECT_GE(lines[0].height / lines[1].height, 10.0);
    const double want = transition_frequency(kMolecule, BasisState::s00, BasisState::s01);
    EXPECT_NEAR(std::abs(lines[0].frequency), std::abs(want), 0.01);
}

TEST(Spectrum, WriteHasHeaderAndColumns) {
    std::vector<cplx> fid(8, cplx(1.0, 0.0));
    const auto s = spectrum_from_fid(fid, 1e-3);
    std::ostringstream os;
    write_spectrum(os, s, true);
    std::istringstream is(os.str());
    std::string line;
    int comments = 0, rows = 0;
    while (std::getline(is, line)) {
        if (line.rfind('#', 0) == 0)
            ++comments;
        else
            ++rows;
    }
    EXPECT_GE(comments, 1);
    EXPECT_EQ(rows, 9);  // column header plus 8 bins
}

TEST(Measurement, PerturbationKeepsStructure) {
    std::mt19937_64 rng(4);
    const Op rho = singlet_deviation();
    const Op out = perturb_measurement(rho, 0.01, rng);
    EXPECT_LE((out - out.adjoint()).norm(), 1e-15);
    EXPECT_NEAR(std::abs(out.trace() - rho.trace()), 0.0, 1e-14);
    EXPECT_GT((out - rho).norm(), 0.0);
    EXPECT_LT((out - rho).norm(), 0.2);
}

TEST(Invariants, Report) {
    InvariantReport r;
    r.add(singlet_deviation(), spectral_norm(singlet_deviation()));
    EXPECT_TRUE(r.ok());
    Op bad = singlet_deviation();
    bad(0, 0) += 1e-3;
    r.add(bad, 1.0);
    EXPECT_FALSE(r.ok());
    EXPECT_NEAR(spectral_norm(Op(2.0 * spin_operators().ix1)), 1.0, 1e-12);
}
