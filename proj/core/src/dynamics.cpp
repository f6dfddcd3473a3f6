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

#include "darksim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "darksim/parallel.hpp"

namespace darksim {

bool RelaxationModel::is_zero() const {
    return flip_rate == 0.0 && correlated_flip_rate == 0.0 && uncorrelated_dephasing_rate == 0.0 &&
           correlated_dephasing_rate == 0.0;
}

double RelaxationModel::max_rate() const {
    return std::max({flip_rate, correlated_flip_rate, uncorrelated_dephasing_rate, correlated_dephasing_rate});
}

void RelaxationModel::validate() const {
    if (!(flip_rate >= 0.0) || !(correlated_flip_rate >= 0.0) || !(uncorrelated_dephasing_rate >= 0.0) ||
        !(correlated_dephasing_rate >= 0.0))
        throw Error(Errc::InvalidValue, "relaxation rates must be non-negative");
}

void NoiseProcess::validate() const {
    if (!(rms_amplitude >= 0.0)) throw Error(Errc::InvalidValue, "noise rms_amplitude must be >= 0");
    if (!(correlation_time > 0.0)) throw Error(Errc::InvalidValue, "noise correlation_time must be > 0");
    if (!(std::abs(correlation_coefficient) <= 1.0))
        throw Error(Errc::InvalidValue, "noise correlation_coefficient must lie in [-1, 1]");
}

void PropagationConfig::validate() const {
    if (!(dt > 0.0)) throw Error(Errc::InvalidValue, "propagation dt must be > 0");
    if (n_trajectories < 1) throw Error(Errc::InvalidValue, "n_trajectories must be >= 1");
    if (record_stride < 0) throw Error(Errc::InvalidValue, "record_stride must be >= 0");
}

Schedule sample_schedule(const HamiltonianFn& h_at, double t0, double t1, double dt) {
    if (t1 < t0) throw Error(Errc::InvalidValue, "sample_schedule: t1 < t0");
    if (!(dt > 0.0)) throw Error(Errc::InvalidValue, "sample_schedule: dt must be > 0");
    Schedule s;
    const double span = t1 - t0;
    if (span == 0.0) return s;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
    const double d = span / static_cast<double>(n);
    s.reserve(n);
    for (std::size_t k = 0; k < n; ++k) s.push_back({d, h_at(t0 + (static_cast<double>(k) + 0.5) * d)});
    return s;
}

std::vector<Op> jump_operators(const RelaxationModel& model) {
    const auto& o = spin_operators();
    std::vector<Op> out;
    if (model.flip_rate > 0.0) {
        const double r = std::sqrt(model.flip_rate);
        for (const Op* a : {&o.ip1, &o.im1, &o.ip2, &o.im2}) out.push_back(r * *a);
    }
    if (model.correlated_flip_rate > 0.0) {
        const double r = std::sqrt(model.correlated_flip_rate);
        out.push_back(r * (o.ip1 + o.ip2));
        out.push_back(r * (o.im1 + o.im2));
    }
    if (model.uncorrelated_dephasing_rate > 0.0) {
        const double r = std::sqrt(model.uncorrelated_dephasing_rate);
        out.push_back(r * o.iz1);
        out.push_back(r * o.iz2);
    }
    if (model.correlated_dephasing_rate > 0.0) out.push_back(std::sqrt(model.correlated_dephasing_rate) * o.iz);
    return out;
}

namespace {

Super dissipator(const RelaxationModel& model) {
    Super g = Super::Zero();
    for (const Op& a : jump_operators(model)) {
        const Op ada = a.adjoint() * a;
        g += left_mult(a) * right_mult(a.adjoint()) - 0.5 * left_mult(ada) - 0.5 * right_mult(ada);
    }
    return g;
}

Super commutator_generator(const Op& h) {
    const cplx mi2pi(0.0, -kTwoPi);
    return mi2pi * (left_mult(h) - right_mult(h));
}

void z_kick(Op& rho, double f1, double f2, double duration) {
    const cplx a = std::polar(1.0, -0.5 * kTwoPi * duration * f1);
    const cplx b = std::polar(1.0, -0.5 * kTwoPi * duration * f2);
    const std::array<cplx, 4> ph{a * b, a * std::conj(b), std::conj(a) * b, std::conj(a * b)};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rho(i, j) *= ph[i] * std::conj(ph[j]);
}

Op z_field(double f1, double f2) {
    const auto& o = spin_operators();
    return f1 * o.iz1 + f2 * o.iz2;
}

SuperVec rk4_step(const Super& g0, const Super& gm, const Super& g1, const SuperVec& v, double d) {
    const SuperVec k1 = g0 * v;
    const SuperVec k2 = gm * (v + 0.5 * d * k1);
    const SuperVec k3 = gm * (v + 0.5 * d * k2);
    const SuperVec k4 = g1 * (v + d * k3);
    return v + (d / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool same_slice(const Slice& a, const Slice& b) { return a.duration == b.duration && a.hamiltonian == b.hamiltonian; }

void record(Evolution& ev, const Op& rho, std::size_t done, int stride) {
    if (stride > 0 && done % static_cast<std::size_t>(stride) == 0) ev.samples.push_back(rho);
}

// One noise-free or noisy trajectory over a schedule.
// The split method groups slices into blocks of about 1 ms and wraps each block in half steps of
// the dissipator (Strang splitting); inside a block every slice is kick(d/2) U kick(d/2).
struct TrajectoryKernel {
    const Schedule& schedule;
    const RelaxationModel& model;
    Method method;
    int stride;
    std::vector<Op> unitaries;
    std::vector<std::size_t> block_end;
    std::vector<const Super*> block_half;
    std::map<double, Super> half_dissipators;
    bool dissipative = false;
    Super diss_generator = Super::Zero();

    static constexpr double kBlock = 1e-3;

    TrajectoryKernel(const Schedule& s, const RelaxationModel& m, Method meth, int rec)
        : schedule(s), model(m), method(meth), stride(rec) {
        dissipative = !model.is_zero();
        if (dissipative) diss_generator = dissipator(model);
        if (method != Method::Split) return;
        unitaries.resize(schedule.size());
        for (std::size_t k = 0; k < schedule.size(); ++k) {
            if (k > 0 && same_slice(schedule[k], schedule[k - 1]))
                unitaries[k] = unitaries[k - 1];
            else
                unitaries[k] = mat_exp_hermitian(schedule[k].hamiltonian, kTwoPi * schedule[k].duration);
        }
        std::vector<double> block_len;
        std::size_t a = 0;
        while (a < schedule.size()) {
            std::size_t b = a;
            double len = 0.0;
            do {
                len += schedule[b].duration;
                ++b;
            } while (b < schedule.size() && len + schedule[b].duration <= kBlock * (1.0 + 1e-9) &&
                     !(stride > 0 && b % static_cast<std::size_t>(stride) == 0));
            block_end.push_back(b);
            block_len.push_back(len);
            a = b;
        }
        if (dissipative) {
            for (double len : block_len)
                if (!half_dissipators.count(len)) half_dissipators.emplace(len, expm(0.5 * len * diss_generator));
            for (double len : block_len) block_half.push_back(&half_dissipators.at(len));
        }
    }

    Evolution run(const Op& rho0, OrnsteinUhlenbeckPair* ou) const {
        return method == Method::Split ? run_split(rho0, ou) : run_sliced(rho0, ou);
    }

    Evolution run_split(const Op& rho0, OrnsteinUhlenbeckPair* ou) const {
        Evolution ev;
        Op rho = rho0;
        record(ev, rho, 0, stride);
        std::size_t k = 0;
        for (std::size_t blk = 0; blk < block_end.size(); ++blk) {
            if (dissipative) rho = apply_superoperator(*block_half[blk], rho);
            for (; k < block_end[blk]; ++k) {
                const double d = schedule[k].duration;
                if (ou) {
                    const double f1 = ou->field1(), f2 = ou->field2();
                    z_kick(rho, f1, f2, 0.5 * d);
                    rho = unitaries[k] * rho * unitaries[k].adjoint();
                    z_kick(rho, f1, f2, 0.5 * d);
                    ou->advance(d);
                } else {
                    rho = unitaries[k] * rho * unitaries[k].adjoint();
                }
                if (k + 1 < block_end[blk]) record(ev, rho, k + 1, stride);
            }
            if (dissipative) rho = apply_superoperator(*block_half[blk], rho);
            record(ev, rho, k, stride);
        }
        ev.final_state = rho;
        return ev;
    }

    Evolution run_sliced(const Op& rho0, OrnsteinUhlenbeckPair* ou) const {
        Evolution ev;
        Op rho = rho0;
        record(ev, rho, 0, stride);
        Super cached;
        bool have_cache = false;
        for (std::size_t k = 0; k < schedule.size(); ++k) {
            const Slice& sl = schedule[k];
            const double d = sl.duration;
            const double f1 = ou ? ou->field1() : 0.0;
            const double f2 = ou ? ou->field2() : 0.0;
            if (method == Method::ExactSlice) {
                if (ou) {
                    rho = apply_superoperator(slice_superoperator(sl.hamiltonian + z_field(f1, f2), model, d), rho);
                } else {
                    if (!have_cache || !same_slice(sl, schedule[k - 1])) {
                        cached = slice_superoperator(sl.hamiltonian, model, d);
                        have_cache = true;
                    }
                    rho = apply_superoperator(cached, rho);
                }
            } else {
                const Op h = ou ? Op(sl.hamiltonian + z_field(f1, f2)) : sl.hamiltonian;
                const Super g = commutator_generator(h) + diss_generator;
                rho = unvec(rk4_step(g, g, g, vec(rho), d));
            }
            if (ou) ou->advance(d);
            record(ev, rho, k + 1, stride);
        }
        ev.final_state = rho;
        return ev;
    }
};

}  // namespace

Super lindblad_superoperator(const Op& h, const RelaxationModel& model) {
    if (!is_hermitian(h)) throw Error(Errc::NotHermitian, "lindblad_superoperator: Hamiltonian is not Hermitian");
    model.validate();
    return commutator_generator(h) + dissipator(model);
}

double field_amplitude(const Op& h) {
    static const std::array<int, 4> m{1, 0, 0, -1};
    double sum = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (m[i] != m[j]) sum += std::norm(h(i, j));
    return std::sqrt(sum / 2.0);
}

void check_slicing(const Schedule& schedule, const RelaxationModel& model) {
    const double rate = model.max_rate();
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const double x = schedule[k].duration * (rate + field_amplitude(schedule[k].hamiltonian));
        if (x > 0.1 + 1e-12)
            throw Error(Errc::StepTooLarge, "slice " + std::to_string(k) + " has dt*(rate + field) = " +
                                                std::to_string(x) + " > 0.1");
    }
}

Super slice_superoperator(const Op& h, const RelaxationModel& model, double duration) {
    return expm(duration * lindblad_superoperator(h, model));
}

Super schedule_superoperator(const Schedule& schedule, const RelaxationModel& model) {
    check_slicing(schedule, model);
    Super total = Super::Identity();
    Super cached;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        if (k == 0 || !same_slice(schedule[k], schedule[k - 1]))
            cached = slice_superoperator(schedule[k].hamiltonian, model, schedule[k].duration);
        total = cached * total;
    }
    return total;
}

Op schedule_unitary(const Schedule& schedule) {
    Op u = Op::Identity();
    for (const auto& s : schedule) u = mat_exp_hermitian(s.hamiltonian, kTwoPi * s.duration) * u;
    return u;
}

Op apply_superoperator(const Super& s, const Op& rho) { return unvec(s * vec(rho)); }

Op evolve_unitary(const Op& rho, const Schedule& schedule) {
    Op out = rho;
    for (const auto& s : schedule) {
        const Op u = mat_exp_hermitian(s.hamiltonian, kTwoPi * s.duration);
        out = u * out * u.adjoint();
    }
    return out;
}

Op evolve_unitary(const Op& rho, const HamiltonianFn& h_at, double t0, double t1, const PropagationConfig& cfg) {
    cfg.validate();
    return evolve_unitary(rho, sample_schedule(h_at, t0, t1, cfg.dt));
}

Evolution evolve_lindblad(const Op& rho, const Schedule& schedule, const RelaxationModel& model,
                          const PropagationConfig& cfg) {
    cfg.validate();
    model.validate();
    check_slicing(schedule, model);
    TrajectoryKernel kernel(schedule, model, cfg.method, cfg.record_stride);
    return kernel.run(rho, nullptr);
}

Evolution evolve_lindblad(const Op& rho, const HamiltonianFn& h_at, const RelaxationModel& model, double t0,
                          double t1, const PropagationConfig& cfg) {
    cfg.validate();
    if (cfg.method != Method::Rk4) return evolve_lindblad(rho, sample_schedule(h_at, t0, t1, cfg.dt), model, cfg);

    // rk4 samples the Hamiltonian at slice start, middle and end
    model.validate();
    const Schedule s = sample_schedule(h_at, t0, t1, cfg.dt);
    check_slicing(s, model);
    const Super diss = dissipator(model);
    Evolution ev;
    SuperVec v = vec(rho);
    record(ev, rho, 0, cfg.record_stride);
    double t = t0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double d = s[k].duration;
        const Super g0 = commutator_generator(h_at(t)) + diss;
        const Super gm = commutator_generator(s[k].hamiltonian) + diss;
        const Super g1 = commutator_generator(h_at(t + d)) + diss;
        v = rk4_step(g0, gm, g1, v, d);
        t = t0 + static_cast<double>(k + 1) * d;
        record(ev, unvec(v), k + 1, cfg.record_stride);
    }
    ev.final_state = unvec(v);
    return ev;
}

OrnsteinUhlenbeckPair::OrnsteinUhlenbeckPair(const NoiseProcess& noise, std::uint64_t trajectory) : noise_(noise) {
    std::seed_seq seq{static_cast<std::uint32_t>(noise.seed), static_cast<std::uint32_t>(noise.seed >> 32),
                      static_cast<std::uint32_t>(trajectory), static_cast<std::uint32_t>(trajectory >> 32)};
    rng_.seed(seq);
    u1_ = gauss_(rng_);
    u2_ = gauss_(rng_);
}

double OrnsteinUhlenbeckPair::field2() const {
    const double c = noise_.correlation_coefficient;
    return noise_.rms_amplitude * (c * u1_ + std::sqrt(std::max(0.0, 1.0 - c * c)) * u2_);
}

void OrnsteinUhlenbeckPair::advance(double dt) {
    const double a = std::exp(-dt / noise_.correlation_time);
    const double b = std::sqrt(std::max(0.0, 1.0 - a * a));
    u1_ = a * u1_ + b * gauss_(rng_);
    u2_ = a * u2_ + b * gauss_(rng_);
}

Evolution evolve_stochastic_avg(const Op& rho, const Schedule& schedule, const RelaxationModel& model,
                                const NoiseProcess& noise, const PropagationConfig& cfg) {
    noise.validate();
    if (noise.rms_amplitude == 0.0) return evolve_lindblad(rho, schedule, model, cfg);
    cfg.validate();
    model.validate();
    check_slicing(schedule, model);

    const TrajectoryKernel kernel(schedule, model, cfg.method, cfg.record_stride);
    const auto n = static_cast<std::size_t>(cfg.n_trajectories);
    std::vector<Evolution> runs(n);
    parallel_for(n, [&](std::size_t i) {
        OrnsteinUhlenbeckPair ou(noise, i);
        runs[i] = kernel.run(rho, &ou);
    });

    Evolution mean;
    std::vector<Op> terms(n);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) terms[i] = runs[i].final_state;
    mean.final_state = inv * pairwise_sum(terms);
    const std::size_t n_rec = runs[0].samples.size();
    mean.samples.resize(n_rec);
    for (std::size_t r = 0; r < n_rec; ++r) {
        for (std::size_t i = 0; i < n; ++i) terms[i] = runs[i].samples[r];
        mean.samples[r] = inv * pairwise_sum(terms);
    }
    return mean;
}

Evolution evolve_stochastic_avg(const Op& rho, const HamiltonianFn& h_at, const RelaxationModel& model,
                                const NoiseProcess& noise, double t0, double t1, const PropagationConfig& cfg) {
    cfg.validate();
    return evolve_stochastic_avg(rho, sample_schedule(h_at, t0, t1, cfg.dt), model, noise, cfg);
}

}  // namespace darksim
