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

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "darksim/numlin.hpp"
#include "darksim/spinsys.hpp"

namespace darksim {

struct RelaxationModel {
    double flip_rate = 0.0;                    // 1/s, sqrt(k) I+^i, sqrt(k) I-^i on each spin
    double correlated_flip_rate = 0.0;         // 1/s, sqrt(k)(I+^1 + I+^2), sqrt(k)(I-^1 + I-^2)
    double uncorrelated_dephasing_rate = 0.0;  // 1/s, sqrt(k) Iz^i on each spin
    double correlated_dephasing_rate = 0.0;    // 1/s, sqrt(k)(Iz^1 + Iz^2)

    bool is_zero() const;
    double max_rate() const;
    void validate() const;
};

struct NoiseProcess {
    double rms_amplitude = 0.0;            // Hz
    double correlation_time = 0.05;        // s
    double correlation_coefficient = 0.0;  // between the two spins
    std::uint64_t seed = 0;

    void validate() const;
};

enum class Method { ExactSlice, Rk4, Split };

struct PropagationConfig {
    double dt = 50e-6;  // s, upper bound on slice length
    Method method = Method::ExactSlice;
    int n_trajectories = 1;
    int record_stride = 0;  // record every n slices; 0 disables recording

    void validate() const;
};

using HamiltonianFn = std::function<Op(double)>;

// Piecewise-constant Hamiltonian slice.
struct Slice {
    double duration;
    Op hamiltonian;
};
using Schedule = std::vector<Slice>;

// Midpoint sampling into equal slices no longer than dt.
Schedule sample_schedule(const HamiltonianFn& h_at, double t0, double t1, double dt);

struct Evolution {
    Op final_state;
    std::vector<Op> samples;  // initial state, then every record_stride slices
};

std::vector<Op> jump_operators(const RelaxationModel& model);
Super lindblad_superoperator(const Op& h, const RelaxationModel& model);

// Transverse (total-Iz off-block) field strength of h, Hz. Equals nu for nu*Ix.
double field_amplitude(const Op& h);

// StepTooLarge unless duration*(max rate + field amplitude) <= 0.1 for every slice.
void check_slicing(const Schedule& schedule, const RelaxationModel& model);

// exp(duration * generator) of one constant slice.
Super slice_superoperator(const Op& h, const RelaxationModel& model, double duration);
// Ordered product over a schedule (first slice acts first). Checks slicing.
Super schedule_superoperator(const Schedule& schedule, const RelaxationModel& model);
Op schedule_unitary(const Schedule& schedule);

Op apply_superoperator(const Super& s, const Op& rho);

Op evolve_unitary(const Op& rho, const HamiltonianFn& h_at, double t0, double t1, const PropagationConfig& cfg);
Op evolve_unitary(const Op& rho, const Schedule& schedule);

Evolution evolve_lindblad(const Op& rho, const HamiltonianFn& h_at, const RelaxationModel& model, double t0,
                          double t1, const PropagationConfig& cfg);
Evolution evolve_lindblad(const Op& rho, const Schedule& schedule, const RelaxationModel& model,
                          const PropagationConfig& cfg);

Evolution evolve_stochastic_avg(const Op& rho, const HamiltonianFn& h_at, const RelaxationModel& model,
                                const NoiseProcess& noise, double t0, double t1, const PropagationConfig& cfg);
Evolution evolve_stochastic_avg(const Op& rho, const Schedule& schedule, const RelaxationModel& model,
                                const NoiseProcess& noise, const PropagationConfig& cfg);

// Pair of unit Ornstein-Uhlenbeck processes mixed into two local z-fields (Hz).
class OrnsteinUhlenbeckPair {
public:
    OrnsteinUhlenbeckPair(const NoiseProcess& noise, std::uint64_t trajectory);
    double field1() const { return noise_.rms_amplitude * u1_; }
    double field2() const;
    void advance(double dt);

private:
    NoiseProcess noise_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> gauss_;
    double u1_ = 0.0, u2_ = 0.0;
};

// --- lifetime calibration ---

struct LifetimeProtocol {
    double t1_window = 10.0;  // s
    double ts_window = 20.0;  // s
    int samples = 25;
};

// Log-linear least-squares time constant of a decaying positive signal.
double exponential_time_constant(const std::vector<double>& t, const std::vector<double>& y);

double measure_t1(const RelaxationModel& model, const SpinParams& p, const LifetimeProtocol& protocol = {});
double measure_ts(const RelaxationModel& model, const SpinParams& p, const RFField& lock_field,
                  const LifetimeProtocol& protocol = {});

struct FitOptions {
    SpinParams spin{};
    LifetimeProtocol protocol{};
    bool allow_correlated_flips = true;
    double uncorrelated_dephasing_rate = 0.0;
    double correlated_dephasing_rate = 0.0;
};

RelaxationModel fit_relaxation_rates(double t1_target, double ts_target, const RFField& lock_field,
                                     const FitOptions& options = {});

}  // namespace darksim
