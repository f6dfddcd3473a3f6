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

#include <iosfwd>
#include <variant>
#include <vector>

#include "darksim/dynamics.hpp"
#include "darksim/spinsys.hpp"

namespace darksim {

struct EnvelopeSample {
    double amplitude;  // Hz
    double phase;      // rad
};

// Uniformly sampled, piecewise-constant envelope on both spins. Within sample k the field is
// amplitude_k * [cos(a) Ix + sin(a) Iy] with a = 2*pi*carrier_offset*(time_origin + t) + phase_k.
struct PulseSegment {
    double duration = 0.0;
    std::vector<EnvelopeSample> envelope;
    double carrier_offset = 0.0;
    double time_origin = 0.0;  // phase clock of the segment start

    void validate() const;
    double sample_period() const { return duration / static_cast<double>(envelope.size()); }
    Op field_at(double t_local) const;  // RF part only, Hz
};

struct Delay {
    double duration = 0.0;
};

enum class LockMode { IdealEquivalence, Cw, Waltz16 };

struct SpinLock {
    double duration = 0.0;
    double amplitude = 2000.0;
    LockMode mode = LockMode::Waltz16;
};

// Ideal rotation of both spins about an axis in the xy plane. amplitude = 0 means
// instantaneous; otherwise a rectangular pulse of angle / (2*pi*amplitude) seconds.
struct HardPulse {
    double angle = 0.0;  // rad
    double phase = 0.0;  // rad, 0 = x, pi/2 = y
    double amplitude = 0.0;
};

using SequenceItem = std::variant<PulseSegment, Delay, SpinLock, HardPulse>;

struct Sequence {
    std::vector<SequenceItem> items;
    double duration() const;
};

// --- preparation ---

// 90x - echo - 180y - (echo + conversion) - 90y - final
struct PrepDelays {
    double echo = 0.0;
    double conversion = 0.0;
    double final_delay = 0.0;
    double objective = 0.0;  // |<S0|U|00>|^2 + |<T0|U|11>|^2
};

double prep_objective(const SpinParams& p, const PrepDelays& d);
PrepDelays find_prep_delays(const SpinParams& p);
Sequence prep_sequence(const PrepDelays& d);
Sequence singlet_prep_sequence(const SpinParams& p);

// --- building blocks ---

SequenceItem spin_lock_segment(double duration, double amplitude, LockMode mode);

// One WALTZ-16 cycle element list: (multiple of 90 degrees, +1 for x / -1 for -x).
std::vector<std::pair<int, int>> waltz16_supercycle();

PulseSegment gaussian_probe_segment(double duration, BasisState level_a, BasisState level_b, const SpinParams& p,
                                    double flip_area, int n_samples = 1040);

struct TwoToneSpec {
    double duration = 0.240;
    double probe_amp = 3.5;  // Hz
    double control_amp = 3.5;
    double probe_offset = 0.0;  // Hz, absolute field offset
    double control_offset = 0.0;
    double probe_phase = 0.0;
    double control_phase = 0.0;
    double sample_rate = 4000.0;  // Hz
    double time_origin = 0.0;
};

// Probe on |00> <-> |01>, control on |00> <-> |10>, at the exact resonance offsets.
TwoToneSpec resonant_two_tone(const SpinParams& p, double probe_amp, double control_amp, double duration = 0.240);

PulseSegment two_tone_segment(const TwoToneSpec& spec);
PulseSegment two_tone_segment(double duration, double probe_amp, double control_amp, double probe_offset,
                              double control_offset);

enum class DriveModel {
    Homonuclear,  // every tone acts on both spins (physical)
    Selective,    // each tone acts only on its addressed transition
};

// Slices aligned to envelope samples, each no longer than max_dt; amplitudes scaled by rf_scale.
Schedule segment_schedule(const PulseSegment& seg, const SpinParams& p, double max_dt, double rf_scale = 1.0);
Schedule two_tone_schedule(const TwoToneSpec& spec, const SpinParams& p, double max_dt,
                           DriveModel drive = DriveModel::Homonuclear, double rf_scale = 1.0);

// Ideal propagator (no relaxation) of a sequence.
Op sequence_propagator(const Sequence& seq, const SpinParams& p, double max_dt = 50e-6);

// Dissipative propagation of a sequence; constant spans use one slice exponential raised to a power.
Op apply_sequence(const Op& rho, const Sequence& seq, const SpinParams& p, const RelaxationModel& model,
                  double max_dt = 50e-6);

Op hard_pulse_rotation(const HardPulse& pulse);

// Plain-text table: one metadata line, one column header, then time_s,amplitude_Hz,phase_rad,offset_Hz.
void write_pulse_table(std::ostream& os, const PulseSegment& seg);
PulseSegment read_pulse_table(std::istream& is);

}  // namespace darksim
