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
#include <utility>
#include <vector>

#include "darksim/pulses.hpp"
#include "darksim/spinsys.hpp"

namespace darksim {

// One two-tone segment: both tones share amplitude, phase and a common offset from their
// transitions (probe on |00>-|01>, control on |00>-|10>).
struct SegmentParams {
    double duration;   // s, renormalized so the segments fill total_duration
    double amplitude;  // Hz per tone
    double phase;      // rad
    double offset;     // Hz
};

struct ParamBounds {
    double duration_min = 0.005, duration_max = 0.120;
    double amplitude_min = 0.0, amplitude_max = 12.0;
    double offset_min = -3.0, offset_max = 3.0;
};

struct PulseParameterization {
    std::vector<SegmentParams> segments;
    ParamBounds bounds{};
    double total_duration = 0.240;
    double sample_rate = 3000.0;  // Hz, envelope sampling for fidelity evaluation

    void validate() const;
    // Segment durations after renormalization to total_duration.
    std::vector<double> durations() const;
};

PulseParameterization naive_two_tone(int n_segments = 6, double amplitude = 3.5, double total = 0.240);

struct RFDistribution {
    std::vector<std::pair<double, double>> points;  // (scale, weight)

    void validate() const;
    static RFDistribution default_grid();
    static RFDistribution single(double scale);
};

struct ObjectiveSpec {
    Ket dark_state;
    Ket spectator;
    double w_dark = 0.7;
    double w_spectator = 0.3;

    void validate() const;
    static ObjectiveSpec default_spec();
};

// Interaction-frame propagator of the pulse with every amplitude multiplied by scale.
Op pulse_propagator(const PulseParameterization& params, double scale, const SpinParams& p);

double pulse_fidelity(const PulseParameterization& params, double scale, const ObjectiveSpec& spec,
                      const SpinParams& p);
double average_fidelity(const PulseParameterization& params, const RFDistribution& dist, const ObjectiveSpec& spec,
                        const SpinParams& p);
double worst_case_fidelity(const PulseParameterization& params, const RFDistribution& dist,
                           const ObjectiveSpec& spec, const SpinParams& p);

struct OptimizationResult {
    PulseParameterization best;
    double best_objective = 0.0;
    std::vector<double> history;  // best-so-far average fidelity after each evaluation
    int evaluations = 0;
};

OptimizationResult optimize_pulse(const PulseParameterization& init, const RFDistribution& dist,
                                  const ObjectiveSpec& spec, const SpinParams& p, int budget);

// Concatenated two-tone segments as one exportable pulse.
PulseSegment to_pulse_segment(const PulseParameterization& params, const SpinParams& p);

void write_history_csv(std::ostream& os, const std::vector<double>& history);

}  // namespace darksim
