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
#include <iosfwd>
#include <string>
#include <vector>

#include "darksim/dynamics.hpp"
#include "darksim/pulses.hpp"
#include "darksim/spinsys.hpp"

namespace darksim {

const char* version();

enum class Scenario { Lifetimes, Fig3a, Fig3b, Fig4a, Fig4b, Spectra, Optimize };
enum class InitialState { Prepared, Ideal };
enum class OffsetMode { Common, Probe, Symmetric };

struct RelaxationSection {
    bool auto_calibrate = true;
    double t1_target = 6.3;  // s
    double ts_target = 12.0;
    double flip_rate = 0.0;  // used when auto_calibrate = false
    double correlated_flip_rate = 0.0;
    double uncorrelated_dephasing_rate = 0.0;
    double correlated_dephasing_rate = 0.0;
    bool operator==(const RelaxationSection&) const = default;
};

struct NoiseSection {
    bool enabled = true;
    double rms_amplitude = 1.5;  // Hz
    double correlation_time = 0.05;
    double correlation_coefficient = 0.0;
    int trajectories = 500;
    bool operator==(const NoiseSection&) const = default;
};

struct PropagationSection {
    double dt = 50e-6;      // driven slices
    double dt_free = 1e-3;  // free evolution slices
    Method method = Method::Split;
    bool operator==(const PropagationSection&) const = default;
};

struct LockSection {
    double duration = 15.0;
    double amplitude = 2000.0;
    LockMode mode = LockMode::Waltz16;
    double rf_inhomogeneity = 0.05;  // relative Gaussian sigma of the lock amplitude over the sample
    int rf_points = 41;
    bool operator==(const LockSection&) const = default;
};

struct EitSection {
    double tone_amplitude = 7.0;  // Hz per tone
    double segment_duration = 0.240;
    double gap = 0.0;  // free evolution between repeated segments
    double sample_rate = 4000.0;
    DriveModel drive = DriveModel::Homonuclear;
    double monitor_duration = 3.0;
    double record_interval = 0.1;
    InitialState initial_state = InitialState::Prepared;
    bool operator==(const EitSection&) const = default;
};

struct Fig4aSection {
    double offset_min = -5.0;
    double offset_max = 5.0;
    double offset_step = 0.25;
    int repetitions = 1;
    OffsetMode offset_mode = OffsetMode::Probe;
    bool operator==(const Fig4aSection&) const = default;
};

struct Fig4bSection {
    double ratio_min = 0.0;
    double ratio_max = 2.0;
    double ratio_step = 0.05;
    int repetitions = 1;
    bool operator==(const Fig4bSection&) const = default;
};

struct SpectraSection {
    double dt = 1e-3;
    double acquisition = 20.0;
    int zero_fill = 131072;
    double broadening = 0.5;  // 1/s
    double probe_duration = 0.520;
    double window = 250.0;  // Hz, written range
    bool operator==(const SpectraSection&) const = default;
};

struct OptimizeSection {
    int segments = 6;
    double init_amplitude = 3.5;
    int budget = 5000;
    double w_dark = 0.7;
    double sample_rate = 3000.0;
    std::string pulse_out;
    std::string history_out;
    bool operator==(const OptimizeSection&) const = default;
};

struct ExperimentConfig {
    Scenario scenario = Scenario::Fig3a;
    std::uint64_t seed = 7;
    std::string output;
    SpinParams spin{};
    RelaxationSection relaxation{};
    NoiseSection noise{};
    PropagationSection propagation{};
    LockSection lock{};
    EitSection eit{};
    Fig4aSection fig4a{};
    Fig4bSection fig4b{};
    SpectraSection spectra{};
    OptimizeSection optimize{};

    // throws InvalidValue naming the offending key
    void validate() const;
    bool operator==(const ExperimentConfig& o) const;
};

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& name);

// Sectioned key = value text. '#' starts a comment.
ExperimentConfig parse_config(const std::string& text);
// Same, but 'scenario' may be omitted and defaults to fallback.
ExperimentConfig parse_config(const std::string& text, Scenario fallback);
ExperimentConfig load_config(const std::string& path);
std::string emit_config(const ExperimentConfig& cfg);
void apply_override(ExperimentConfig& cfg, const std::string& assignment);
std::vector<std::string> config_keys();

struct ResultSeries {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> metadata;  // written as '# ' lines

    void validate() const;
};

void write_csv(const ResultSeries& rs, std::ostream& os);
void write_csv(const ResultSeries& rs, const std::string& path);

// Resolved relaxation: calibrated or manual rates.
RelaxationModel resolve_relaxation(const ExperimentConfig& cfg);
// Singlet deviation after prep + lock, or the exact one for initial_state = ideal.
Op eit_initial_state(const ExperimentConfig& cfg, const RelaxationModel& model);

ResultSeries run_scenario(const ExperimentConfig& cfg);

}  // namespace darksim
