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

#include "darksim/optctrl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "simplex.hpp"

namespace darksim {

void PulseParameterization::validate() const {
    if (segments.empty()) throw Error(Errc::InvalidValue, "pulse parameterization needs at least one segment");
    if (!(total_duration > 0.0)) throw Error(Errc::InvalidValue, "total_duration must be > 0");
    if (!(sample_rate > 0.0)) throw Error(Errc::InvalidValue, "sample_rate must be > 0");
    for (const auto& s : segments) {
        if (!(s.duration > 0.0)) throw Error(Errc::InvalidValue, "segment durations must be > 0");
        if (!(s.amplitude >= 0.0)) throw Error(Errc::InvalidValue, "segment amplitudes must be >= 0");
        if (s.duration < bounds.duration_min || s.duration > bounds.duration_max)
            throw Error(Errc::InvalidValue, "segment duration outside bounds");
        if (s.amplitude < bounds.amplitude_min || s.amplitude > bounds.amplitude_max)
            throw Error(Errc::InvalidValue, "segment amplitude outside bounds");
        if (s.offset < bounds.offset_min || s.offset > bounds.offset_max)
            throw Error(Errc::InvalidValue, "segment offset outside bounds");
    }
}

std::vector<double> PulseParameterization::durations() const {
    double sum = 0.0;
    for (const auto& s : segments) sum += s.duration;
    std::vector<double> d;
    for (const auto& s : segments) d.push_back(s.duration * total_duration / sum);
    return d;
}

PulseParameterization naive_two_tone(int n_segments, double amplitude, double total) {
    PulseParameterization p;
    p.total_duration = total;
    for (int i = 0; i < n_segments; ++i) p.segments.push_back({total / n_segments, amplitude, 0.0, 0.0});
    return p;
}

void RFDistribution::validate() const {
    if (points.empty()) throw Error(Errc::InvalidValue, "RF distribution is empty");
    double sum = 0.0;
    for (const auto& [s, w] : points) {
        if (!(s > 0.0)) throw Error(Errc::InvalidValue, "RF scale factors must be > 0");
        if (!(w >= 0.0)) throw Error(Errc::InvalidValue, "RF weights must be >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error(Errc::InvalidValue, "RF weights must sum to 1");
}

RFDistribution RFDistribution::default_grid() {
    return {{{0.90, 0.1}, {0.95, 0.2}, {1.00, 0.4}, {1.05, 0.2}, {1.10, 0.1}}};
}

RFDistribution RFDistribution::single(double scale) { return {{{scale, 1.0}}}; }

void ObjectiveSpec::validate() const {
    if (std::abs(dark_state.norm() - 1.0) > 1e-12 || std::abs(spectator.norm() - 1.0) > 1e-12)
        throw Error(Errc::InvalidValue, "objective states must be normalized");
    if (!(w_dark >= 0.0) || !(w_spectator >= 0.0) || std::abs(w_dark + w_spectator - 1.0) > 1e-12)
        throw Error(Errc::InvalidValue, "objective weights must be non-negative and sum to 1");
}

ObjectiveSpec ObjectiveSpec::default_spec() {
    ObjectiveSpec s;
    s.dark_state = singlet_triplet_states().s0;
    s.spectator = basis_ket(BasisState::s11);
    return s;
}

namespace {

struct ToneOffsets {
    double probe, control;
};

ToneOffsets tone_offsets(const SpinParams& p) {
    return {resonance_offset(p, BasisState::s00, BasisState::s01), resonance_offset(p, BasisState::s00, BasisState::s10)};
}

// Piecewise-constant samples (duration, complex field) of the whole pulse; each segment is cut
// into round(d * rate) equal samples, phases run on one continuous clock.
struct FieldSample {
    double duration;
    cplx field;
};

std::vector<FieldSample> field_samples(const PulseParameterization& params, const ToneOffsets& f) {
    std::vector<FieldSample> out;
    const auto d = params.durations();
    double t0 = 0.0;
    for (std::size_t i = 0; i < params.segments.size(); ++i) {
        const auto& s = params.segments[i];
        const auto n = static_cast<std::size_t>(std::max(1.0, std::round(d[i] * params.sample_rate)));
        const double ds = d[i] / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = t0 + (static_cast<double>(k) + 0.5) * ds;
            const cplx z = s.amplitude * (std::polar(1.0, kTwoPi * (f.probe + s.offset) * t + s.phase) +
                                          std::polar(1.0, kTwoPi * (f.control + s.offset) * t + s.phase));
            out.push_back({ds, z});
        }
        t0 += d[i];
    }
    return out;
}

}  // namespace

Op pulse_propagator(const PulseParameterization& params, double scale, const SpinParams& p) {
    params.validate();
    const auto& o = spin_operators();
    const Op hint = internal_hamiltonian(p);
    Op u = Op::Identity();
    for (const auto& fs : field_samples(params, tone_offsets(p))) {
        const cplx z = scale * fs.field;
        u = mat_exp_hermitian(Op(hint + z.real() * o.ix + z.imag() * o.iy), kTwoPi * fs.duration) * u;
    }
    return internal_propagator(p, params.total_duration).adjoint() * u;
}

double pulse_fidelity(const PulseParameterization& params, double scale, const ObjectiveSpec& spec,
                      const SpinParams& p) {
    spec.validate();
    const Op u = pulse_propagator(params, scale, p);
    const double fd = std::norm((spec.dark_state.adjoint() * u * spec.dark_state)(0));
    const double fs = std::norm((spec.spectator.adjoint() * u * spec.spectator)(0));
    return std::clamp(spec.w_dark * fd + spec.w_spectator * fs, 0.0, 1.0);
}

double average_fidelity(const PulseParameterization& params, const RFDistribution& dist, const ObjectiveSpec& spec,
                        const SpinParams& p) {
    dist.validate();
    double sum = 0.0;
    for (const auto& [s, w] : dist.points) sum += w * pulse_fidelity(params, s, spec, p);
    return sum;
}

double worst_case_fidelity(const PulseParameterization& params, const RFDistribution& dist,
                           const ObjectiveSpec& spec, const SpinParams& p) {
    dist.validate();
    double worst = 1.0;
    for (const auto& [s, w] : dist.points) worst = std::min(worst, pulse_fidelity(params, s, spec, p));
    return worst;
}

namespace {

double reflect(double x, double lo, double hi) {
    const double w = hi - lo;
    if (w <= 0.0) return lo;
    double y = std::fmod(x - lo, 2.0 * w);
    if (y < 0.0) y += 2.0 * w;
    return lo + (y <= w ? y : 2.0 * w - y);
}

std::vector<double> flatten(const PulseParameterization& p) {
    std::vector<double> x;
    for (const auto& s : p.segments) {
        x.push_back(s.duration);
        x.push_back(s.amplitude);
        x.push_back(s.phase);
        x.push_back(s.offset);
    }
    return x;
}

PulseParameterization unflatten(const PulseParameterization& shape, const std::vector<double>& x) {
    PulseParameterization p = shape;
    const auto& b = shape.bounds;
    for (std::size_t i = 0; i < p.segments.size(); ++i) {
        auto& s = p.segments[i];
        s.duration = reflect(x[4 * i], b.duration_min, b.duration_max);
        s.amplitude = reflect(x[4 * i + 1], b.amplitude_min, b.amplitude_max);
        s.phase = std::remainder(x[4 * i + 2], kTwoPi);
        s.offset = reflect(x[4 * i + 3], b.offset_min, b.offset_max);
    }
    return p;
}

// Durations rounded to whole samples so the exported table reproduces the evaluated pulse.
PulseParameterization snap_to_grid(const PulseParameterization& p) {
    PulseParameterization out = p;
    const auto d = p.durations();
    const auto total = static_cast<long>(std::llround(p.total_duration * p.sample_rate));
    std::vector<long> n(d.size());
    long used = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        acc += d[i];
        const long edge = std::lround(acc * p.sample_rate);
        n[i] = std::max(1L, edge - used);
        used += n[i];
    }
    n.back() += total - used;
    if (n.back() < 1) return p;
    for (std::size_t i = 0; i < d.size(); ++i) out.segments[i].duration = static_cast<double>(n[i]) / p.sample_rate;
    out.total_duration = static_cast<double>(total) / p.sample_rate;
    return out;
}

}  // namespace

OptimizationResult optimize_pulse(const PulseParameterization& init, const RFDistribution& dist,
                                  const ObjectiveSpec& spec, const SpinParams& p, int budget) {
    init.validate();
    dist.validate();
    spec.validate();
    if (budget < 1) throw Error(Errc::InvalidValue, "optimize_pulse: budget must be >= 1");

    OptimizationResult res;
    res.best = init;
    res.best_objective = average_fidelity(init, dist, spec, p);
    res.history.push_back(res.best_objective);
    res.evaluations = 1;

    std::vector<double> best_x = flatten(init);
    auto cost = [&](const std::vector<double>& x) { return 1.0 - average_fidelity(unflatten(init, x), dist, spec, p); };
    auto track = [&](double c) {
        res.history.push_back(std::max(res.history.back(), 1.0 - c));
    };

    std::vector<double> base_step;
    for (std::size_t i = 0; i < init.segments.size(); ++i) {
        base_step.insert(base_step.end(), {0.2 * init.total_duration / init.segments.size(), 1.0, 0.5, 0.3});
    }
    double shrink = 1.0;
    while (res.evaluations < budget) {
        std::vector<double> step = base_step;
        for (auto& s : step) s *= shrink;
        const int chunk = std::min(budget - res.evaluations, 1500);
        const auto r = detail::simplex_minimize(cost, best_x, step, chunk, 1e-6, track);
        res.evaluations += r.evaluations;
        if (r.evaluations == 0) break;
        if (1.0 - r.value > res.best_objective) {
            res.best_objective = 1.0 - r.value;
            best_x = r.x;
        }
        shrink = std::max(0.05, shrink * 0.5);
    }
    if (res.best_objective > res.history.front()) {
        const PulseParameterization snapped = snap_to_grid(unflatten(init, best_x));
        const double f = average_fidelity(snapped, dist, spec, p);
        if (f > res.history.front()) {
            res.best = snapped;
            res.best_objective = f;
        }
    }
    if (res.history.size() > static_cast<std::size_t>(budget)) res.history.resize(budget);
    return res;
}

PulseSegment to_pulse_segment(const PulseParameterization& params, const SpinParams& p) {
    params.validate();
    const auto samples = field_samples(params, tone_offsets(p));
    PulseSegment seg;
    seg.duration = params.total_duration;
    for (const auto& s : samples) seg.envelope.push_back({std::abs(s.field), std::arg(s.field)});
    return seg;
}

void write_history_csv(std::ostream& os, const std::vector<double>& history) {
    os << "eval_index,objective\n";
    char buf[64];
    for (std::size_t i = 0; i < history.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g\n", i + 1, history[i]);
        os << buf;
    }
}

}  // namespace darksim
