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

#include "darksim/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "simplex.hpp"

namespace darksim {

namespace {

Op power(const Op& u, long long n) {
    Op result = Op::Identity();
    Op base = u;
    while (n > 0) {
        if (n & 1) result = base * result;
        n >>= 1;
        if (n) base = base * base;
    }
    return result;
}

Op xy_field(double amplitude, double angle) {
    const auto& o = spin_operators();
    return amplitude * (std::cos(angle) * o.ix + std::sin(angle) * o.iy);
}

// Equal slices of a constant Hamiltonian, fine enough for the slicing guard.
long long span_slices(const Op& h, const RelaxationModel& model, double duration, double max_dt) {
    const double by_dt = std::ceil(duration / max_dt - 1e-9);
    const double by_guard = std::ceil(duration * (model.max_rate() + field_amplitude(h)) / 0.1 - 1e-9);
    return static_cast<long long>(std::max({1.0, by_dt, by_guard}));
}

Super constant_span(const Op& h, const RelaxationModel& model, double duration, double max_dt) {
    if (duration <= 0.0) return Super::Identity();
    const long long n = span_slices(h, model, duration, max_dt);
    return matrix_power(slice_superoperator(h, model, duration / static_cast<double>(n)), n);
}

struct LockElement {
    Op hamiltonian;
    double duration;
};

std::vector<LockElement> lock_elements(const SpinLock& lock, const SpinParams& p) {
    const Op hint = internal_hamiltonian(p);
    const auto& o = spin_operators();
    const double tp = 1.0 / (4.0 * lock.amplitude);
    std::vector<LockElement> out;
    for (const auto& [n, sign] : waltz16_supercycle())
        out.push_back({Op(hint + static_cast<double>(sign) * lock.amplitude * o.ix), n * tp});
    return out;
}

Op lock_hamiltonian(const SpinLock& lock, const SpinParams& p) {
    if (lock.mode == LockMode::IdealEquivalence) return equivalence_hamiltonian(p.j_coupling);
    return internal_hamiltonian(p) + lock.amplitude * spin_operators().ix;
}

// Selective version of a field: only the a <-> b matrix elements in the labeled eigenbasis survive.
Op restrict_to_transition(const Op& field, const Ket& va, const Ket& vb) {
    const cplx m = (va.adjoint() * field * vb)(0);
    const Op x = m * va * vb.adjoint();
    return x + x.adjoint();
}

}  // namespace

void PulseSegment::validate() const {
    if (!(duration > 0.0)) throw Error(Errc::InvalidValue, "pulse segment duration must be > 0");
    if (envelope.empty()) throw Error(Errc::InvalidValue, "pulse segment needs at least one sample");
    for (const auto& s : envelope)
        if (!(s.amplitude >= 0.0)) throw Error(Errc::InvalidValue, "pulse amplitudes must be >= 0");
}

Op PulseSegment::field_at(double t_local) const {
    const double ds = sample_period();
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t_local / ds)));
    k = std::min(k, envelope.size() - 1);
    const auto& s = envelope[k];
    return xy_field(s.amplitude, kTwoPi * carrier_offset * (time_origin + t_local) + s.phase);
}

double Sequence::duration() const {
    double total = 0.0;
    for (const auto& item : items) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, HardPulse>) {
                    if (x.amplitude > 0.0) total += x.angle / (kTwoPi * x.amplitude);
                } else {
                    total += x.duration;
                }
            },
            item);
    }
    return total;
}

// --- preparation ---

namespace {

struct PrepEvaluator {
    Eigen::Vector4d w;
    Op v;
    Op r90x, r180y, r90y;
    Ket s0, t0;

    explicit PrepEvaluator(const SpinParams& p) {
        Eigen::SelfAdjointEigenSolver<Op> es(internal_hamiltonian(p));
        w = es.eigenvalues();
        v = es.eigenvectors();
        r90x = hard_pulse_rotation({kTwoPi / 4.0, 0.0});
        r180y = hard_pulse_rotation({kTwoPi / 2.0, kTwoPi / 4.0});
        r90y = hard_pulse_rotation({kTwoPi / 4.0, kTwoPi / 4.0});
        const auto st = singlet_triplet_states();
        s0 = st.s0;
        t0 = st.t0;
    }
    Op free(double t) const {
        Op d = Op::Zero();
        for (int k = 0; k < 4; ++k) d(k, k) = std::polar(1.0, -kTwoPi * w(k) * t);
        return v * d * v.adjoint();
    }
    double operator()(double echo, double conversion, double final_delay) const {
        const Op u = free(final_delay) * r90y * free(echo + conversion) * r180y * free(echo) * r90x;
        return std::norm((s0.adjoint() * u.col(0))(0)) + std::norm((t0.adjoint() * u.col(3))(0));
    }
};

}  // namespace

double prep_objective(const SpinParams& p, const PrepDelays& d) {
    return PrepEvaluator(p)(d.echo, d.conversion, d.final_delay);
}

PrepDelays find_prep_delays(const SpinParams& p) {
    if (p.j_coupling == 0.0 && p.delta_nu == 0.0)
        throw Error(Errc::InvalidValue, "find_prep_delays: both delta_nu and J are zero");
    const PrepEvaluator eval(p);
    // search in units of 1/J (echo) and 1/delta_nu (conversion, final); a zero scale borrows the other
    const double js = p.j_coupling != 0.0 ? std::abs(p.j_coupling) : std::abs(p.delta_nu);
    const double ds = p.delta_nu != 0.0 ? std::abs(p.delta_nu) : std::abs(p.j_coupling);
    auto objective = [&](const std::vector<double>& u) {
        double pen = 0.0;
        std::array<double, 3> c{};
        for (int i = 0; i < 3; ++i) {
            c[i] = std::clamp(u[i], 1e-9, 1.0);
            pen += std::abs(u[i] - c[i]);
        }
        return -eval(c[0] / js, c[1] / ds, c[2] / ds) + pen;
    };

    constexpr int n1 = 40, n3 = 20, n2 = 20;
    std::vector<double> best_grid{0.25, 0.5, 0.25};
    double best_val = objective(best_grid);
    const std::vector<double> seed = best_grid;
    for (int i = 1; i <= n1; ++i)
        for (int j = 1; j <= n3; ++j)
            for (int k = 1; k <= n2; ++k) {
                const std::vector<double> u{double(i) / n1, double(j) / n3, double(k) / n2};
                const double val = objective(u);
                if (val < best_val) {
                    best_val = val;
                    best_grid = u;
                }
            }

    detail::SimplexResult best{best_grid, best_val, 0};
    for (const auto& start : {best_grid, seed}) {
        auto r = detail::simplex_minimize(objective, start, {0.02, 0.02, 0.02}, 4000, 1e-12);
        if (r.value < best.value) best = r;
    }
    PrepDelays out;
    out.echo = std::clamp(best.x[0], 1e-9, 1.0) / js;
    out.conversion = std::clamp(best.x[1], 1e-9, 1.0) / ds;
    out.final_delay = std::clamp(best.x[2], 1e-9, 1.0) / ds;
    out.objective = eval(out.echo, out.conversion, out.final_delay);
    if (p.j_coupling == 0.0 || p.delta_nu == 0.0 || out.objective < 1.998) {
        std::ostringstream os;
        os << "preparation search reached objective " << out.objective << " (< 1.998)";
        throw Error(Errc::ContractUnsatisfied, os.str());
    }
    return out;
}

Sequence prep_sequence(const PrepDelays& d) {
    const double q = kTwoPi / 4.0;
    Sequence s;
    s.items = {HardPulse{q, 0.0},     Delay{d.echo}, HardPulse{2.0 * q, q}, Delay{d.echo + d.conversion},
               HardPulse{q, q},       Delay{d.final_delay}};
    return s;
}

Sequence singlet_prep_sequence(const SpinParams& p) { return prep_sequence(find_prep_delays(p)); }

// --- building blocks ---

SequenceItem spin_lock_segment(double duration, double amplitude, LockMode mode) {
    if (!(duration > 0.0)) throw Error(Errc::InvalidValue, "spin lock duration must be > 0");
    if (mode != LockMode::IdealEquivalence && !(amplitude > 0.0))
        throw Error(Errc::InvalidValue, "spin lock amplitude must be > 0");
    return SpinLock{duration, amplitude, mode};
}

std::vector<std::pair<int, int>> waltz16_supercycle() {
    static const std::vector<std::pair<int, int>> r{{3, -1}, {4, 1},  {2, -1}, {3, 1}, {1, -1},
                                                    {2, 1},  {4, -1}, {2, 1},  {3, -1}};
    std::vector<std::pair<int, int>> out;
    for (int pass = 0; pass < 4; ++pass)
        for (const auto& [n, s] : r) out.emplace_back(n, pass < 2 ? s : -s);
    return out;
}

PulseSegment gaussian_probe_segment(double duration, BasisState level_a, BasisState level_b, const SpinParams& p,
                                    double flip_area, int n_samples) {
    if (!(duration > 0.0) || n_samples < 1) throw Error(Errc::InvalidValue, "gaussian probe needs duration > 0");
    PulseSegment seg;
    seg.duration = duration;
    seg.carrier_offset = resonance_offset(p, level_a, level_b);
    const double sigma = duration / 6.0;
    const double ds = duration / n_samples;
    std::vector<double> shape(n_samples);
    double area = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        const double t = (k + 0.5) * ds - 0.5 * duration;
        shape[k] = std::exp(-0.5 * t * t / (sigma * sigma));
        area += shape[k] * ds;
    }
    const double target = std::abs(flip_area) / kTwoPi;
    const double phase = flip_area < 0.0 ? kTwoPi / 2.0 : 0.0;
    seg.envelope.resize(n_samples);
    for (int k = 0; k < n_samples; ++k) seg.envelope[k] = {shape[k] * target / area, phase};
    return seg;
}

TwoToneSpec resonant_two_tone(const SpinParams& p, double probe_amp, double control_amp, double duration) {
    TwoToneSpec s;
    s.duration = duration;
    s.probe_amp = probe_amp;
    s.control_amp = control_amp;
    s.probe_offset = resonance_offset(p, BasisState::s00, BasisState::s01);
    s.control_offset = resonance_offset(p, BasisState::s00, BasisState::s10);
    return s;
}

namespace {

void check_two_tone(const TwoToneSpec& spec) {
    if (!(spec.duration > 0.0)) throw Error(Errc::InvalidValue, "two-tone duration must be > 0");
    if (!(spec.probe_amp >= 0.0) || !(spec.control_amp >= 0.0))
        throw Error(Errc::InvalidValue, "two-tone amplitudes must be >= 0");
    const double fmax = std::max(std::abs(spec.probe_offset), std::abs(spec.control_offset));
    if (spec.sample_rate < 20.0 * fmax) {
        std::ostringstream os;
        os << "sample rate " << spec.sample_rate << " Hz is below 20x the largest offset " << fmax << " Hz";
        throw Error(Errc::UnderSampled, os.str());
    }
}

std::size_t two_tone_samples(const TwoToneSpec& spec) {
    return static_cast<std::size_t>(std::max(1.0, std::round(spec.duration * spec.sample_rate)));
}

}  // namespace

PulseSegment two_tone_segment(const TwoToneSpec& spec) {
    check_two_tone(spec);
    PulseSegment seg;
    seg.duration = spec.duration;
    seg.time_origin = spec.time_origin;
    const std::size_t n = two_tone_samples(spec);
    const double ds = spec.duration / static_cast<double>(n);
    seg.envelope.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = spec.time_origin + (static_cast<double>(k) + 0.5) * ds;
        const cplx z = spec.probe_amp * std::polar(1.0, kTwoPi * spec.probe_offset * t + spec.probe_phase) +
                       spec.control_amp * std::polar(1.0, kTwoPi * spec.control_offset * t + spec.control_phase);
        seg.envelope[k] = {std::abs(z), std::arg(z)};
    }
    return seg;
}

PulseSegment two_tone_segment(double duration, double probe_amp, double control_amp, double probe_offset,
                              double control_offset) {
    TwoToneSpec s;
    s.duration = duration;
    s.probe_amp = probe_amp;
    s.control_amp = control_amp;
    s.probe_offset = probe_offset;
    s.control_offset = control_offset;
    return two_tone_segment(s);
}

Schedule segment_schedule(const PulseSegment& seg, const SpinParams& p, double max_dt, double rf_scale) {
    seg.validate();
    if (!(max_dt > 0.0)) throw Error(Errc::InvalidValue, "max_dt must be > 0");
    const Op hint = internal_hamiltonian(p);
    const double ds = seg.sample_period();
    const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(ds / max_dt - 1e-9)));
    const double d = ds / static_cast<double>(m);
    Schedule out;
    out.reserve(seg.envelope.size() * m);
    for (std::size_t k = 0; k < seg.envelope.size(); ++k) {
        const auto& s = seg.envelope[k];
        for (std::size_t j = 0; j < m; ++j) {
            const double t = static_cast<double>(k) * ds + (static_cast<double>(j) + 0.5) * d;
            const double a = kTwoPi * seg.carrier_offset * (seg.time_origin + t) + s.phase;
            out.push_back({d, Op(hint + xy_field(rf_scale * s.amplitude, a))});
        }
    }
    return out;
}

Schedule two_tone_schedule(const TwoToneSpec& spec, const SpinParams& p, double max_dt, DriveModel drive,
                           double rf_scale) {
    if (drive == DriveModel::Homonuclear) return segment_schedule(two_tone_segment(spec), p, max_dt, rf_scale);
    check_two_tone(spec);
    if (!(max_dt > 0.0)) throw Error(Errc::InvalidValue, "max_dt must be > 0");
    const auto eb = labeled_eigenbasis(p);
    const Ket v00 = eb.vectors.col(0), v01 = eb.vectors.col(1), v10 = eb.vectors.col(2);
    const Op hint = internal_hamiltonian(p);
    const std::size_t n = two_tone_samples(spec);
    const double ds = spec.duration / static_cast<double>(n);
    const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(ds / max_dt - 1e-9)));
    Schedule out;
    out.reserve(n * m);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = spec.time_origin + (static_cast<double>(k) + 0.5) * ds;
        const Op fp = xy_field(rf_scale * spec.probe_amp, kTwoPi * spec.probe_offset * t + spec.probe_phase);
        const Op fc = xy_field(rf_scale * spec.control_amp, kTwoPi * spec.control_offset * t + spec.control_phase);
        const Op h = hint + restrict_to_transition(fp, v00, v01) + restrict_to_transition(fc, v00, v10);
        for (std::size_t j = 0; j < m; ++j) out.push_back({ds / static_cast<double>(m), h});
    }
    return out;
}

Op hard_pulse_rotation(const HardPulse& pulse) {
    return mat_exp_hermitian(xy_field(1.0, pulse.phase), pulse.angle);
}

Op sequence_propagator(const Sequence& seq, const SpinParams& p, double max_dt) {
    Op u = Op::Identity();
    const Op hint = internal_hamiltonian(p);
    for (const auto& item : seq.items) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, HardPulse>) {
                    if (x.amplitude > 0.0)
                        u = mat_exp_hermitian(Op(hint + xy_field(x.amplitude, x.phase)), x.angle / x.amplitude) * u;
                    else
                        u = hard_pulse_rotation(x) * u;
                } else if constexpr (std::is_same_v<T, Delay>) {
                    u = mat_exp_hermitian(hint, kTwoPi * x.duration) * u;
                } else if constexpr (std::is_same_v<T, SpinLock>) {
                    if (x.mode != LockMode::Waltz16) {
                        u = mat_exp_hermitian(lock_hamiltonian(x, p), kTwoPi * x.duration) * u;
                        return;
                    }
                    const auto elems = lock_elements(x, p);
                    Op cycle = Op::Identity();
                    double cycle_time = 0.0;
                    for (const auto& e : elems) {
                        cycle = mat_exp_hermitian(e.hamiltonian, kTwoPi * e.duration) * cycle;
                        cycle_time += e.duration;
                    }
                    const auto full = static_cast<long long>(std::floor(x.duration / cycle_time + 1e-9));
                    u = power(cycle, full) * u;
                    double left = x.duration - static_cast<double>(full) * cycle_time;
                    for (const auto& e : elems) {
                        if (left <= 1e-15) break;
                        const double d = std::min(left, e.duration);
                        u = mat_exp_hermitian(e.hamiltonian, kTwoPi * d) * u;
                        left -= d;
                    }
                } else {
                    u = schedule_unitary(segment_schedule(x, p, max_dt)) * u;
                }
            },
            item);
    }
    return u;
}

Op apply_sequence(const Op& rho, const Sequence& seq, const SpinParams& p, const RelaxationModel& model,
                  double max_dt) {
    model.validate();
    Op out = rho;
    const Op hint = internal_hamiltonian(p);
    for (const auto& item : seq.items) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, HardPulse>) {
                    if (x.amplitude > 0.0) {
                        const Op h = hint + xy_field(x.amplitude, x.phase);
                        out = apply_superoperator(constant_span(h, model, x.angle / (kTwoPi * x.amplitude), max_dt), out);
                    } else {
                        const Op r = hard_pulse_rotation(x);
                        out = r * out * r.adjoint();
                    }
                } else if constexpr (std::is_same_v<T, Delay>) {
                    out = apply_superoperator(constant_span(hint, model, x.duration, max_dt), out);
                } else if constexpr (std::is_same_v<T, SpinLock>) {
                    if (x.mode != LockMode::Waltz16) {
                        out = apply_superoperator(constant_span(lock_hamiltonian(x, p), model, x.duration, max_dt), out);
                        return;
                    }
                    const auto elems = lock_elements(x, p);
                    Super cycle = Super::Identity();
                    double cycle_time = 0.0;
                    for (const auto& e : elems) {
                        cycle = constant_span(e.hamiltonian, model, e.duration, max_dt) * cycle;
                        cycle_time += e.duration;
                    }
                    const auto full = static_cast<long long>(std::floor(x.duration / cycle_time + 1e-9));
                    out = apply_superoperator(matrix_power(cycle, full), out);
                    double left = x.duration - static_cast<double>(full) * cycle_time;
                    for (const auto& e : elems) {
                        if (left <= 1e-15) break;
                        const double d = std::min(left, e.duration);
                        out = apply_superoperator(constant_span(e.hamiltonian, model, d, max_dt), out);
                        left -= d;
                    }
                } else {
                    out = apply_superoperator(schedule_superoperator(segment_schedule(x, p, max_dt), model), out);
                }
            },
            item);
    }
    return out;
}

// --- pulse table ---

void write_pulse_table(std::ostream& os, const PulseSegment& seg) {
    seg.validate();
    char buf[160];
    std::snprintf(buf, sizeof buf, "# duration_s=%.17g samples=%zu carrier_offset_Hz=%.17g time_origin_s=%.17g\n",
                  seg.duration, seg.envelope.size(), seg.carrier_offset, seg.time_origin);
    os << buf << "time_s,amplitude_Hz,phase_rad,offset_Hz\n";
    const double ds = seg.sample_period();
    for (std::size_t k = 0; k < seg.envelope.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", static_cast<double>(k) * ds,
                      seg.envelope[k].amplitude, seg.envelope[k].phase, seg.carrier_offset);
        os << buf;
    }
}

PulseSegment read_pulse_table(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("#", 0) != 0)
        throw Error(Errc::ParseError, "pulse table: line 1: missing metadata line");
    PulseSegment seg;
    std::size_t samples = 0;
    {
        std::istringstream ms(line.substr(1));
        std::string tok;
        while (ms >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
            if (k == "duration_s") seg.duration = std::stod(v);
            else if (k == "samples") samples = std::stoul(v);
            else if (k == "carrier_offset_Hz") seg.carrier_offset = std::stod(v);
            else if (k == "time_origin_s") seg.time_origin = std::stod(v);
        }
    }
    if (!std::getline(is, line)) throw Error(Errc::ParseError, "pulse table: line 2: missing column header");
    int lineno = 2;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        double t, a, ph, off;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &t, &a, &ph, &off) != 4)
            throw Error(Errc::ParseError, "pulse table: line " + std::to_string(lineno) + ": expected 4 columns");
        seg.envelope.push_back({a, ph});
    }
    if (samples != 0 && samples != seg.envelope.size())
        throw Error(Errc::ParseError, "pulse table: sample count does not match metadata");
    seg.validate();
    return seg;
}

}  // namespace darksim
