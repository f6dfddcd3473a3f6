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


#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "darksim/error.hpp"
#include "darksim/harness.hpp"
#include "darksim/metrics.hpp"
#include "darksim/optctrl.hpp"
#include "darksim/parallel.hpp"

namespace darksim {

namespace {

std::string kv(const char* key, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s=%.12g", key, v);
    return buf;
}

std::string join(std::initializer_list<std::string> parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : " ") + p;
    return out;
}

std::string model_line(const RelaxationModel& m) {
    return join({"relaxation_model", kv("flip_rate", m.flip_rate), kv("correlated_flip_rate", m.correlated_flip_rate),
                 kv("uncorrelated_dephasing_rate", m.uncorrelated_dephasing_rate),
                 kv("correlated_dephasing_rate", m.correlated_dephasing_rate)});
}

std::string invariant_line(const InvariantReport& r) {
    return join({"invariants", kv("checked", static_cast<double>(r.checked)), kv("max_trace_error", r.max_trace_error),
                 kv("max_hermiticity_error", r.max_hermiticity_error), kv("min_eigenvalue", r.min_eigenvalue),
                 kv("max_population_sum", r.max_population_sum), std::string("ok=") + (r.ok() ? "true" : "false")});
}

ResultSeries with_header(const ExperimentConfig& cfg) {
    ResultSeries rs;
    rs.metadata.push_back(std::string("darksim ") + version());
    rs.metadata.push_back("scenario=" + to_string(cfg.scenario));
    rs.metadata.push_back("seed=" + std::to_string(cfg.seed));
    std::istringstream in(emit_config(cfg));
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) rs.metadata.push_back("config " + line);
    return rs;
}

Op singlet_target() { return projector(singlet_triplet_states().s0); }

// slices of equal length, stride for the record interval
int uniform_stride(const Schedule& s, double interval, const char* key) {
    if (s.empty()) throw Error(Errc::InvalidValue, std::string(key) + ": empty schedule");
    const double d = s.front().duration;
    for (const auto& sl : s)
        if (std::abs(sl.duration - d) > 1e-12 * d)
            throw Error(Errc::InvalidValue, std::string(key) + ": slices are not uniform");
    const double r = interval / d;
    if (std::abs(r - std::round(r)) > 1e-9 * r || std::round(r) < 1.0)
        throw Error(Errc::InvalidValue, std::string(key) + ": not a multiple of the slice length");
    return static_cast<int>(std::round(r));
}

Schedule eit_schedule(const ExperimentConfig& cfg, double probe_amp, double control_amp, double probe_shift,
                      double control_shift, int segments) {
    Schedule out;
    const double period = cfg.eit.segment_duration + cfg.eit.gap;
    const Op hint = internal_hamiltonian(cfg.spin);
    for (int k = 0; k < segments; ++k) {
        if (k > 0 && cfg.eit.gap > 0.0) {
            const Schedule g = sample_schedule([&](double) { return hint; }, 0.0, cfg.eit.gap, cfg.propagation.dt);
            out.insert(out.end(), g.begin(), g.end());
        }
        TwoToneSpec spec = resonant_two_tone(cfg.spin, probe_amp, control_amp, cfg.eit.segment_duration);
        spec.sample_rate = cfg.eit.sample_rate;
        spec.probe_offset += probe_shift;
        spec.control_offset += control_shift;
        spec.time_origin = k * period;
        const Schedule s = two_tone_schedule(spec, cfg.spin, cfg.propagation.dt, cfg.eit.drive);
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

NoiseProcess noise_of(const ExperimentConfig& cfg) {
    NoiseProcess n;
    if (cfg.noise.enabled) n.rms_amplitude = cfg.noise.rms_amplitude;
    n.correlation_time = cfg.noise.correlation_time;
    n.correlation_coefficient = cfg.noise.correlation_coefficient;
    n.seed = cfg.seed;
    return n;
}

enum class Condition { Free, ProbeOnly, ProbeControl };

// interaction-frame states at t = k * record_interval
std::vector<Op> monitor(const ExperimentConfig& cfg, const RelaxationModel& model, const Op& rho0, Condition c,
                        InvariantReport& inv) {
    const double T = cfg.eit.monitor_duration;
    Schedule s;
    if (c == Condition::Free) {
        const Op h = internal_hamiltonian(cfg.spin);
        s = sample_schedule([&](double) { return h; }, 0.0, T, cfg.propagation.dt_free);
    } else {
        const double nu = cfg.eit.tone_amplitude;
        const int segs = static_cast<int>(std::ceil(T / (cfg.eit.segment_duration + cfg.eit.gap) - 1e-9));
        s = eit_schedule(cfg, nu, c == Condition::ProbeControl ? nu : 0.0, 0.0, 0.0, segs);
        const auto keep = static_cast<std::size_t>(std::llround(T / s.front().duration));
        if (keep > s.size()) throw Error(Errc::InvalidValue, "eit.monitor_duration: schedule too short");
        s.resize(keep);
    }
    PropagationConfig pc;
    pc.dt = std::max(cfg.propagation.dt, cfg.propagation.dt_free);
    pc.method = cfg.propagation.method;
    pc.n_trajectories = cfg.noise.trajectories;
    pc.record_stride = uniform_stride(s, cfg.eit.record_interval, "eit.record_interval");
    const Evolution ev = evolve_stochastic_avg(rho0, s, model, noise_of(cfg), pc);
    const double scale = spectral_norm(rho0);
    std::vector<Op> out;
    for (std::size_t k = 0; k < ev.samples.size(); ++k) {
        inv.add(ev.samples[k], scale);
        out.push_back(to_interaction_frame(ev.samples[k], cfg.spin, k * cfg.eit.record_interval));
    }
    return out;
}

void add_prep_metadata(ResultSeries& rs, const ExperimentConfig& cfg, const RelaxationModel& model, const Op& rho0) {
    rs.metadata.push_back(model_line(model));
    if (cfg.eit.initial_state == InitialState::Prepared) {
        const PrepDelays d = find_prep_delays(cfg.spin);
        rs.metadata.push_back(join({"prep_delays", kv("echo_s", d.echo), kv("conversion_s", d.conversion),
                                    kv("final_s", d.final_delay), kv("objective", d.objective)}));
    }
    rs.metadata.push_back(kv("initial_singlet_correlation", correlation(rho0, singlet_target())));
}

ResultSeries run_fig3(const ExperimentConfig& cfg, bool populations) {
    ResultSeries rs = with_header(cfg);
    const RelaxationModel model = resolve_relaxation(cfg);
    const Op rho0 = eit_initial_state(cfg, model);
    add_prep_metadata(rs, cfg, model, rho0);
    InvariantReport inv;
    const Op target = singlet_target();
    const double dt_rec = cfg.eit.record_interval;
    if (populations) {
        const auto st = monitor(cfg, model, rho0, Condition::ProbeControl, inv);
        rs.columns = {"time_s", "P00", "P01", "P10", "P11"};
        for (std::size_t k = 0; k < st.size(); ++k) {
            const auto p = deviation_populations(st[k]);
            rs.rows.push_back({k * dt_rec, p[0], p[1], p[2], p[3]});
        }
        const auto p0 = deviation_populations(st.front());
        const auto p1 = deviation_populations(st.back());
        rs.metadata.push_back(join({"population_drift", kv("P00", p1[0] - p0[0]), kv("P01", p1[1] - p0[1]),
                                    kv("P10", p1[2] - p0[2]), kv("P11", p1[3] - p0[3])}));
    } else {
        const auto a = monitor(cfg, model, rho0, Condition::Free, inv);
        const auto b = monitor(cfg, model, rho0, Condition::ProbeOnly, inv);
        const auto c = monitor(cfg, model, rho0, Condition::ProbeControl, inv);
        rs.columns = {"time_s", "free", "probe_only", "probe_control"};
        for (std::size_t k = 0; k < a.size(); ++k)
            rs.rows.push_back({k * dt_rec, correlation(a[k], target), correlation(b[k], target),
                               correlation(c[k], target)});
    }
    rs.metadata.push_back(invariant_line(inv));
    return rs;
}

std::vector<double> grid(double lo, double hi, double step) {
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> g;
    for (long long i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
    return g;
}

// correlation with the singlet after `segments` two-tone segments, no noise
double eit_endpoint(const ExperimentConfig& cfg, const RelaxationModel& model, const Op& rho0, double probe_amp,
                    double control_amp, double probe_shift, double control_shift, int segments,
                    InvariantReport& inv, double scale) {
    const Schedule s = eit_schedule(cfg, probe_amp, control_amp, probe_shift, control_shift, segments);
    PropagationConfig pc;
    pc.dt = cfg.propagation.dt;
    pc.method = cfg.propagation.method;
    const Evolution ev = evolve_lindblad(rho0, s, model, pc);
    inv.add(ev.final_state, scale);
    const double t_end = segments * cfg.eit.segment_duration + (segments - 1) * cfg.eit.gap;
    const Op r = to_interaction_frame(ev.final_state, cfg.spin, t_end);
    return correlation(r, singlet_target());
}

ResultSeries run_sweep(const ExperimentConfig& cfg, bool offsets) {
    ResultSeries rs = with_header(cfg);
    const RelaxationModel model = resolve_relaxation(cfg);
    const Op rho0 = eit_initial_state(cfg, model);
    add_prep_metadata(rs, cfg, model, rho0);
    const double nu = cfg.eit.tone_amplitude;
    const std::vector<double> x = offsets ? grid(cfg.fig4a.offset_min, cfg.fig4a.offset_max, cfg.fig4a.offset_step)
                                          : grid(cfg.fig4b.ratio_min, cfg.fig4b.ratio_max, cfg.fig4b.ratio_step);
    std::vector<double> y(x.size());
    std::vector<InvariantReport> inv(x.size());
    const double scale = spectral_norm(rho0);
    parallel_for(x.size(), [&](std::size_t i) {
        if (offsets) {
            double dp = x[i], dc = x[i];
            if (cfg.fig4a.offset_mode == OffsetMode::Probe) dc = 0.0;
            if (cfg.fig4a.offset_mode == OffsetMode::Symmetric) dc = -x[i];
            y[i] = eit_endpoint(cfg, model, rho0, nu, nu, dp, dc, cfg.fig4a.repetitions, inv[i], scale);
        } else {
            y[i] = eit_endpoint(cfg, model, rho0, x[i] * nu, nu, 0.0, 0.0, cfg.fig4b.repetitions, inv[i], scale);
        }
    });
    InvariantReport all;
    for (const auto& r : inv) {
        all.max_trace_error = std::max(all.max_trace_error, r.max_trace_error);
        all.max_hermiticity_error = std::max(all.max_hermiticity_error, r.max_hermiticity_error);
        all.min_eigenvalue = std::min(all.min_eigenvalue, r.min_eigenvalue);
        all.max_population_sum = std::max(all.max_population_sum, r.max_population_sum);
        all.checked += r.checked;
    }
    rs.columns = {offsets ? "offset_Hz" : "amplitude_ratio", "correlation"};
    for (std::size_t i = 0; i < x.size(); ++i) rs.rows.push_back({x[i], y[i]});
    const auto best = std::max_element(y.begin(), y.end()) - y.begin();
    rs.metadata.push_back(join({"argmax", kv(offsets ? "offset_Hz" : "amplitude_ratio", x[best]),
                                kv("correlation", y[best])}));
    rs.metadata.push_back(invariant_line(all));
    return rs;
}

ResultSeries run_lifetimes(const ExperimentConfig& cfg) {
    ResultSeries rs = with_header(cfg);
    const RelaxationModel model = resolve_relaxation(cfg);
    rs.metadata.push_back(model_line(model));
    const RFField lock{cfg.lock.amplitude, 0.0, 0.0};
    const LifetimeProtocol protocol{};
    const double t1 = measure_t1(model, cfg.spin, protocol);
    const double ts = measure_ts(model, cfg.spin, lock, protocol);
    rs.metadata.push_back(join({"fitted", kv("T1_s", t1), kv("Ts_s", ts), kv("Ts_over_T1", ts / t1)}));

    // decay curves on a common grid, same observables as the fits
    const auto& o = spin_operators();
    const Op ps = singlet_target();
    const Op q = ps - (Op::Identity() - ps) / 3.0;
    const double step = 0.5;
    const int n = static_cast<int>(std::round(protocol.ts_window / step));
    const Super e1 = expm(step * lindblad_superoperator(internal_hamiltonian(cfg.spin), model));
    const Super e2 =
        expm(step * lindblad_superoperator(Op(internal_hamiltonian(cfg.spin) + rf_hamiltonian(lock, 0.0)), model));
    SuperVec v1 = vec(Op(-o.iz1 + o.iz2)), v2 = vec(Op(ps - 0.25 * Op::Identity()));
    InvariantReport inv;
    rs.columns = {"time_s", "inversion_signal", "singlet_order"};
    for (int k = 0; k <= n; ++k) {
        const Op r1 = unvec(v1), r2 = unvec(v2);
        inv.add(r1, 1.0);
        inv.add(r2, 1.0);
        rs.rows.push_back({k * step, -(o.iz1 * r1).trace().real(), (q * r2).trace().real()});
        v1 = e1 * v1;
        v2 = e2 * v2;
    }
    rs.metadata.push_back(invariant_line(inv));
    return rs;
}

ResultSeries run_spectra(const ExperimentConfig& cfg) {
    ResultSeries rs = with_header(cfg);
    const RelaxationModel model = resolve_relaxation(cfg);
    rs.metadata.push_back(model_line(model));
    const Op eq = equilibrium_deviation();
    const double dt = cfg.propagation.dt;

    Sequence ref_seq{{HardPulse{kTwoPi / 4.0, kTwoPi / 4.0, 0.0}}};
    const Op r_ref = apply_sequence(eq, ref_seq, cfg.spin, model, dt);
    Sequence probe_seq{{gaussian_probe_segment(cfg.spectra.probe_duration, BasisState::s00, BasisState::s01,
                                               cfg.spin, kTwoPi / 4.0)}};
    const Op r_probe = apply_sequence(eq, probe_seq, cfg.spin, model, dt);
    const double nu = cfg.eit.tone_amplitude;
    const Schedule both = eit_schedule(cfg, nu, nu, 0.0, 0.0, 1);
    const Op r_both = apply_superoperator(schedule_superoperator(both, model), eq);

    const auto n = static_cast<std::size_t>(std::llround(cfg.spectra.acquisition / cfg.spectra.dt));
    const std::vector<std::pair<std::string, Op>> traces = {
        {"probe_only", r_probe}, {"probe_control", r_both}, {"reference", r_ref}};
    std::vector<SpectrumResult> spectra(traces.size());
    InvariantReport inv;
    parallel_for(traces.size(), [&](std::size_t i) {
        const auto fid = simulate_fid(traces[i].second, cfg.spin, model, cfg.spectra.dt, n, cfg.spectra.broadening);
        spectra[i] = spectrum_from_fid(fid, cfg.spectra.dt, static_cast<std::size_t>(cfg.spectra.zero_fill),
                                       cfg.spectra.broadening);
    });
    for (const auto& t : traces) inv.add(t.second, 1.0);
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto lines = find_lines(spectra[i]);
        std::string s = "lines " + traces[i].first + " count=" + std::to_string(lines.size());
        for (std::size_t j = 0; j < lines.size() && j < 8; ++j) {
            char buf[80];
            std::snprintf(buf, sizeof buf, " %.6f:%.6g", lines[j].frequency, lines[j].height);
            s += buf;
        }
        rs.metadata.push_back(s);
    }
    rs.columns = {"frequency_Hz"};
    for (const auto& t : traces) rs.columns.push_back(t.first);
    const auto& f = spectra[0].frequency;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (std::abs(f[k]) > cfg.spectra.window) continue;
        std::vector<double> row{f[k]};
        for (const auto& s : spectra) row.push_back(s.amplitude[k].real());
        rs.rows.push_back(std::move(row));
    }
    rs.metadata.push_back(invariant_line(inv));
    return rs;
}

ResultSeries run_optimize(const ExperimentConfig& cfg) {
    ResultSeries rs = with_header(cfg);
    PulseParameterization init =
        naive_two_tone(cfg.optimize.segments, cfg.optimize.init_amplitude, cfg.eit.segment_duration);
    init.sample_rate = cfg.optimize.sample_rate;
    const RFDistribution dist = RFDistribution::default_grid();
    ObjectiveSpec spec = ObjectiveSpec::default_spec();
    spec.w_dark = cfg.optimize.w_dark;
    spec.w_spectator = 1.0 - cfg.optimize.w_dark;
    const OptimizationResult res = optimize_pulse(init, dist, spec, cfg.spin, cfg.optimize.budget);

    rs.columns = {"rf_scale", "weight", "naive_fidelity", "optimized_fidelity"};
    for (const auto& [s, w] : dist.points)
        rs.rows.push_back({s, w, pulse_fidelity(init, s, spec, cfg.spin), pulse_fidelity(res.best, s, spec, cfg.spin)});
    rs.metadata.push_back(join({"naive", kv("average", average_fidelity(init, dist, spec, cfg.spin)),
                                kv("worst", worst_case_fidelity(init, dist, spec, cfg.spin))}));
    rs.metadata.push_back(join({"optimized", kv("average", average_fidelity(res.best, dist, spec, cfg.spin)),
                                kv("worst", worst_case_fidelity(res.best, dist, spec, cfg.spin)),
                                kv("evaluations", res.evaluations)}));
    // the objective has no bright-state term; report how much of |00> each pulse still moves to |T0>
    auto bright = [&](const PulseParameterization& pp) {
        const Ket t0 = singlet_triplet_states().t0, up = basis_ket(BasisState::s00);
        double acc = 0.0;
        for (const auto& [s, w] : dist.points) acc += w * std::norm(t0.dot(pulse_propagator(pp, s, cfg.spin) * up));
        return acc;
    };
    rs.metadata.push_back(join({"bright_transfer", kv("naive", bright(init)), kv("optimized", bright(res.best))}));
    const auto d = res.best.durations();
    for (std::size_t k = 0; k < res.best.segments.size(); ++k) {
        const auto& sg = res.best.segments[k];
        rs.metadata.push_back(join({"segment", kv("index", static_cast<double>(k)), kv("duration_s", d[k]),
                                    kv("amplitude_Hz", sg.amplitude), kv("phase_rad", sg.phase),
                                    kv("offset_Hz", sg.offset)}));
    }
    if (!cfg.optimize.pulse_out.empty()) {
        std::ofstream out(cfg.optimize.pulse_out, std::ios::binary);
        if (!out) throw Error(Errc::Io, "cannot open '" + cfg.optimize.pulse_out + "'");
        write_pulse_table(out, to_pulse_segment(res.best, cfg.spin));
    }
    if (!cfg.optimize.history_out.empty()) {
        std::ofstream out(cfg.optimize.history_out, std::ios::binary);
        if (!out) throw Error(Errc::Io, "cannot open '" + cfg.optimize.history_out + "'");
        write_history_csv(out, res.history);
    }
    return rs;
}

}  // namespace

RelaxationModel resolve_relaxation(const ExperimentConfig& cfg) {
    const auto& r = cfg.relaxation;
    if (!r.auto_calibrate) {
        RelaxationModel m;
        m.flip_rate = r.flip_rate;
        m.correlated_flip_rate = r.correlated_flip_rate;
        m.uncorrelated_dephasing_rate = r.uncorrelated_dephasing_rate;
        m.correlated_dephasing_rate = r.correlated_dephasing_rate;
        m.validate();
        return m;
    }
    FitOptions opts;
    opts.spin = cfg.spin;
    opts.uncorrelated_dephasing_rate = r.uncorrelated_dephasing_rate;
    opts.correlated_dephasing_rate = r.correlated_dephasing_rate;
    return fit_relaxation_rates(r.t1_target, r.ts_target, RFField{cfg.lock.amplitude, 0.0, 0.0}, opts);
}

namespace {

std::vector<std::pair<double, double>> lock_rf_grid(const LockSection& lock) {
    // Gaussian weights on an even grid over +-3 sigma
    const int n = lock.rf_points;
    const double sigma = lock.rf_inhomogeneity;
    if (sigma == 0.0 || n == 1) return {{1.0, 1.0}};
    std::vector<std::pair<double, double>> g;
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = -3.0 + 6.0 * k / (n - 1);
        const double w = std::exp(-0.5 * x * x);
        g.push_back({1.0 + sigma * x, w});
        total += w;
    }
    for (auto& p : g) p.second /= total;
    return g;
}

}  // namespace

Op eit_initial_state(const ExperimentConfig& cfg, const RelaxationModel& model) {
    if (cfg.eit.initial_state == InitialState::Ideal) return singlet_deviation();
    const PrepDelays delays = find_prep_delays(cfg.spin);
    const auto rf = lock_rf_grid(cfg.lock);
    std::vector<Op> parts(rf.size());
    parallel_for(rf.size(), [&](std::size_t i) {
        Sequence seq = prep_sequence(delays);
        if (cfg.lock.duration > 0.0)
            seq.items.push_back(
                spin_lock_segment(cfg.lock.duration, rf[i].first * cfg.lock.amplitude, cfg.lock.mode));
        parts[i] = rf[i].second * apply_sequence(equilibrium_deviation(), seq, cfg.spin, model, cfg.propagation.dt);
    });
    Op rho = deviation_part(pairwise_sum(parts));
    // same Frobenius norm as the exact singlet deviation
    const double n = rho.norm();
    if (n < 1e-12) throw Error(Errc::ZeroDeviation, "prepared state has no deviation");
    return rho * (singlet_deviation().norm() / n);
}

ResultSeries run_scenario(const ExperimentConfig& cfg) {
    cfg.validate();
    switch (cfg.scenario) {
        case Scenario::Lifetimes:
            return run_lifetimes(cfg);
        case Scenario::Fig3a:
            return run_fig3(cfg, false);
        case Scenario::Fig3b:
            return run_fig3(cfg, true);
        case Scenario::Fig4a:
            return run_sweep(cfg, true);
        case Scenario::Fig4b:
            return run_sweep(cfg, false);
        case Scenario::Spectra:
            return run_spectra(cfg);
        case Scenario::Optimize:
            return run_optimize(cfg);
    }
    throw Error(Errc::InvalidValue, "scenario: unknown");
}

}  // namespace darksim
