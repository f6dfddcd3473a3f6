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


#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "darksim/error.hpp"
#include "darksim/harness.hpp"

#ifndef DARKSIM_VERSION
#define DARKSIM_VERSION "unknown"
#endif

namespace darksim {

const char* version() { return DARKSIM_VERSION; }

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw Error(Errc::InvalidValue, key + ": " + what);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
    // shortest text that reads back to the same double
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end) bad(key, "expected a number, got '" + v + "'");
    return out;
}

long long parse_int(const std::string& key, const std::string& v) {
    long long out = 0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end) bad(key, "expected an integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad(key, "expected true or false, got '" + v + "'");
}

template <class E>
struct EnumNames {
    std::vector<std::pair<E, std::string>> names;

    std::string name(E e) const {
        for (const auto& [v, n] : names)
            if (v == e) return n;
        return "?";
    }
    E parse(const std::string& key, const std::string& s) const {
        for (const auto& [v, n] : names)
            if (n == s) return v;
        std::string opts;
        for (const auto& [v, n] : names) opts += (opts.empty() ? "" : "|") + n;
        bad(key, "expected one of " + opts + ", got '" + s + "'");
    }
};

const EnumNames<Scenario> kScenarios{{{Scenario::Lifetimes, "lifetimes"},
                                      {Scenario::Fig3a, "fig3a"},
                                      {Scenario::Fig3b, "fig3b"},
                                      {Scenario::Fig4a, "fig4a"},
                                      {Scenario::Fig4b, "fig4b"},
                                      {Scenario::Spectra, "spectra"},
                                      {Scenario::Optimize, "optimize"}}};
const EnumNames<Method> kMethods{{{Method::ExactSlice, "exact_slice"}, {Method::Rk4, "rk4"}, {Method::Split, "split"}}};
const EnumNames<LockMode> kLockModes{
    {{LockMode::IdealEquivalence, "ideal"}, {LockMode::Cw, "cw"}, {LockMode::Waltz16, "waltz16"}}};
const EnumNames<DriveModel> kDrives{{{DriveModel::Homonuclear, "homonuclear"}, {DriveModel::Selective, "selective"}}};
const EnumNames<InitialState> kInitial{{{InitialState::Prepared, "prepared"}, {InitialState::Ideal, "ideal"}}};
const EnumNames<OffsetMode> kOffsetModes{
    {{OffsetMode::Common, "common"}, {OffsetMode::Probe, "probe"}, {OffsetMode::Symmetric, "symmetric"}}};

struct Key {
    std::string section;  // empty for top level
    std::string name;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;

    std::string full() const { return section.empty() ? name : section + "." + name; }
};

template <class M>
Key real_key(std::string sec, std::string name, M member) {
    Key k{sec, name, nullptr, nullptr};
    const std::string full = k.full();
    k.get = [member](const ExperimentConfig& c) { return fmt_double(member(const_cast<ExperimentConfig&>(c))); };
    k.set = [member, full](ExperimentConfig& c, const std::string& v) { member(c) = parse_double(full, v); };
    return k;
}

template <class M>
Key int_key(std::string sec, std::string name, M member) {
    Key k{sec, name, nullptr, nullptr};
    const std::string full = k.full();
    k.get = [member](const ExperimentConfig& c) { return std::to_string(member(const_cast<ExperimentConfig&>(c))); };
    k.set = [member, full](ExperimentConfig& c, const std::string& v) {
        const long long x = parse_int(full, v);
        if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) bad(full, "out of range");
        member(c) = static_cast<int>(x);
    };
    return k;
}

template <class M>
Key bool_key(std::string sec, std::string name, M member) {
    Key k{sec, name, nullptr, nullptr};
    const std::string full = k.full();
    k.get = [member](const ExperimentConfig& c) {
        return std::string(member(const_cast<ExperimentConfig&>(c)) ? "true" : "false");
    };
    k.set = [member, full](ExperimentConfig& c, const std::string& v) { member(c) = parse_bool(full, v); };
    return k;
}

template <class M>
Key string_key(std::string sec, std::string name, M member) {
    Key k{sec, name, nullptr, nullptr};
    k.get = [member](const ExperimentConfig& c) { return member(const_cast<ExperimentConfig&>(c)); };
    k.set = [member](ExperimentConfig& c, const std::string& v) { member(c) = v; };
    return k;
}

template <class E, class M>
Key enum_key(std::string sec, std::string name, const EnumNames<E>& names, M member) {
    Key k{sec, name, nullptr, nullptr};
    const std::string full = k.full();
    k.get = [&names, member](const ExperimentConfig& c) { return names.name(member(const_cast<ExperimentConfig&>(c))); };
    k.set = [&names, member, full](ExperimentConfig& c, const std::string& v) { member(c) = names.parse(full, v); };
    return k;
}

#define F(path) [](ExperimentConfig& c) -> auto& { return c.path; }

const std::vector<Key>& registry() {
    static const std::vector<Key> keys = [] {
        std::vector<Key> k;
        k.push_back(enum_key("", "scenario", kScenarios, F(scenario)));
        k.push_back({"", "seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
                     [](ExperimentConfig& c, const std::string& v) {
                         std::uint64_t x = 0;
                         const char* end = v.data() + v.size();
                         auto [p, ec] = std::from_chars(v.data(), end, x);
                         if (ec != std::errc() || p != end) bad("seed", "expected a non-negative integer, got '" + v + "'");
                         c.seed = x;
                     }});
        k.push_back(string_key("", "output", F(output)));

        k.push_back(real_key("spin", "delta_nu", F(spin.delta_nu)));
        k.push_back(real_key("spin", "j_coupling", F(spin.j_coupling)));

        k.push_back(bool_key("relaxation", "auto_calibrate", F(relaxation.auto_calibrate)));
        k.push_back(real_key("relaxation", "t1_target", F(relaxation.t1_target)));
        k.push_back(real_key("relaxation", "ts_target", F(relaxation.ts_target)));
        k.push_back(real_key("relaxation", "flip_rate", F(relaxation.flip_rate)));
        k.push_back(real_key("relaxation", "correlated_flip_rate", F(relaxation.correlated_flip_rate)));
        k.push_back(real_key("relaxation", "uncorrelated_dephasing_rate", F(relaxation.uncorrelated_dephasing_rate)));
        k.push_back(real_key("relaxation", "correlated_dephasing_rate", F(relaxation.correlated_dephasing_rate)));

        k.push_back(bool_key("noise", "enabled", F(noise.enabled)));
        k.push_back(real_key("noise", "rms_amplitude", F(noise.rms_amplitude)));
        k.push_back(real_key("noise", "correlation_time", F(noise.correlation_time)));
        k.push_back(real_key("noise", "correlation_coefficient", F(noise.correlation_coefficient)));
        k.push_back(int_key("noise", "trajectories", F(noise.trajectories)));

        k.push_back(real_key("propagation", "dt", F(propagation.dt)));
        k.push_back(real_key("propagation", "dt_free", F(propagation.dt_free)));
        k.push_back(enum_key("propagation", "method", kMethods, F(propagation.method)));

        k.push_back(real_key("lock", "duration", F(lock.duration)));
        k.push_back(real_key("lock", "amplitude", F(lock.amplitude)));
        k.push_back(enum_key("lock", "mode", kLockModes, F(lock.mode)));
        k.push_back(real_key("lock", "rf_inhomogeneity", F(lock.rf_inhomogeneity)));
        k.push_back(int_key("lock", "rf_points", F(lock.rf_points)));

        k.push_back(real_key("eit", "tone_amplitude", F(eit.tone_amplitude)));
        k.push_back(real_key("eit", "segment_duration", F(eit.segment_duration)));
        k.push_back(real_key("eit", "gap", F(eit.gap)));
        k.push_back(real_key("eit", "sample_rate", F(eit.sample_rate)));
        k.push_back(enum_key("eit", "drive", kDrives, F(eit.drive)));
        k.push_back(real_key("eit", "monitor_duration", F(eit.monitor_duration)));
        k.push_back(real_key("eit", "record_interval", F(eit.record_interval)));
        k.push_back(enum_key("eit", "initial_state", kInitial, F(eit.initial_state)));

        k.push_back(real_key("fig4a", "offset_min", F(fig4a.offset_min)));
        k.push_back(real_key("fig4a", "offset_max", F(fig4a.offset_max)));
        k.push_back(real_key("fig4a", "offset_step", F(fig4a.offset_step)));
        k.push_back(int_key("fig4a", "repetitions", F(fig4a.repetitions)));
        k.push_back(enum_key("fig4a", "offset_mode", kOffsetModes, F(fig4a.offset_mode)));

        k.push_back(real_key("fig4b", "ratio_min", F(fig4b.ratio_min)));
        k.push_back(real_key("fig4b", "ratio_max", F(fig4b.ratio_max)));
        k.push_back(real_key("fig4b", "ratio_step", F(fig4b.ratio_step)));
        k.push_back(int_key("fig4b", "repetitions", F(fig4b.repetitions)));

        k.push_back(real_key("spectra", "dt", F(spectra.dt)));
        k.push_back(real_key("spectra", "acquisition", F(spectra.acquisition)));
        k.push_back(int_key("spectra", "zero_fill", F(spectra.zero_fill)));
        k.push_back(real_key("spectra", "broadening", F(spectra.broadening)));
        k.push_back(real_key("spectra", "probe_duration", F(spectra.probe_duration)));
        k.push_back(real_key("spectra", "window", F(spectra.window)));

        k.push_back(int_key("optimize", "segments", F(optimize.segments)));
        k.push_back(real_key("optimize", "init_amplitude", F(optimize.init_amplitude)));
        k.push_back(int_key("optimize", "budget", F(optimize.budget)));
        k.push_back(real_key("optimize", "w_dark", F(optimize.w_dark)));
        k.push_back(real_key("optimize", "sample_rate", F(optimize.sample_rate)));
        k.push_back(string_key("optimize", "pulse_out", F(optimize.pulse_out)));
        k.push_back(string_key("optimize", "history_out", F(optimize.history_out)));
        return k;
    }();
    return keys;
}

#undef F

const Key* find_key(const std::string& section, const std::string& name) {
    for (const auto& k : registry())
        if (k.section == section && k.name == name) return &k;
    return nullptr;
}

bool known_section(const std::string& s) {
    for (const auto& k : registry())
        if (k.section == s) return true;
    return false;
}

void check(bool ok, const std::string& key, const std::string& what) {
    if (!ok) bad(key, what);
}

bool finite(double v) { return std::isfinite(v); }

void check_multiple(double interval, double dt, const std::string& key, const std::string& of) {
    const double r = interval / dt;
    check(std::abs(r - std::round(r)) <= 1e-9 * r && std::round(r) >= 1.0, key,
          "must be an integer multiple of " + of);
}

ExperimentConfig parse_impl(const std::string& text, const Scenario* fallback) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    std::set<std::string> seen;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw Error(Errc::ParseError, where + "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!known_section(section)) throw Error(Errc::UnknownKey, where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(Errc::ParseError, where + "expected key = value");
        const std::string name = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (name.empty()) throw Error(Errc::ParseError, where + "empty key");
        const Key* k = find_key(section, name);
        const std::string full = section.empty() ? name : section + "." + name;
        if (!k) throw Error(Errc::UnknownKey, where + "unknown key '" + full + "'");
        if (!seen.insert(full).second) throw Error(Errc::ParseError, where + "duplicate key '" + full + "'");
        try {
            k->set(cfg, value);
        } catch (const Error& e) {
            throw Error(Errc::InvalidValue, where + e.what());
        }
    }
    if (!seen.count("scenario")) {
        if (!fallback) throw Error(Errc::ParseError, "missing required key 'scenario'");
        cfg.scenario = *fallback;
    }
    cfg.validate();
    return cfg;
}

}  // namespace

std::string to_string(Scenario s) { return kScenarios.name(s); }
Scenario parse_scenario(const std::string& name) { return kScenarios.parse("scenario", name); }

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    return scenario == o.scenario && seed == o.seed && output == o.output &&
           spin.delta_nu == o.spin.delta_nu && spin.j_coupling == o.spin.j_coupling && relaxation == o.relaxation &&
           noise == o.noise && propagation == o.propagation && lock == o.lock && eit == o.eit && fig4a == o.fig4a &&
           fig4b == o.fig4b && spectra == o.spectra && optimize == o.optimize;
}

void ExperimentConfig::validate() const {
    check(finite(spin.delta_nu) && std::abs(spin.delta_nu) <= 1e5, "spin.delta_nu", "must be finite, |value| <= 1e5 Hz");
    check(finite(spin.j_coupling) && std::abs(spin.j_coupling) <= 1e3, "spin.j_coupling",
          "must be finite, |value| <= 1e3 Hz");

    const auto& r = relaxation;
    check(finite(r.t1_target) && r.t1_target > 0.0, "relaxation.t1_target", "must be > 0");
    check(finite(r.ts_target) && r.ts_target > 0.0, "relaxation.ts_target", "must be > 0");
    check(finite(r.flip_rate) && r.flip_rate >= 0.0, "relaxation.flip_rate", "must be >= 0");
    check(finite(r.correlated_flip_rate) && r.correlated_flip_rate >= 0.0, "relaxation.correlated_flip_rate",
          "must be >= 0");
    check(finite(r.uncorrelated_dephasing_rate) && r.uncorrelated_dephasing_rate >= 0.0,
          "relaxation.uncorrelated_dephasing_rate", "must be >= 0");
    check(finite(r.correlated_dephasing_rate) && r.correlated_dephasing_rate >= 0.0,
          "relaxation.correlated_dephasing_rate", "must be >= 0");

    check(finite(noise.rms_amplitude) && noise.rms_amplitude >= 0.0 && noise.rms_amplitude <= 1e3,
          "noise.rms_amplitude", "must be in [0, 1000] Hz");
    check(finite(noise.correlation_time) && noise.correlation_time > 0.0, "noise.correlation_time", "must be > 0");
    check(noise.correlation_coefficient >= -1.0 && noise.correlation_coefficient <= 1.0,
          "noise.correlation_coefficient", "must be in [-1, 1]");
    check(noise.trajectories >= 1 && noise.trajectories <= 1000000, "noise.trajectories", "must be in [1, 1e6]");

    check(finite(propagation.dt) && propagation.dt > 0.0 && propagation.dt <= 1e-3, "propagation.dt",
          "must be in (0, 1e-3] s");
    check(finite(propagation.dt_free) && propagation.dt_free > 0.0 && propagation.dt_free <= 1e-2,
          "propagation.dt_free", "must be in (0, 1e-2] s");

    check(finite(lock.duration) && lock.duration >= 0.0 && lock.duration <= 1000.0, "lock.duration",
          "must be in [0, 1000] s");
    check(finite(lock.amplitude) && lock.amplitude > 0.0 && lock.amplitude <= 1e5, "lock.amplitude",
          "must be in (0, 1e5] Hz");

    check(finite(lock.rf_inhomogeneity) && lock.rf_inhomogeneity >= 0.0 && lock.rf_inhomogeneity <= 0.3,
          "lock.rf_inhomogeneity", "must be in [0, 0.3]");
    check(lock.rf_points >= 1 && lock.rf_points <= 401, "lock.rf_points", "must be in [1, 401]");

    check(finite(eit.tone_amplitude) && eit.tone_amplitude >= 0.0 && eit.tone_amplitude <= 1e3, "eit.tone_amplitude",
          "must be in [0, 1000] Hz");
    check(finite(eit.segment_duration) && eit.segment_duration > 0.0 && eit.segment_duration <= 10.0,
          "eit.segment_duration", "must be in (0, 10] s");
    check(finite(eit.gap) && eit.gap >= 0.0 && eit.gap <= 10.0, "eit.gap", "must be in [0, 10] s");
    check(finite(eit.sample_rate) && eit.sample_rate > 0.0 && eit.sample_rate <= 1e6, "eit.sample_rate",
          "must be in (0, 1e6] Hz");
    check(finite(eit.monitor_duration) && eit.monitor_duration > 0.0 && eit.monitor_duration <= 100.0,
          "eit.monitor_duration", "must be in (0, 100] s");
    check(finite(eit.record_interval) && eit.record_interval > 0.0 && eit.record_interval <= eit.monitor_duration,
          "eit.record_interval", "must be in (0, monitor_duration]");
    check_multiple(eit.record_interval, propagation.dt, "eit.record_interval", "propagation.dt");
    check_multiple(eit.record_interval, propagation.dt_free, "eit.record_interval", "propagation.dt_free");
    check_multiple(eit.monitor_duration, eit.record_interval, "eit.monitor_duration", "eit.record_interval");

    check(finite(fig4a.offset_min) && finite(fig4a.offset_max) && fig4a.offset_max >= fig4a.offset_min,
          "fig4a.offset_max", "must be >= fig4a.offset_min");
    check(finite(fig4a.offset_step) && fig4a.offset_step > 0.0, "fig4a.offset_step", "must be > 0");
    check((fig4a.offset_max - fig4a.offset_min) / fig4a.offset_step <= 10000.0, "fig4a.offset_step",
          "grid exceeds 10001 points");
    check(fig4a.repetitions >= 1 && fig4a.repetitions <= 1000, "fig4a.repetitions", "must be in [1, 1000]");
    check(finite(fig4b.ratio_min) && fig4b.ratio_min >= 0.0, "fig4b.ratio_min", "must be >= 0");
    check(finite(fig4b.ratio_max) && fig4b.ratio_max >= fig4b.ratio_min, "fig4b.ratio_max",
          "must be >= fig4b.ratio_min");
    check(finite(fig4b.ratio_step) && fig4b.ratio_step > 0.0, "fig4b.ratio_step", "must be > 0");
    check((fig4b.ratio_max - fig4b.ratio_min) / fig4b.ratio_step <= 10000.0, "fig4b.ratio_step",
          "grid exceeds 10001 points");
    check(fig4b.repetitions >= 1 && fig4b.repetitions <= 1000, "fig4b.repetitions", "must be in [1, 1000]");

    check(finite(spectra.dt) && spectra.dt > 0.0 && spectra.dt <= 0.01, "spectra.dt", "must be in (0, 0.01] s");
    check(finite(spectra.acquisition) && spectra.acquisition > 0.0 && spectra.acquisition <= 30.0,
          "spectra.acquisition", "must be in (0, 30] s");
    check(spectra.acquisition / spectra.dt >= 2.0, "spectra.acquisition", "must cover at least 2 points");
    check(spectra.zero_fill >= 0 && spectra.zero_fill <= (1 << 22), "spectra.zero_fill", "must be in [0, 4194304]");
    check(finite(spectra.broadening) && spectra.broadening >= 0.0, "spectra.broadening", "must be >= 0");
    check(finite(spectra.probe_duration) && spectra.probe_duration > 0.0 && spectra.probe_duration <= 10.0,
          "spectra.probe_duration", "must be in (0, 10] s");
    check(finite(spectra.window) && spectra.window > 0.0, "spectra.window", "must be > 0");

    check(optimize.segments >= 2 && optimize.segments <= 10, "optimize.segments", "must be in [2, 10]");
    check(finite(optimize.init_amplitude) && optimize.init_amplitude >= 0.0 && optimize.init_amplitude <= 12.0,
          "optimize.init_amplitude", "must be in [0, 12] Hz");
    check(optimize.budget >= 1 && optimize.budget <= 1000000, "optimize.budget", "must be in [1, 1e6]");
    check(finite(optimize.w_dark) && optimize.w_dark >= 0.0 && optimize.w_dark <= 1.0, "optimize.w_dark",
          "must be in [0, 1]");
    check(finite(optimize.sample_rate) && optimize.sample_rate > 0.0 && optimize.sample_rate <= 1e6,
          "optimize.sample_rate", "must be in (0, 1e6] Hz");
}

ExperimentConfig parse_config(const std::string& text) { return parse_impl(text, nullptr); }

ExperimentConfig parse_config(const std::string& text, Scenario fallback) { return parse_impl(text, &fallback); }

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Io, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    std::string section;
    for (const auto& k : registry()) {
        if (k.section != section) {
            section = k.section;
            os << "\n[" << section << "]\n";
        }
        os << k.name << " = " << k.get(cfg) << "\n";
    }
    return os.str();
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw Error(Errc::ParseError, "override '" + assignment + "': expected key=value");
    const std::string full = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    const auto dot = full.find('.');
    const std::string section = dot == std::string::npos ? "" : full.substr(0, dot);
    const std::string name = dot == std::string::npos ? full : full.substr(dot + 1);
    const Key* k = find_key(section, name);
    if (!k) throw Error(Errc::UnknownKey, "unknown key '" + full + "'");
    ExperimentConfig next = cfg;
    k->set(next, value);
    next.validate();
    cfg = next;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& k : registry()) out.push_back(k.full());
    return out;
}

}  // namespace darksim
