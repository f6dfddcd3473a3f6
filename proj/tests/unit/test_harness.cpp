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
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "darksim/error.hpp"
#include "darksim/harness.hpp"

using namespace darksim;

namespace {

template <class F>
Errc error_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no darksim::Error thrown";
    return Errc::Io;
}

template <class F>
std::string error_text(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

std::string csv(const ResultSeries& rs) {
    std::ostringstream os;
    write_csv(rs, os);
    return os.str();
}

ExperimentConfig quiet(Scenario s) {
    ExperimentConfig c;
    c.scenario = s;
    c.noise.enabled = false;
    return c;
}

std::size_t column(const ResultSeries& rs, const std::string& name) {
    const auto it = std::find(rs.columns.begin(), rs.columns.end(), name);
    EXPECT_NE(it, rs.columns.end()) << name;
    return static_cast<std::size_t>(it - rs.columns.begin());
}

std::string metadata_line(const ResultSeries& rs, const std::string& key) {
    for (const auto& m : rs.metadata)
        if (m.rfind(key, 0) == 0) return m;
    return "";
}

double metadata_value(const std::string& line, const std::string& key) {
    const auto p = line.find(key + "=");
    if (p == std::string::npos) return std::nan("");
    return std::stod(line.substr(p + key.size() + 1));
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DARKSIM_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string temp_path(const std::string& name) { return ::testing::TempDir() + "darksim_" + name; }

}  // namespace

TEST(Config, DefaultsAreValid) {
    ExperimentConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.spin.delta_nu, 270.3);
    EXPECT_EQ(c.spin.j_coupling, 4.1);
    EXPECT_EQ(c.relaxation.t1_target, 6.3);
    EXPECT_EQ(c.relaxation.ts_target, 12.0);
    EXPECT_EQ(c.lock.amplitude, 2000.0);
    EXPECT_EQ(c.lock.mode, LockMode::Waltz16);
}

TEST(Config, RoundTrip) {
    ExperimentConfig c;
    c.scenario = Scenario::Fig4a;
    c.seed = 123456789012345ULL;
    c.output = "out/fig4a.csv";
    c.spin.delta_nu = 0.1 + 0.2;
    c.noise.correlation_coefficient = -1.0 / 3.0;
    c.propagation.method = Method::Rk4;
    c.lock.mode = LockMode::Cw;
    c.eit.drive = DriveModel::Selective;
    c.eit.initial_state = InitialState::Ideal;
    c.fig4a.offset_mode = OffsetMode::Symmetric;
    c.optimize.w_dark = 0.6;
    c.relaxation.auto_calibrate = false;
    c.relaxation.flip_rate = 0.031;
    const ExperimentConfig back = parse_config(emit_config(c));
    EXPECT_TRUE(back == c);
    EXPECT_EQ(emit_config(back), emit_config(c));
    EXPECT_TRUE(parse_config(emit_config(ExperimentConfig{})) == ExperimentConfig{});
}

TEST(Config, CommentsAndWhitespace) {
    const auto c = parse_config("# header\n  scenario = fig3b  # trailing\n\n[spin]\n j_coupling=5 \n");
    EXPECT_EQ(c.scenario, Scenario::Fig3b);
    EXPECT_EQ(c.spin.j_coupling, 5.0);
    EXPECT_EQ(c.spin.delta_nu, 270.3);
}

TEST(Config, MissingScenario) {
    EXPECT_EQ(error_code([] { (void)parse_config("[spin]\ndelta_nu = 270\n"); }), Errc::ParseError);
    EXPECT_NE(error_text([] { (void)parse_config("seed = 3\n"); }).find("scenario"), std::string::npos);
    EXPECT_EQ(parse_config("seed = 3\n", Scenario::Spectra).scenario, Scenario::Spectra);
}

TEST(Config, UnknownKeysAndSections) {
    EXPECT_EQ(error_code([] { (void)parse_config("scenario = fig3a\n[spin]\nbogus = 1\n"); }), Errc::UnknownKey);
    const std::string msg = error_text([] { (void)parse_config("scenario = fig3a\n\n[nope]\n"); });
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_EQ(error_code([] { (void)parse_config("scenario = fig9\n"); }), Errc::InvalidValue);
}

TEST(Config, MalformedLines) {
    EXPECT_EQ(error_code([] { (void)parse_config("scenario = fig3a\n[spin]\ndelta_nu 3\n"); }), Errc::ParseError);
    EXPECT_EQ(error_code([] { (void)parse_config("scenario = fig3a\nseed = 1\nseed = 2\n"); }), Errc::ParseError);
    EXPECT_EQ(error_code([] { (void)parse_config("scenario = fig3a\n[spin]\ndelta_nu = 3x\n"); }), Errc::InvalidValue);
    EXPECT_EQ(error_code([] { (void)parse_config("scenario = fig3a\n[noise]\nenabled = maybe\n"); }),
              Errc::InvalidValue);
}

TEST(Config, ValidationNamesKey) {
    ExperimentConfig c;
    c.propagation.dt = 0.0;
    const std::string msg = error_text([&] { c.validate(); });
    EXPECT_NE(msg.find("propagation.dt"), std::string::npos) << msg;
    EXPECT_EQ(error_code([] { (void)parse_config("scenario = fig3a\n[propagation]\ndt = 0\n"); }),
              Errc::InvalidValue);
    ExperimentConfig d;
    d.eit.record_interval = 0.1234;
    EXPECT_NE(error_text([&] { d.validate(); }).find("eit.record_interval"), std::string::npos);
}

TEST(Config, Overrides) {
    ExperimentConfig c;
    apply_override(c, "eit.tone_amplitude=5.5");
    EXPECT_EQ(c.eit.tone_amplitude, 5.5);
    apply_override(c, "seed = 11");
    EXPECT_EQ(c.seed, 11u);
    const ExperimentConfig before = c;
    EXPECT_EQ(error_code([&] { apply_override(c, "eit.nothing=1"); }), Errc::UnknownKey);
    EXPECT_EQ(error_code([&] { apply_override(c, "propagation.dt=-1"); }), Errc::InvalidValue);
    EXPECT_EQ(error_code([&] { apply_override(c, "novalue"); }), Errc::ParseError);
    EXPECT_TRUE(c == before);
}

TEST(Config, KeyListCoversEmittedConfig) {
    const auto keys = config_keys();
    std::istringstream is(emit_config(ExperimentConfig{}));
    std::string line, section;
    std::size_t n = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.front() == '[') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const std::string key = (section.empty() ? "" : section + ".") + line.substr(0, line.find(' '));
        EXPECT_NE(std::find(keys.begin(), keys.end(), key), keys.end()) << key;
        ++n;
    }
    EXPECT_EQ(n, keys.size());
}

TEST(Config, LoadMissingFileIsIo) {
    EXPECT_EQ(error_code([] { (void)load_config(temp_path("does_not_exist.cfg")); }), Errc::Io);
}

TEST(ResultSeries, CsvLayout) {
    ResultSeries rs;
    rs.columns = {"time_s", "value"};
    rs.rows = {{0.0, 1.0 / 3.0}, {0.1, -0.0}};
    rs.metadata = {"darksim test", "seed=1"};
    EXPECT_EQ(csv(rs), "# darksim test\n# seed=1\ntime_s,value\n0,0.333333333333\n0.1,0\n");
}

TEST(ResultSeries, Validation) {
    ResultSeries rs;
    rs.columns = {"time_s", "value"};
    rs.rows = {{0.0, 1.0}, {0.0, 2.0}};
    EXPECT_THROW(rs.validate(), Error);
    rs.rows = {{0.0, 1.0}, {0.1}};
    EXPECT_THROW(rs.validate(), Error);
    rs.rows = {{0.0, 1.0}, {0.1, 2.0}};
    EXPECT_NO_THROW(rs.validate());
    EXPECT_EQ(error_code([&] { write_csv(rs, "/nonexistent_dir/x.csv"); }), Errc::Io);
}

TEST(Scenario, Fig3aIdealDarkStateStationary) {
    ExperimentConfig c = quiet(Scenario::Fig3a);
    c.relaxation.auto_calibrate = false;
    c.eit.initial_state = InitialState::Ideal;
    const ResultSeries rs = run_scenario(c);
    ASSERT_EQ(rs.columns.size(), 4u);
    ASSERT_EQ(rs.rows.size(), 31u);
    const std::size_t pc = column(rs, "probe_control");
    for (std::size_t k = 0; k < rs.rows.size(); ++k) {
        EXPECT_NEAR(rs.rows[k][0], 0.1 * k, 1e-12);
        EXPECT_GE(rs.rows[k][pc], 0.995) << "t=" << rs.rows[k][0];
        EXPECT_NEAR(rs.rows[k][column(rs, "free")], 1.0, 1e-9);
    }
    EXPECT_NE(metadata_line(rs, "invariants").find("ok=true"), std::string::npos);
}

TEST(Scenario, Fig3bLeakageExchangesOuterPopulations) {
    ExperimentConfig c = quiet(Scenario::Fig3b);
    c.eit.initial_state = InitialState::Ideal;
    const ResultSeries homo = run_scenario(c);
    c.eit.drive = DriveModel::Selective;
    const ResultSeries sel = run_scenario(c);
    for (const auto& r : homo.rows) EXPECT_NEAR(r[1] + r[2] + r[3] + r[4], 0.0, 1e-9);
    const std::string a = metadata_line(homo, "population_drift"), b = metadata_line(sel, "population_drift");
    const double d00 = metadata_value(a, "P00") - metadata_value(b, "P00");
    const double d11 = metadata_value(a, "P11") - metadata_value(b, "P11");
    // relative to the leakage-free drive, |00> and |11> move against each other
    EXPECT_LT(d00 * d11, 0.0) << d00 << " " << d11;
}

TEST(Scenario, Fig4bPeaksAtEqualAmplitudes) {
    const ResultSeries rs = run_scenario(quiet(Scenario::Fig4b));
    ASSERT_EQ(rs.rows.size(), 41u);
    std::size_t best = 0;
    for (std::size_t k = 0; k < rs.rows.size(); ++k)
        if (rs.rows[k][1] > rs.rows[best][1]) best = k;
    EXPECT_NEAR(rs.rows[best][0], 1.0, 1e-9);
}

TEST(Scenario, DeterministicAcrossRunsAndThreads) {
    ExperimentConfig c;
    c.scenario = Scenario::Fig3b;
    c.noise.trajectories = 6;
    c.eit.monitor_duration = 0.5;
    setenv("DARKSIM_THREADS", "1", 1);
    const std::string a = csv(run_scenario(c));
    setenv("DARKSIM_THREADS", "4", 1);
    const std::string b = csv(run_scenario(c));
    unsetenv("DARKSIM_THREADS");
    const std::string d = csv(run_scenario(c));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, d);
    c.seed = 8;
    EXPECT_NE(csv(run_scenario(c)), a);
}

TEST(Scenario, MetadataCarriesResolvedConfig) {
    ExperimentConfig c = quiet(Scenario::Fig4b);
    c.fig4b.ratio_step = 0.5;
    const ResultSeries rs = run_scenario(c);
    EXPECT_EQ(rs.rows.size(), 5u);
    std::string cfg_text;
    for (const auto& m : rs.metadata)
        if (m.rfind("config ", 0) == 0) cfg_text += m.substr(7) + "\n";
    EXPECT_TRUE(parse_config(cfg_text) == c);
    EXPECT_NE(metadata_line(rs, "seed=").find("7"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    const std::string out = temp_path("fig4b.csv");
    EXPECT_EQ(run_cli("fig4b --set noise.enabled=false --set fig4b.ratio_step=0.5 --out " + out), 0);
    std::ifstream in(out);
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first.rfind("# darksim", 0), 0u);
    EXPECT_EQ(run_cli("fig4b --set fig4b.bogus=1"), 2);
    EXPECT_EQ(run_cli("fig4b --set propagation.dt=0"), 2);
    EXPECT_EQ(run_cli("fig4b --config " + temp_path("missing.cfg")), 2);
    EXPECT_EQ(run_cli("fig4b --no-such-flag"), 2);
    EXPECT_EQ(run_cli("fig4b --print-config"), 0);
    // singlet lifetime beyond reach of any non-negative rates
    EXPECT_EQ(run_cli("lifetimes --set relaxation.ts_target=1000"), 3);
}

TEST(Cli, ConfigFileScenarioMustMatch) {
    const std::string path = temp_path("fig3a.cfg");
    std::ofstream(path) << "scenario = fig3a\n";
    EXPECT_EQ(run_cli("fig4b --config " + path), 2);
}
