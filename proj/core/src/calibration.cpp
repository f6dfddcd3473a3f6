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

#include <cmath>
#include <limits>
#include <sstream>

#include "darksim/dynamics.hpp"

namespace darksim {

double exponential_time_constant(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size() || t.size() < 2)
        throw Error(Errc::DimMismatch, "exponential_time_constant: need matching series of length >= 2");
    double st = 0, sy = 0, stt = 0, sty = 0;
    const double n = static_cast<double>(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!(y[k] > 0.0)) throw Error(Errc::InvalidValue, "exponential_time_constant: signal must stay positive");
        const double ly = std::log(y[k]);
        st += t[k];
        sy += ly;
        stt += t[k] * t[k];
        sty += t[k] * ly;
    }
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    if (slope >= 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / slope;
}

namespace {

double decay_constant(const Op& h, const RelaxationModel& model, const Op& rho0, const Op& observable, double window,
                      int samples, double sign) {
    if (samples < 2 || !(window > 0.0)) throw Error(Errc::InvalidValue, "lifetime protocol needs window > 0, samples >= 2");
    const double step = window / (samples - 1);
    const Super e = expm(step * lindblad_superoperator(h, model));
    std::vector<double> t(samples), y(samples);
    SuperVec v = vec(rho0);
    for (int k = 0; k < samples; ++k) {
        t[k] = k * step;
        y[k] = sign * (observable * unvec(v)).trace().real();
        v = e * v;
    }
    return exponential_time_constant(t, y);
}

RelaxationModel make_model(double total, double uncorrelated_fraction, const FitOptions& o) {
    RelaxationModel m;
    m.flip_rate = uncorrelated_fraction * total;
    m.correlated_flip_rate = (1.0 - uncorrelated_fraction) * total;
    m.uncorrelated_dephasing_rate = o.uncorrelated_dephasing_rate;
    m.correlated_dephasing_rate = o.correlated_dephasing_rate;
    return m;
}

}  // namespace

double measure_t1(const RelaxationModel& model, const SpinParams& p, const LifetimeProtocol& protocol) {
    const auto& o = spin_operators();
    return decay_constant(internal_hamiltonian(p), model, Op(-o.iz1 + o.iz2), o.iz1, protocol.t1_window,
                          protocol.samples, -1.0);
}

double measure_ts(const RelaxationModel& model, const SpinParams& p, const RFField& lock_field,
                  const LifetimeProtocol& protocol) {
    const Op ps = projector(singlet_triplet_states().s0);
    const Op q = ps - (Op::Identity() - ps) / 3.0;
    const Op h = internal_hamiltonian(p) + rf_hamiltonian(lock_field, 0.0);
    return decay_constant(h, model, Op(ps - 0.25 * Op::Identity()), q, protocol.ts_window, protocol.samples, 1.0);
}

RelaxationModel fit_relaxation_rates(double t1_target, double ts_target, const RFField& lock_field,
                                     const FitOptions& options) {
    if (!(t1_target > 0.0) || !(ts_target > 0.0))
        throw Error(Errc::InvalidValue, "fit_relaxation_rates: targets must be positive");

    // total flip rate hitting the T1 target at a given uncorrelated fraction
    auto solve_total = [&](double fraction) {
        auto t1_of = [&](double total) { return measure_t1(make_model(total, fraction, options), options.spin, options.protocol); };
        double lo = 1e-3 / t1_target, hi = 1.0 / t1_target;
        while (t1_of(hi) > t1_target) {
            hi *= 2.0;
            if (hi > 1e6 / t1_target) throw Error(Errc::Infeasible, "T1 target unreachable");
        }
        if (t1_of(lo) < t1_target) {
            std::ostringstream os;
            os << "T1 target " << t1_target << " s exceeds the dephasing-limited value " << t1_of(lo) << " s";
            throw Error(Errc::Infeasible, os.str());
        }
        for (int it = 0; it < 60 && hi / lo > 1.0 + 1e-10; ++it) {
            const double mid = std::sqrt(lo * hi);
            (t1_of(mid) > t1_target ? lo : hi) = mid;
        }
        return std::sqrt(lo * hi);
    };
    auto ts_of = [&](double fraction) {
        return measure_ts(make_model(solve_total(fraction), fraction, options), options.spin, lock_field,
                          options.protocol);
    };

    if (!options.allow_correlated_flips) {
        const RelaxationModel m = make_model(solve_total(1.0), 1.0, options);
        const double ts = measure_ts(m, options.spin, lock_field, options.protocol);
        if (std::abs(ts - ts_target) > 0.02 * ts_target) {
            std::ostringstream os;
            os << "Ts target " << ts_target << " s unreachable with uncorrelated flips only; achievable Ts = " << ts
               << " s at T1 = " << t1_target << " s";
            throw Error(Errc::Infeasible, os.str());
        }
        return m;
    }

    const double ts_min = ts_of(1.0);
    const double ts_max = ts_of(0.0);
    if (ts_target < ts_min || ts_target > ts_max) {
        std::ostringstream os;
        os << "Ts target " << ts_target << " s outside achievable range [" << ts_min << ", " << ts_max
           << "] s at T1 = " << t1_target << " s";
        throw Error(Errc::Infeasible, os.str());
    }
    double lo = 0.0, hi = 1.0;  // Ts decreases with the uncorrelated fraction
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ts_of(mid) > ts_target ? lo : hi) = mid;
    }
    const double fraction = 0.5 * (lo + hi);
    return make_model(solve_total(fraction), fraction, options);
}

}  // namespace darksim
