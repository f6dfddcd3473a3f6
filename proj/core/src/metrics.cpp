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

#include "darksim/metrics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>

namespace darksim {

Op deviation_part(const Op& rho) { return rho - (rho.trace() / 4.0) * Op::Identity(); }

double correlation(const Op& rho_exp, const Op& rho_th) {
    const Op a = deviation_part(rho_exp);
    const Op b = deviation_part(rho_th);
    const double na = a.norm(), nb = b.norm();
    if (na < 1e-12 || nb < 1e-12) throw Error(Errc::ZeroDeviation, "correlation: deviation part vanishes");
    const double c = (a.adjoint() * b).trace().real() / (na * nb);
    return std::clamp(c, -1.0, 1.0);
}

std::array<double, 4> deviation_populations(const Op& rho) {
    return {rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real(), rho(3, 3).real()};
}

std::vector<cplx> simulate_fid(const Op& rho, const SpinParams& p, const RelaxationModel& model, double dt,
                               std::size_t n, double broadening) {
    if (!(dt > 0.0)) throw Error(Errc::InvalidValue, "simulate_fid: dt must be > 0");
    if (dt * static_cast<double>(n) > 30.0 + 1e-9)
        throw Error(Errc::InvalidValue, "simulate_fid: acquisition longer than 30 s");
    const auto& o = spin_operators();
    const Op plus = o.ip1 + o.ip2;
    const Super e = expm(dt * lindblad_superoperator(internal_hamiltonian(p), model));
    std::vector<cplx> out(n);
    SuperVec v = vec(rho);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = (unvec(v) * plus).trace() * std::exp(-broadening * static_cast<double>(k) * dt);
        v = e * v;
    }
    return out;
}

SpectrumResult spectrum_from_fid(const std::vector<cplx>& fid, double dt, std::size_t zero_fill_to,
                                 double broadening) {
    if (fid.size() < 2) throw Error(Errc::InvalidValue, "spectrum_from_fid: need at least 2 points");
    if (!(dt > 0.0)) throw Error(Errc::InvalidValue, "spectrum_from_fid: dt must be > 0");
    const std::size_t n = std::max(fid.size(), zero_fill_to);
    std::vector<cplx> in(n, cplx(0.0, 0.0)), out(n);
    std::copy(fid.begin(), fid.end(), in.begin());
    {
        // planner state is global in FFTW
        static std::mutex mu;
        std::lock_guard<std::mutex> lock(mu);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                          reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    SpectrumResult s;
    s.dt = dt;
    s.n_points = fid.size();
    s.broadening = broadening;
    s.frequency.resize(n);
    s.amplitude.resize(n);
    const std::size_t half = n / 2;
    const double df = 1.0 / (static_cast<double>(n) * dt);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = (i + n - half) % n;
        s.frequency[i] = (static_cast<double>(i) - static_cast<double>(half)) * df;
        s.amplitude[i] = out[src];
    }
    return s;
}

std::vector<SpectralLine> find_lines(const SpectrumResult& s, double rel_threshold) {
    std::vector<double> mag(s.amplitude.size());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(s.amplitude[i]);
    const double top = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
    std::vector<SpectralLine> lines;
    for (std::size_t i = 1; i + 1 < mag.size(); ++i)
        if (mag[i] > mag[i - 1] && mag[i] >= mag[i + 1] && mag[i] >= rel_threshold * top && mag[i] > 0.0)
            lines.push_back({s.frequency[i], mag[i]});
    std::sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) { return a.height > b.height; });
    return lines;
}

void write_spectrum(std::ostream& os, const SpectrumResult& s, bool include_imag) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "# dt_s=%.12g n_points=%zu broadening_per_s=%.12g\n", s.dt, s.n_points,
                  s.broadening);
    os << buf << (include_imag ? "frequency_Hz,real,imag\n" : "frequency_Hz,real\n");
    for (std::size_t i = 0; i < s.frequency.size(); ++i) {
        if (include_imag)
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", s.frequency[i], s.amplitude[i].real(),
                          s.amplitude[i].imag());
        else
            std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", s.frequency[i], s.amplitude[i].real());
        os << buf;
    }
}

Op perturb_measurement(const Op& rho, double sigma, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, sigma);
    Op noisy = rho;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) noisy(i, j) += cplx(g(rng), g(rng));
    Op h = 0.5 * (noisy + noisy.adjoint());
    h += ((rho.trace() - h.trace()) / 4.0) * Op::Identity();
    return h;
}

double spectral_norm(const Op& h) {
    Eigen::SelfAdjointEigenSolver<Op> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

void InvariantReport::add(const Op& deviation, double scale) {
    max_trace_error = std::max(max_trace_error, std::abs(deviation.trace()));
    max_hermiticity_error = std::max(max_hermiticity_error, (deviation - deviation.adjoint()).norm());
    const Op dm = 0.25 * Op::Identity() + deviation / (4.0 * scale);
    Eigen::SelfAdjointEigenSolver<Op> es(0.5 * (dm + dm.adjoint()), Eigen::EigenvaluesOnly);
    min_eigenvalue = std::min(min_eigenvalue, es.eigenvalues().minCoeff());
    double sum = 0.0;
    for (double v : deviation_populations(deviation)) sum += v;
    max_population_sum = std::max(max_population_sum, std::abs(sum));
    ++checked;
}

bool InvariantReport::ok() const {
    return max_trace_error <= 1e-9 && max_hermiticity_error <= 1e-9 && min_eigenvalue >= -1e-8 &&
           max_population_sum <= 1e-9;
}

}  // namespace darksim
