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

#include <array>
#include <iosfwd>
#include <random>
#include <vector>

#include "darksim/dynamics.hpp"
#include "darksim/spinsys.hpp"

namespace darksim {

Op deviation_part(const Op& rho);  // rho - tr(rho)/4

// Normalized trace overlap of the traceless parts; ZeroDeviation if either part vanishes.
double correlation(const Op& rho_exp, const Op& rho_th);

std::array<double, 4> deviation_populations(const Op& rho);

// s(k) = tr(rho(k dt) (I+^1 + I+^2)) exp(-broadening k dt), free evolution under the internal Hamiltonian.
std::vector<cplx> simulate_fid(const Op& rho, const SpinParams& p, const RelaxationModel& model, double dt,
                               std::size_t n, double broadening);

struct SpectrumResult {
    std::vector<double> frequency;  // Hz, ascending, zero-centered
    std::vector<cplx> amplitude;    // unnormalized DFT
    double dt = 0.0;
    std::size_t n_points = 0;  // acquired points before zero filling
    double broadening = 0.0;
};

// DFT with kernel exp(-i 2 pi f k dt). zero_fill_to > n pads with zeros to that length.
SpectrumResult spectrum_from_fid(const std::vector<cplx>& fid, double dt, std::size_t zero_fill_to = 0,
                                 double broadening = 0.0);

struct SpectralLine {
    double frequency;
    double height;
};

// Local maxima of |amplitude| above rel_threshold * max, strongest first.
std::vector<SpectralLine> find_lines(const SpectrumResult& s, double rel_threshold = 0.05);

void write_spectrum(std::ostream& os, const SpectrumResult& s, bool include_imag = false);

// Additive Gaussian perturbation of every entry, then Hermitian and trace restoration.
Op perturb_measurement(const Op& rho, double sigma, std::mt19937_64& rng);

// Running checks over recorded deviation matrices. Positivity is tested on the density matrix
// 1/4 + dev / (4 scale), with scale the spectral norm of the initial deviation, which is a valid
// state at t = 0 and stays one under any trace-preserving unital completely positive evolution.
struct InvariantReport {
    double max_trace_error = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 1.0;
    double max_population_sum = 0.0;
    std::size_t checked = 0;

    void add(const Op& deviation, double scale);
    bool ok() const;
};

double spectral_norm(const Op& h);

}  // namespace darksim
