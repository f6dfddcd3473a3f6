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

#include <complex>

#include <Eigen/Dense>

#include "darksim/error.hpp"

namespace darksim {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Op = Eigen::Matrix4cd;
using Ket = Eigen::Vector4cd;
using Super = Eigen::Matrix<cplx, 16, 16>;
using SuperVec = Eigen::Matrix<cplx, 16, 1>;

inline constexpr double kStructuralTol = 1e-12;
inline constexpr double kOracleTol = 1e-10;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

Matrix kron(const Matrix& a, const Matrix& b);

// Relative to the largest entry, so Hz-scale Hamiltonians are judged fairly.
template <class Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, double tol = kStructuralTol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

template <class Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& a, double tol = kStructuralTol) {
    if (a.rows() != a.cols()) return false;
    using Plain = typename Derived::PlainObject;
    const Plain id = Plain::Identity(a.rows(), a.cols());
    return (a.adjoint() * a - id).cwiseAbs().maxCoeff() <= tol;
}

// exp(-i * angle_scale * h) for Hermitian h, via eigendecomposition.
template <class Derived>
typename Derived::PlainObject mat_exp_hermitian(const Eigen::MatrixBase<Derived>& h,
                                                double angle_scale) {
    using Plain = typename Derived::PlainObject;
    if (!is_hermitian(h)) throw Error(Errc::NotHermitian, "mat_exp_hermitian: generator is not Hermitian");
    Plain sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Plain> es(sym);
    const auto& v = es.eigenvectors();
    const auto& w = es.eigenvalues();
    Plain rotated = v;
    for (Eigen::Index k = 0; k < w.size(); ++k)
        rotated.col(k) *= std::polar(1.0, -angle_scale * w(k));
    return rotated * v.adjoint();
}

cplx frobenius_inner(const Matrix& a, const Matrix& b);

template <class A, class B>
auto commutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return (a * b - b * a).eval();
}

// Column-stacking vectorization: vec(A X B) = (B^T kron A) vec(X).
SuperVec vec(const Op& m);
Op unvec(const SuperVec& v);

// Superoperator helpers for the 4x4 space.
Super left_mult(const Op& a);   // X -> A X
Super right_mult(const Op& b);  // X -> X B

// General matrix exponential for (non-Hermitian) generators.
Super expm(const Super& g);
Matrix expm_general(const Matrix& g);

// Binary powering.
Super matrix_power(const Super& s, long long n);

}  // namespace darksim
