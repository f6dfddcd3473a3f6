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

#include "darksim/numlin.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace darksim {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

cplx frobenius_inner(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(Errc::DimMismatch, "frobenius_inner: operand shapes differ");
    return (a.adjoint() * b).trace();
}

SuperVec vec(const Op& m) {
    SuperVec v;
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) v(4 * c + r) = m(r, c);
    return v;
}

Op unvec(const SuperVec& v) {
    Op m;
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) m(r, c) = v(4 * c + r);
    return m;
}

Super left_mult(const Op& a) {
    Super s = Super::Zero();
    for (int c = 0; c < 4; ++c) s.block<4, 4>(4 * c, 4 * c) = a;
    return s;
}

Super right_mult(const Op& b) {
    // (B^T kron 1)
    Super s = Super::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            s.block<4, 4>(4 * i, 4 * j) = b(j, i) * Op::Identity();
    return s;
}

Super expm(const Super& g) {
    Super out = g.exp();
    return out;
}

Matrix expm_general(const Matrix& g) {
    Matrix out = g.exp();
    return out;
}

Super matrix_power(const Super& s, long long n) {
    Super result = Super::Identity();
    Super base = s;
    while (n > 0) {
        if (n & 1) result = base * result;
        n >>= 1;
        if (n) base = base * base;
    }
    return result;
}

}  // namespace darksim
