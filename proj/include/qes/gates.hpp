#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "qes/channels.hpp"
#include "qes/errors.hpp"

namespace qes {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Complex amplitude vector over a composite computational basis.
/// Index convention is row-major over the dims signature: for dims (d0,d1,...)
/// the basis ket |i0,i1,...> sits at flat index ((i0*d1)+i1)*d2 + ...
struct QuditState {
    std::vector<int> dims;
    Vector amplitudes;
};

/// Primitive root of unity for a D-dimensional system.
inline Complex root_of_unity(int dim, long long power = 1) {
    double angle = 2.0 * std::numbers::pi * static_cast<double>(power) / dim;
    return {std::cos(angle), std::sin(angle)};
}

/// F = (1/sqrt(D)) sum_{n,q} e^{2pi i nq/D} |n><q|
inline Matrix fourier(int dim) {
    Matrix f(dim, dim);
    double norm = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int n = 0; n < dim; ++n)
        for (int q = 0; q < dim; ++q)
            f(n, q) = norm * root_of_unity(dim, static_cast<long long>(n) * q);
    return f;
}

/// Z^l with Z|n> = e^{2pi i n/D}|n>.
inline Matrix phase_op(int dim, int power = 1) {
    Matrix z = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n)
        z(n, n) = root_of_unity(dim, static_cast<long long>(n) * power);
    return z;
}

/// X^u with X|n> = |n+1 mod D>.
inline Matrix shift_op(int dim, int power = 1) {
    Matrix x = Matrix::Zero(dim, dim);
    int u = ((power % dim) + dim) % dim;
    for (int n = 0; n < dim; ++n)
        x((n + u) % dim, n) = 1.0;
    return x;
}

/// Hybrid controlled modular subtraction |m>_C |r>_T -> |m>_C |m-r mod D_T>_T,
/// materialized on the composite control (x) target space, row-major.
inline Matrix hybrid_gxor(int dim_control, int dim_target) {
    int n = dim_control * dim_target;
    Matrix g = Matrix::Zero(n, n);
    for (int m = 0; m < dim_control; ++m)
        for (int r = 0; r < dim_target; ++r) {
            int out = detail::mod_sub(m, r, dim_target);
            g(m * dim_target + out, m * dim_target + r) = 1.0;
        }
    return g;
}

/// Generalized Bell state |Psi_ls> = (1/sqrt(D_A)) sum_q w^{-ql} |q>|q-s mod dim_b>
/// on a (dim_a, dim_b) bipartite space. dim_b = dim_a recovers the usual basis.
inline QuditState generalized_bell(int dim_a, int dim_b, int l, int s) {
    if (l < 0 || l >= dim_a)
        throw index_out_of_range_error("bell label l out of range");
    QuditState st;
    st.dims = {dim_a, dim_b};
    st.amplitudes = Vector::Zero(dim_a * dim_b);
    double norm = 1.0 / std::sqrt(static_cast<double>(dim_a));
    s = ((s % dim_b) + dim_b) % dim_b;
    for (int q = 0; q < dim_a; ++q) {
        int t = detail::mod_sub(q, s, dim_b);
        st.amplitudes[q * dim_b + t] = norm * root_of_unity(dim_a, -static_cast<long long>(q) * l);
    }
    return st;
}

inline QuditState generalized_bell(int dim_a, int l, int s) {
    return generalized_bell(dim_a, dim_a, l, s);
}

/// |nu_ls> = sum_m Gamma_ms w^{ml} |m> = Z^l |nu_0s>, the symmetric set member.
inline QuditState nu_state(const SetProfile& profile, int l) {
    int dim = static_cast<int>(profile.gamma.size());
    QuditState st;
    st.dims = {dim};
    st.amplitudes = Vector::Zero(dim);
    for (int m = 0; m < dim; ++m)
        st.amplitudes[m] = profile.gamma[m] * root_of_unity(dim, static_cast<long long>(m) * l);
    return st;
}

/// Phase-insensitive overlap |<a|b>|^2.
inline double overlap2(const Vector& a, const Vector& b) {
    return std::norm(a.dot(b));
}

inline bool is_unitary(const Matrix& u, double tol = 1e-12) {
    return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

} // namespace qes
