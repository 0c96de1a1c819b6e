#pragma once

// Dense complex operator algebra on small Hilbert spaces.
// Units: hbar = k_B = 1, energies and frequencies in angular-frequency units.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace htme {

using cxd = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Error with a machine-readable code. Codes: "dim_mismatch", "invalid_arg",
/// "not_hermitian", "not_density", "degenerate_kernel", "leakage",
/// "mode_mismatch", "config", "numerical".
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

inline Operator identity(int n) { return Operator::Identity(n, n); }

inline Operator zero(int n) { return Operator::Zero(n, n); }

enum class Axis { x, y, z, plus, minus };

inline Operator pauli(Axis a) {
    Operator m(2, 2);
    switch (a) {
    case Axis::x: m << 0, 1, 1, 0; break;
    case Axis::y: m << 0, cxd(0, -1), cxd(0, 1), 0; break;
    case Axis::z: m << 1, 0, 0, -1; break;
    case Axis::plus: m << 0, 1, 0, 0; break;
    case Axis::minus: m << 0, 0, 1, 0; break;
    }
    return m;
}

inline Operator dagger(const Operator& a) { return a.adjoint(); }

inline Operator commutator(const Operator& a, const Operator& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error("dim_mismatch", "commutator: operand dimensions differ");
    return a * b - b * a;
}

inline cxd hs_inner(const Operator& a, const Operator& b) {
    if (a.rows() != b.rows())
        throw Error("dim_mismatch", "hs_inner: operand dimensions differ");
    return (a.adjoint() * b).trace();
}

inline double hs_norm(const Operator& a) { return a.norm(); }

inline Operator matrix_exp(const Operator& a) { return a.exp(); }

inline Operator hermitian_part(const Operator& a) { return (a + a.adjoint()) / 2.0; }

inline bool is_hermitian(const Operator& a, double tol) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Ascending real eigenvalues and the orthonormal eigenvector matrix.
inline std::pair<Eigen::VectorXd, Operator> hermitian_eig(const Operator& a) {
    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (!is_hermitian(a, 1e-10 * scale))
        throw Error("not_hermitian", "hermitian_eig: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Operator> es(a);
    if (es.info() != Eigen::Success)
        throw Error("numerical", "hermitian_eig: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

/// Places op at the given 1-based site of an n_sites chain of equal local dims.
inline Operator embed(const Operator& op, int site, int n_sites) {
    if (site < 1 || site > n_sites)
        throw Error("invalid_arg", "embed: site out of range");
    Operator out = Operator::Identity(1, 1);
    int d = static_cast<int>(op.rows());
    for (int s = 1; s <= n_sites; ++s) {
        const Operator& factor = (s == site) ? op : identity(d);
        Operator next(out.rows() * factor.rows(), out.cols() * factor.cols());
        for (int i = 0; i < out.rows(); ++i)
            for (int j = 0; j < out.cols(); ++j)
                next.block(i * factor.rows(), j * factor.cols(), factor.rows(),
                           factor.cols()) = out(i, j) * factor;
        out = std::move(next);
    }
    return out;
}

inline Operator kron(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Hermitian, unit-trace matrix with a configurable positivity floor.
/// The linear-response generators are not completely positive maps, so
/// states arising mid-evolution may dip slightly below zero.
struct DensityMatrix {
    Operator op;

    static DensityMatrix make(const Operator& m, double pos_tol = -1e-10) {
        if (m.rows() != m.cols())
            throw Error("invalid_arg", "density matrix must be square");
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
            throw Error("not_density", "density matrix not Hermitian to 1e-12");
        if (std::abs(m.trace() - cxd(1.0, 0.0)) > 1e-12)
            throw Error("not_density", "density matrix trace differs from 1");
        Eigen::SelfAdjointEigenSolver<Operator> es(m);
        if (es.eigenvalues().minCoeff() < pos_tol)
            throw Error("not_density", "density matrix has eigenvalue below " +
                                           std::to_string(pos_tol));
        return DensityMatrix{m};
    }

    int dim() const { return static_cast<int>(op.rows()); }
    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Operator> es(op);
        return es.eigenvalues().minCoeff();
    }
};

/// Hilbert-Schmidt orthonormal operator set; at most one element may carry
/// nonzero trace (the designated identity element).
struct OperatorBasis {
    int dim = 0;
    std::vector<Operator> elements;
    std::vector<std::string> labels;
    int identity_index = -1; // -1 when no identity element present

    void validate() const {
        for (size_t i = 0; i < elements.size(); ++i) {
            for (size_t j = 0; j < elements.size(); ++j) {
                cxd g = hs_inner(elements[i], elements[j]);
                double expect = (i == j) ? 1.0 : 0.0;
                if (std::abs(g - expect) > 1e-12)
                    throw Error("invalid_arg",
                                "operator basis not orthonormal at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
            }
            if (static_cast<int>(i) != identity_index &&
                std::abs(elements[i].trace()) > 1e-12)
                throw Error("invalid_arg", "non-identity basis element has trace");
        }
    }

    int index_of(const std::string& label) const {
        for (size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return static_cast<int>(i);
        throw Error("invalid_arg", "basis label not found: " + label);
    }
};

/// Two-spin-1/2 diagonal-subspace basis, labels {I, Z, S, D}:
/// identity, total I_z, I1.I2 (singlet order), T_20 (secular dipolar tensor).
/// Non-identity elements carry unit Hilbert-Schmidt norm.
inline OperatorBasis spin_pair_basis() {
    Operator iz1 = embed(0.5 * pauli(Axis::z), 1, 2);
    Operator iz2 = embed(0.5 * pauli(Axis::z), 2, 2);
    Operator ix1 = embed(0.5 * pauli(Axis::x), 1, 2);
    Operator ix2 = embed(0.5 * pauli(Axis::x), 2, 2);
    Operator iy1 = embed(0.5 * pauli(Axis::y), 1, 2);
    Operator iy2 = embed(0.5 * pauli(Axis::y), 2, 2);

    Operator iz = iz1 + iz2;
    Operator dot = ix1 * ix2 + iy1 * iy2 + iz1 * iz2;
    Operator t20 = 3.0 * (iz1 * iz2) - dot;

    OperatorBasis b;
    b.dim = 4;
    b.identity_index = 0;
    b.labels = {"I", "Z", "S", "D"};
    b.elements = {identity(4) / 2.0, iz / iz.norm(), dot / dot.norm(),
                  t20 / t20.norm()};
    b.validate();
    return b;
}

} // namespace htme
