#pragma once

// Exact propagation of affine generators, steady states, observable
// coefficients, and basis-projected rate matrices.

#include "htme/generators.hpp"
#include "htme/operator_core.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace htme {

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    std::vector<std::string> labels;        // set by observables()
    Eigen::MatrixXd coefficients;           // rows = times, cols = labels
    double max_asymmetry = 0.0;             // worst pre-Hermitization defect
    double min_state_eigenvalue = 0.0;      // reported, not constrained
};

inline std::vector<double> linspace(double a, double b, int n) {
    if (n < 2 || b < a) throw Error("invalid_arg", "bad time grid");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
    return out;
}

/// Exact affine propagation through the augmented homogeneous exponential
/// exp(t [[M, b], [0, 0]]). Output states are re-Hermitized as (X + X†)/2;
/// the discarded asymmetry is recorded. Positivity is checked against
/// pos_tol only (the inhomogeneous generators are not completely positive
/// maps, and far-from-equilibrium inputs may leave the positive cone).
inline Trajectory propagate(const Generator& gen, const DensityMatrix& rho0,
                            const std::vector<double>& times,
                            double pos_tol = -1e-8) {
    if (rho0.dim() != gen.dim)
        throw Error("dim_mismatch", "propagate: state/generator dimension mismatch");
    if (times.empty()) throw Error("invalid_arg", "propagate: empty time grid");
    for (size_t i = 0; i + 1 < times.size(); ++i)
        if (times[i + 1] <= times[i])
            throw Error("invalid_arg", "propagate: times must be ascending");
    if (times[0] < 0) throw Error("invalid_arg", "propagate: negative start time");
    if (!gen.M.allFinite() || !gen.b.allFinite())
        throw Error("numerical", "propagate: non-finite generator entries");

    int d = gen.dim;
    int n = d * d;
    Superop aug = Superop::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = gen.M;
    aug.topRightCorner(n, 1) = gen.b;

    Trajectory traj;
    traj.times = times;
    Vector v(n + 1);
    v.head(n) = vec_op(rho0.op);
    v(n) = 1.0;

    double prev_t = 0.0;
    bool first = true;
    for (double t : times) {
        double dt = t - prev_t;
        if (dt > 0) {
            Superop step = matrix_exp(aug * dt);
            v = step * v;
        }
        prev_t = t;
        Operator x = unvec_op(v.head(n), d);
        double asym = (x - x.adjoint()).cwiseAbs().maxCoeff();
        traj.max_asymmetry = std::max(traj.max_asymmetry, asym);
        Operator h = (x + x.adjoint()) / 2.0;
        h /= h.trace().real(); // absorb O(eps) trace drift
        DensityMatrix dm = DensityMatrix::make(h, pos_tol);
        double mn = dm.min_eigenvalue();
        if (first || mn < traj.min_state_eigenvalue)
            traj.min_state_eigenvalue = mn;
        first = false;
        traj.states.push_back(std::move(dm));
    }
    return traj;
}

/// Solves M vec(rho) + b = 0 with tr(rho) = 1 appended as an extra row.
/// A kernel of dimension > 1 is reported as an error, never resolved by
/// an arbitrary choice.
inline DensityMatrix steady_state(const Generator& gen, double pos_tol = -1e-8) {
    int d = gen.dim;
    int n = d * d;
    Eigen::JacobiSVD<Superop> svd(gen.M);
    double smax = svd.singularValues()(0);
    int nullity = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) <= 1e-10 * std::max(smax, 1e-300)) ++nullity;
    if (nullity > 1)
        throw Error("degenerate_kernel",
                    "steady_state: multiple stationary directions (kernel "
                    "dimension " + std::to_string(nullity) + ")");

    Superop A(n + 1, n);
    A.topRows(n) = gen.M;
    A.bottomRows(1) = vec_op(identity(d)).transpose();
    Vector rhs(n + 1);
    rhs.head(n) = -gen.b;
    rhs(n) = 1.0;
    Vector sol = A.colPivHouseholderQr().solve(rhs);
    double resid = (A * sol - rhs).norm();
    if (resid > 1e-8 * std::max(1.0, rhs.norm()))
        throw Error("numerical", "steady_state: inconsistent linear system");
    Operator x = unvec_op(sol, d);
    Operator h = (x + x.adjoint()) / 2.0;
    h /= h.trace().real();
    return DensityMatrix::make(h, pos_tol);
}

/// Coefficients c_i(t) = Z tr(rho(t) O_i^dagger), Z the Hilbert dimension.
/// Fills traj.labels and traj.coefficients, and also returns the matrix.
inline Eigen::MatrixXd observables(Trajectory& traj, const OperatorBasis& basis) {
    if (traj.states.empty()) throw Error("invalid_arg", "observables: empty trajectory");
    if (basis.dim != traj.states[0].dim())
        throw Error("dim_mismatch", "observables: basis dimension mismatch");
    double Z = basis.dim;
    Eigen::MatrixXd c(traj.states.size(), basis.elements.size());
    for (size_t k = 0; k < traj.states.size(); ++k)
        for (size_t i = 0; i < basis.elements.size(); ++i)
            c(k, i) = Z * std::real(hs_inner(basis.elements[i], traj.states[k].op));
    traj.labels = basis.labels;
    traj.coefficients = c;
    return c;
}

struct RateAnalysis {
    std::vector<std::string> labels;
    Eigen::MatrixXd sigma;                  // d(x)/dt = sigma * x, x_identity = 1
    Eigen::VectorXcd eigenvalues;           // of sigma
    std::map<std::string, double> relaxation_times; // -1/sigma_ii per label
    double leakage = 0.0;                   // relative norm outside the basis span
};

/// Projects the generator onto an orthonormal operator basis. In the
/// coordinates x_i = sqrt(Z) tr(rho O_i^dagger) (so the identity coordinate
/// is the constant 1), the dynamics close as dx/dt = sigma x, with the
/// affine offset absorbed into the identity column. Any part of the action
/// outside the basis span is leakage; above threshold it is an error.
inline RateAnalysis rate_analysis(const Generator& gen, const OperatorBasis& basis,
                                  double leakage_threshold = 1e-6) {
    if (basis.dim != gen.dim)
        throw Error("dim_mismatch", "rate_analysis: basis dimension mismatch");
    if (basis.identity_index < 0)
        throw Error("invalid_arg", "rate_analysis: basis needs an identity element");
    int nb = static_cast<int>(basis.elements.size());
    int d = gen.dim;
    double Z = d;
    double sqrtZ = std::sqrt(Z);

    RateAnalysis out;
    out.labels = basis.labels;
    out.sigma = Eigen::MatrixXd::Zero(nb, nb);

    double worst_leak = 0.0;
    for (int i = 0; i < nb; ++i) {
        Vector img;
        if (i == basis.identity_index)
            // x_I = 1 carries both the identity part of rho and the offset b
            img = (gen.M * vec_op(identity(d)) + Z * gen.b) / sqrtZ;
        else
            img = gen.M * vec_op(basis.elements[i]);
        Operator img_op = unvec_op(img, d);
        Operator proj = zero(d);
        for (int j = 0; j < nb; ++j) {
            cxd s = hs_inner(basis.elements[j], img_op);
            out.sigma(j, i) = std::real(s);
            proj += s * basis.elements[j];
        }
        double pn = proj.norm();
        double leak = (img_op - proj).norm();
        worst_leak = std::max(worst_leak, leak / std::max(pn, 1e-300));
    }
    out.leakage = worst_leak;
    if (worst_leak > leakage_threshold)
        throw Error("leakage", "rate_analysis: generator action leaves the "
                               "operator basis span (relative leakage " +
                                   std::to_string(worst_leak) + ")");

    Eigen::EigenSolver<Eigen::MatrixXd> es(out.sigma);
    out.eigenvalues = es.eigenvalues();
    for (int i = 0; i < nb; ++i) {
        if (i == basis.identity_index) continue;
        double s = out.sigma(i, i);
        out.relaxation_times[basis.labels[i]] =
            (s < 0) ? -1.0 / s : std::numeric_limits<double>::infinity();
    }
    return out;
}

} // namespace htme
