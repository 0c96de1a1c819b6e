#pragma once

// Master-equation right-hand sides as affine superoperators on vec(rho),
// plus the algebraic-identity verifiers used by the check suites.
// Vectorization is column-stacking: vec(X rho Y) = (Y^T kron X) vec(rho).

#include "htme/eigenops.hpp"
#include "htme/operator_core.hpp"
#include "htme/spectral.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace htme {

using Superop = Eigen::MatrixXcd;

inline Vector vec_op(const Operator& r) {
    return Eigen::Map<const Vector>(r.data(), r.size());
}

inline Operator unvec_op(const Vector& v, int d) {
    return Eigen::Map<const Operator>(v.data(), d, d);
}

inline Superop sop_left(const Operator& x) {
    return kron(identity(static_cast<int>(x.rows())), x);
}

inline Superop sop_right(const Operator& y) {
    return kron(y.transpose(), identity(static_cast<int>(y.rows())));
}

inline Superop sop_comm(const Operator& x) { return sop_left(x) - sop_right(x); }

enum class GeneratorKind { lindblad, linearized, htme, arh, double_commutator_only };

inline const char* to_string(GeneratorKind k) {
    switch (k) {
    case GeneratorKind::lindblad: return "lindblad";
    case GeneratorKind::linearized: return "linearized";
    case GeneratorKind::htme: return "htme";
    case GeneratorKind::arh: return "arh";
    case GeneratorKind::double_commutator_only: return "double_commutator_only";
    }
    return "?";
}

enum class EquilibriumFlavor { gibbs, linearized };

/// Reference equilibrium state used by the inhomogeneous generators.
struct EquilibriumSpec {
    EquilibriumFlavor flavor = EquilibriumFlavor::linearized;
    double beta_T = 0.0;
    DensityMatrix value;
};

inline EquilibriumSpec make_equilibrium(const Operator& h_s, double beta_T,
                                        EquilibriumFlavor flavor) {
    int d = static_cast<int>(h_s.rows());
    EquilibriumSpec eq;
    eq.flavor = flavor;
    eq.beta_T = beta_T;
    if (flavor == EquilibriumFlavor::gibbs) {
        Operator g = matrix_exp(-beta_T * h_s);
        g /= g.trace();
        eq.value = DensityMatrix::make((g + g.adjoint()) / 2.0);
    } else {
        Operator lin = (identity(d) - beta_T * h_s) / static_cast<double>(d);
        Eigen::SelfAdjointEigenSolver<Operator> es(lin);
        if (es.eigenvalues().minCoeff() < -1e-12)
            throw Error("invalid_arg",
                        "linearized equilibrium not positive semidefinite; "
                        "beta_T too large for this spectrum");
        eq.value = DensityMatrix::make(lin, -1e-12);
    }
    return eq;
}

struct GeneratorMetadata {
    double beta_T = 0.0;
    SpectralMode mode = SpectralMode::quantum;
    EquilibriumFlavor equilibrium = EquilibriumFlavor::linearized;
    bool has_equilibrium = false;
    Operator rho_eq;
    // per-frequency channel rate matrices (complete-positivity certificates)
    std::map<double, Eigen::MatrixXd> rate_matrices;
};

/// Affine right-hand side drho/dt = unvec(M vec(rho) + b).
struct Generator {
    int dim = 0;
    Superop M;
    Vector b;
    GeneratorKind kind = GeneratorKind::lindblad;
    GeneratorMetadata metadata;

    Operator apply(const Operator& rho) const {
        if (rho.rows() != dim)
            throw Error("dim_mismatch", "generator applied to wrong dimension");
        return unvec_op(M * vec_op(rho) + b, dim);
    }

    /// Homogenized matrix acting identically on unit-trace inputs: M + b tr(.)
    Superop effective_matrix() const {
        Superop out = M;
        Vector tr_row = vec_op(identity(dim)).conjugate();
        out += b * tr_row.transpose();
        return out;
    }
};

namespace detail {

struct PairTerm {
    int a, b;
    double w;
    const Operator* Aa;
    const Operator* Ab;
};

inline std::vector<PairTerm> secular_terms(const std::vector<EigenOperatorSet>& sets) {
    // validates binning consistency as a side effect
    secular_pairs(sets);
    std::vector<PairTerm> out;
    for (size_t a = 0; a < sets.size(); ++a) {
        for (size_t b = 0; b < sets.size(); ++b) {
            for (size_t k = 0; k < sets[a].frequencies.size(); ++k) {
                double w = sets[a].frequencies[k];
                const Operator* other =
                    sets[b].find(w, 1e-12 * std::max(1.0, std::abs(w)));
                if (!other) continue;
                out.push_back({sets[a].channel, sets[b].channel, w,
                               &sets[a].ops[k], other});
            }
        }
    }
    return out;
}

inline void check_dims(const Operator& h_s, const std::vector<EigenOperatorSet>& sets) {
    if (sets.empty()) throw Error("invalid_arg", "no coupling channels supplied");
    for (const auto& s : sets)
        for (const auto& op : s.ops)
            if (op.rows() != h_s.rows())
                throw Error("dim_mismatch", "channel/system dimension mismatch");
}

} // namespace detail

/// Secular Born-Markov (Lindblad-form) generator:
/// -(1/2) sum_{a,b,w} J_ab(w) { [Aa+(w), [Ab(w), rho]]
///                              - (1 - e^{-beta w}) [rho Ab(w), Aa+(w)] }.
/// Pure linear (b = 0); annihilates the Gibbs state when J satisfies
/// detailed balance.
inline Generator build_lindblad(const Operator& h_s,
                                const std::vector<EigenOperatorSet>& channels,
                                const SpectralDensityModel& model) {
    if (model.mode != SpectralMode::quantum)
        throw Error("mode_mismatch",
                    "build_lindblad requires a quantum-mode spectral model");
    detail::check_dims(h_s, channels);
    int d = static_cast<int>(h_s.rows());
    Superop M = Superop::Zero(d * d, d * d);
    std::map<double, Eigen::MatrixXd> rates;
    double beta = model.beta_T;
    for (const auto& t : detail::secular_terms(channels)) {
        double J = eval(model, t.a, t.b, t.w);
        Operator Aad = t.Aa->adjoint();
        Superop T1 = sop_comm(Aad) * sop_comm(*t.Ab);
        Superop T2 = sop_right(*t.Ab * Aad) - sop_left(Aad) * sop_right(*t.Ab);
        M += -0.5 * J * (T1 - (1.0 - std::exp(-beta * t.w)) * T2);
        auto& R = rates[t.w];
        if (R.size() == 0)
            R = Eigen::MatrixXd::Zero(model.n_channels, model.n_channels);
        R(t.a, t.b) = J;
    }
    Generator g;
    g.dim = d;
    g.M = M;
    g.b = Vector::Zero(d * d);
    g.kind = GeneratorKind::lindblad;
    g.metadata.beta_T = beta;
    g.metadata.mode = model.mode;
    g.metadata.rate_matrices = std::move(rates);
    return g;
}

/// Infinite-temperature part alone: -(1/2) sum J_ab(w) [Aa+(w), [Ab(w), rho]].
/// Steady state is the maximally mixed state.
inline Generator build_double_commutator(const Operator& h_s,
                                         const std::vector<EigenOperatorSet>& channels,
                                         const SpectralDensityModel& model) {
    detail::check_dims(h_s, channels);
    int d = static_cast<int>(h_s.rows());
    Superop M = Superop::Zero(d * d, d * d);
    for (const auto& t : detail::secular_terms(channels)) {
        double J = eval(model, t.a, t.b, t.w);
        M += -0.5 * J * (sop_comm(t.Aa->adjoint()) * sop_comm(*t.Ab));
    }
    Generator g;
    g.dim = d;
    g.M = M;
    g.b = Vector::Zero(d * d);
    g.kind = GeneratorKind::double_commutator_only;
    g.metadata.beta_T = model.beta_T;
    g.metadata.mode = model.mode;
    return g;
}

/// High-temperature generator: Gamma_HT(rho - rho_eq) + Gamma'(rho), with
/// Gamma_HT the double-commutator sum over all signed frequencies and
///   Gamma'(rho) = (1/2) sum_{ab,w}   J [Drho [rho_eq, Ab(w)], Aa+(w)]
///               + (1/2) sum_{ab,w>0} J [[rho_eq, Ab(w)], [Aa+(w), Drho]],
/// Drho = Z rho - I, Z the Hilbert dimension. include_second_correction
/// drops the w>0 piece (the contribution some closed-form rate tables
/// neglect as next order in beta_T).
inline Generator build_htme(const Operator& h_s,
                            const std::vector<EigenOperatorSet>& channels,
                            const SpectralDensityModel& model,
                            const EquilibriumSpec& eq,
                            bool include_second_correction = true) {
    if (model.mode != SpectralMode::symmetrized)
        throw Error("mode_mismatch",
                    "build_htme requires a symmetrized-mode spectral model");
    detail::check_dims(h_s, channels);
    int d = static_cast<int>(h_s.rows());
    if (eq.value.dim() != d)
        throw Error("dim_mismatch", "equilibrium dimension mismatch");
    if (std::abs(eq.beta_T - model.beta_T) > 1e-12 * std::max(1.0, model.beta_T))
        throw Error("invalid_arg", "equilibrium/model beta_T mismatch");
    const Operator& req = eq.value.op;
    double Z = d;

    Superop Mht = Superop::Zero(d * d, d * d);
    Superop Gp = Superop::Zero(d * d, d * d); // linear in Drho
    for (const auto& t : detail::secular_terms(channels)) {
        double J = eval(model, t.a, t.b, t.w);
        Operator Aad = t.Aa->adjoint();
        Mht += -0.5 * J * (sop_comm(Aad) * sop_comm(*t.Ab));
        Operator K = commutator(req, *t.Ab);
        // Drho -> [Drho K, Aa+]
        Gp += 0.5 * J * ((sop_right(Aad) - sop_left(Aad)) * sop_right(K));
        if (include_second_correction && t.w > 0.0)
            Gp += 0.5 * J * (sop_comm(K) * sop_comm(Aad));
    }
    Generator g;
    g.dim = d;
    g.M = Mht + Z * Gp;
    g.b = -(Mht * vec_op(req)) - Gp * vec_op(identity(d));
    g.kind = GeneratorKind::htme;
    g.metadata.beta_T = model.beta_T;
    g.metadata.mode = model.mode;
    g.metadata.equilibrium = eq.flavor;
    g.metadata.has_equilibrium = true;
    g.metadata.rho_eq = req;
    return g;
}

/// The weak-order inhomogeneous equation: rho -> Gamma_HT(rho - rho_eq).
inline Generator build_arh(const Operator& h_s,
                           const std::vector<EigenOperatorSet>& channels,
                           const SpectralDensityModel& model,
                           const EquilibriumSpec& eq) {
    if (model.mode != SpectralMode::symmetrized)
        throw Error("mode_mismatch",
                    "build_arh requires a symmetrized-mode spectral model");
    detail::check_dims(h_s, channels);
    int d = static_cast<int>(h_s.rows());
    if (eq.value.dim() != d)
        throw Error("dim_mismatch", "equilibrium dimension mismatch");
    Superop Mht = Superop::Zero(d * d, d * d);
    for (const auto& t : detail::secular_terms(channels)) {
        double J = eval(model, t.a, t.b, t.w);
        Mht += -0.5 * J * (sop_comm(t.Aa->adjoint()) * sop_comm(*t.Ab));
    }
    Generator g;
    g.dim = d;
    g.M = Mht;
    g.b = -(Mht * vec_op(eq.value.op));
    g.kind = GeneratorKind::arh;
    g.metadata.beta_T = model.beta_T;
    g.metadata.mode = model.mode;
    g.metadata.equilibrium = eq.flavor;
    g.metadata.has_equilibrium = true;
    g.metadata.rho_eq = eq.value.op;
    return g;
}

/// First-order Taylor expansion of the Lindblad generator in beta_T w,
/// kept in its pre-rewrite form (pure linear, no offset):
///   -(1/2) sum_{w>=0} Js { [Aa+,[Ab,rho]] + [Ab,[Aa+,rho]] }
///   -(1/2) sum_{w>0}  Js (beta w) { [Aa+, rho Ab] - [Ab, rho Aa+]
///                                   - [Ab,[Aa+,rho]] }
/// where Js is the symmetrized density derived from the quantum model.
inline Generator build_linearized(const Operator& h_s,
                                  const std::vector<EigenOperatorSet>& channels,
                                  const SpectralDensityModel& model) {
    if (model.mode != SpectralMode::quantum)
        throw Error("mode_mismatch",
                    "build_linearized expands a quantum-mode spectral model");
    detail::check_dims(h_s, channels);
    int d = static_cast<int>(h_s.rows());
    double beta = model.beta_T;
    Superop M = Superop::Zero(d * d, d * d);
    for (const auto& t : detail::secular_terms(channels)) {
        if (t.w < 0.0) continue;
        double J = (t.w > 0.0) ? detail::eval_quantum(model, t.b, t.a, -t.w)
                               : detail::eval_quantum(model, t.a, t.b, 0.0);
        Operator Aad = t.Aa->adjoint();
        if (t.w > 0.0)
            // stands in for the +-w mirror pair at once
            M += -0.5 * J *
                 (sop_comm(Aad) * sop_comm(*t.Ab) + sop_comm(*t.Ab) * sop_comm(Aad));
        else
            // w = 0 is self-mirrored; the (b, a) pair term supplies the
            // transposed ordering
            M += -0.5 * J * (sop_comm(Aad) * sop_comm(*t.Ab));
        if (t.w > 0.0) {
            double bw = beta * t.w;
            Superop T1 = sop_left(Aad) * sop_right(*t.Ab) - sop_right(*t.Ab * Aad);
            Superop T2 = sop_left(*t.Ab) * sop_right(Aad) - sop_right(Aad * *t.Ab);
            Superop T3 = sop_comm(*t.Ab) * sop_comm(Aad);
            M += -0.5 * J * bw * (T1 - T2 - T3);
        }
    }
    Generator g;
    g.dim = d;
    g.M = M;
    g.b = Vector::Zero(d * d);
    g.kind = GeneratorKind::linearized;
    g.metadata.beta_T = beta;
    g.metadata.mode = model.mode;
    return g;
}

/// Plain GKSL assembly sum_{ab,w} J_ab(w) (Ab rho Aa+ - (1/2){Aa+ Ab, rho})
/// with whatever rates the model supplies. Used for the low-temperature
/// pathology study of the Redfield-weighted rates.
inline Generator build_weighted_gksl(const Operator& h_s,
                                     const std::vector<EigenOperatorSet>& channels,
                                     const SpectralDensityModel& model) {
    if (model.mode != SpectralMode::redfield_weighted &&
        model.mode != SpectralMode::symmetrized)
        throw Error("mode_mismatch",
                    "build_weighted_gksl expects symmetrized or "
                    "redfield_weighted rates");
    detail::check_dims(h_s, channels);
    int d = static_cast<int>(h_s.rows());
    Superop M = Superop::Zero(d * d, d * d);
    std::map<double, Eigen::MatrixXd> rates;
    for (const auto& t : detail::secular_terms(channels)) {
        double J = eval(model, t.a, t.b, t.w);
        Operator Aad = t.Aa->adjoint();
        Operator AdA = Aad * *t.Ab;
        M += J * (sop_left(*t.Ab) * sop_right(Aad) -
                  0.5 * (sop_left(AdA) + sop_right(AdA)));
        auto& R = rates[t.w];
        if (R.size() == 0)
            R = Eigen::MatrixXd::Zero(model.n_channels, model.n_channels);
        R(t.a, t.b) = J;
    }
    Generator g;
    g.dim = d;
    g.M = M;
    g.b = Vector::Zero(d * d);
    g.kind = GeneratorKind::lindblad;
    g.metadata.beta_T = model.beta_T;
    g.metadata.mode = model.mode;
    g.metadata.rate_matrices = std::move(rates);
    return g;
}

/// Max-entry residual of the partial-trace rearrangement of the
/// double commutator tr_B([H1,[H2, rho_S x rho_B]]) into its
/// semiclassical-plus-correction split. Should vanish identically.
inline double composite_trace_split_residual(const Operator& h1, const Operator& h2,
                                  const DensityMatrix& rho_s,
                                  const DensityMatrix& rho_b) {
    int ds = rho_s.dim();
    int db = rho_b.dim();
    if (h1.rows() != ds * db || h2.rows() != ds * db)
        throw Error("dim_mismatch",
                    "composite operator dimension does not factor as "
                    "system x bath");
    auto ptrace_b = [&](const Operator& x) {
        Operator out = zero(ds);
        for (int i = 0; i < ds; ++i)
            for (int j = 0; j < ds; ++j)
                for (int k = 0; k < db; ++k)
                    out(i, j) += x(i * db + k, j * db + k);
        return out;
    };
    Operator Ib = identity(db);
    Operator rs_Ib = kron(rho_s.op, Ib);
    Operator Is_rb = kron(identity(ds), rho_b.op);

    Operator lhs = ptrace_b(commutator(h1, commutator(h2, kron(rho_s.op, rho_b.op))));
    Operator t1 = ptrace_b(commutator(h1, commutator(h2, rs_Ib)) * Is_rb);
    Operator t2 = ptrace_b(h1 * rs_Ib * commutator(h2, Is_rb));
    Operator t3 = ptrace_b(commutator(h2, Is_rb) * rs_Ib * h1);
    return (lhs - (t1 + t2 - t3)).cwiseAbs().maxCoeff();
}

/// Relative distance between the two secular operator sums
///   C = sum J_ab(w)  [Ab(w), rho_eq] rho Aa+(w)
///   D = sum K_ab(w)  [Ab(w), rho_eq] rho Aa+(w),   K = e^{-beta w} J,
/// whose identification is the high-temperature replacement step. The
/// residual scales linearly in beta_T w.
inline double cd_equivalence_residual(const Operator& h_s,
                                      const std::vector<EigenOperatorSet>& channels,
                                      const SpectralDensityModel& model,
                                      double beta_T) {
    if (model.mode != SpectralMode::quantum)
        throw Error("mode_mismatch",
                    "cd_equivalence_residual requires a quantum-mode model");
    detail::check_dims(h_s, channels);
    int d = static_cast<int>(h_s.rows());
    Operator geq = matrix_exp(-beta_T * h_s);
    geq /= geq.trace();
    Superop C = Superop::Zero(d * d, d * d);
    Superop D = Superop::Zero(d * d, d * d);
    for (const auto& t : detail::secular_terms(channels)) {
        double J = eval(model, t.a, t.b, t.w);
        Operator K = commutator(*t.Ab, geq);
        Superop T = sop_right(t.Aa->adjoint()) * sop_left(K); // rho -> K rho Aa+
        C += J * T;
        D += (std::exp(-beta_T * t.w) * J) * T;
    }
    double cn = C.norm();
    if (cn == 0.0) return 0.0;
    return (C - D).norm() / cn;
}

struct KossakowskiReport {
    bool is_cp = true;
    double min_rate = 0.0;
};

/// Positive-semidefiniteness of the per-frequency channel rate matrices
/// recorded by the GKSL builders.
inline KossakowskiReport kossakowski_check(const Generator& gen) {
    if (gen.kind != GeneratorKind::lindblad)
        throw Error("invalid_arg",
                    "kossakowski_check applies to lindblad-kind generators");
    KossakowskiReport rep;
    bool first = true;
    for (const auto& [w, R] : gen.metadata.rate_matrices) {
        Eigen::MatrixXd S = 0.5 * (R + R.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
        double mn = es.eigenvalues().minCoeff();
        if (first || mn < rep.min_rate) rep.min_rate = mn;
        first = false;
        if (mn < -1e-10) rep.is_cp = false;
    }
    return rep;
}

} // namespace htme
