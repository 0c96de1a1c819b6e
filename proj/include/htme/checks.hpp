#pragma once

// Named invariant checks shared by the CLI `check` verb and the test suite.

#include "htme/eigenops.hpp"
#include "htme/evolution.hpp"
#include "htme/generators.hpp"
#include "htme/operator_core.hpp"
#include "htme/scenarios.hpp"
#include "htme/spectral.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace htme {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;     // measured
    double threshold = 0.0; // pass bound (upper unless noted in name)
};

enum class CheckLevel { fast, full };

namespace detail {

inline Operator random_matrix(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g;
    Operator m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = cxd(g(rng), g(rng));
    return m;
}

inline Operator random_hermitian_unit_trace(std::mt19937_64& rng, int d) {
    Operator m = random_matrix(rng, d);
    m = hermitian_part(m);
    m += ((1.0 - m.trace()) / static_cast<double>(d)) * identity(d);
    return m;
}

inline DensityMatrix random_density(std::mt19937_64& rng, int d) {
    Operator g = random_matrix(rng, d);
    Operator m = g * g.adjoint();
    m /= m.trace();
    return DensityMatrix::make((m + m.adjoint()) / 2.0);
}

struct TlsFixture {
    Operator h_s;
    std::vector<EigenOperatorSet> ch;
    double w0, g0, beta;

    explicit TlsFixture(double btw, double w0_ = 1.0, double g0_ = 1.0)
        : w0(w0_), g0(g0_), beta(btw / w0_) {
        h_s = 0.5 * w0 * pauli(Axis::z);
        ch = {decompose(h_s, pauli(Axis::x), 1e-6 * w0)};
    }
    SpectralDensityModel model(SpectralMode mode) const {
        return SpectralDensityModel::bosonic(g0 / (w0 * w0 * w0), beta, mode);
    }
    Operator gibbs() const {
        Operator g = matrix_exp(-beta * h_s);
        return g / g.trace();
    }
};

} // namespace detail

inline double gibbs_stationarity_residual(const Generator& gen, const Operator& gibbs) {
    return (gen.M * vec_op(gibbs) + gen.b).cwiseAbs().maxCoeff();
}

/// Runs the invariant suite. `seed` feeds every random draw; level=full adds
/// the halving convergence studies and the two-spin closed-form comparison.
inline std::vector<CheckResult> run_checks(CheckLevel level, unsigned long seed) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    auto push = [&](const std::string& name, double value, double threshold) {
        out.push_back({name, value <= threshold, value, threshold});
    };
    auto push_range = [&](const std::string& name, double value, double lo,
                          double hi) {
        out.push_back({name, value >= lo && value <= hi, value, hi});
    };

    // eigenoperator decomposition: reconstruction and the commutator identity
    {
        std::uniform_int_distribution<int> dims(2, 6);
        double worst_sum = 0, worst_comm = 0, worst_adj = 0;
        int n_draws = (level == CheckLevel::full) ? 60 : 20;
        for (int k = 0; k < n_draws; ++k) {
            int d = dims(rng);
            Operator h = detail::random_matrix(rng, d);
            h = hermitian_part(h);
            Operator a = detail::random_matrix(rng, d);
            a = hermitian_part(a);
            auto set = decompose(h, a, 1e-9);
            worst_sum = std::max(worst_sum, (set.sum() - a).norm() / a.norm());
            for (size_t i = 0; i < set.frequencies.size(); ++i) {
                double w = set.frequencies[i];
                worst_comm = std::max(
                    worst_comm, (commutator(h, set.ops[i]) + w * set.ops[i]).norm() /
                                    std::max(set.ops[i].norm(), 1e-300));
                const Operator* mirror = set.find(-w, 1e-9);
                worst_adj = std::max(
                    worst_adj,
                    mirror ? (*mirror - set.ops[i].adjoint()).norm() : 1.0);
            }
        }
        push("eigenop_reconstruction", worst_sum, 1e-12);
        push("eigenop_commutator_identity", worst_comm, 1e-10);
        push("eigenop_adjoint_symmetry", worst_adj, 1e-13);
    }

    // detailed balance
    {
        auto m = SpectralDensityModel::bosonic(1.0, 0.7);
        push("detailed_balance_bosonic",
             balance_residual(m, {0.3, 1.0, 2.5}), 1e-14);

        Operator h_b = zero(4);
        h_b.diagonal() << 0.0, 0.37, 1.10, 2.03;
        Operator b1 = detail::random_matrix(rng, 4);
        b1 = hermitian_part(b1);
        Operator b2 = detail::random_matrix(rng, 4);
        b2 = hermitian_part(b2);
        auto disc = discrete_spectral_density(h_b, {b1, b2}, 0.8, 2.03e-6);
        std::vector<double> lines;
        for (double w : disc.omegas)
            if (w > 1e-9) lines.push_back(w);
        push("detailed_balance_discrete", balance_residual(disc, lines), 1e-12);
    }

    // partial-trace double-commutator split
    {
        double worst = 0;
        int n_draws = (level == CheckLevel::full) ? 100 : 25;
        for (int k = 0; k < n_draws; ++k) {
            int db = 2 + (k % 2);
            Operator h1 = detail::random_matrix(rng, 2 * db);
            h1 = hermitian_part(h1);
            Operator h2 = detail::random_matrix(rng, 2 * db);
            h2 = hermitian_part(h2);
            worst = std::max(worst,
                             composite_trace_split_residual(h1, h2, detail::random_density(rng, 2),
                                                 detail::random_density(rng, db)));
        }
        push("composite_trace_split", worst, 1e-12);
    }

    detail::TlsFixture tls(0.05);
    auto lind = build_lindblad(tls.h_s, tls.ch, tls.model(SpectralMode::quantum));
    auto eq = make_equilibrium(tls.h_s, tls.beta, EquilibriumFlavor::linearized);
    auto htme = build_htme(tls.h_s, tls.ch, tls.model(SpectralMode::symmetrized), eq);
    auto arh = build_arh(tls.h_s, tls.ch, tls.model(SpectralMode::symmetrized), eq);
    auto linzd = build_linearized(tls.h_s, tls.ch, tls.model(SpectralMode::quantum));
    auto dc = build_double_commutator(tls.h_s, tls.ch,
                                      tls.model(SpectralMode::symmetrized));

    push("gibbs_stationarity", gibbs_stationarity_residual(lind, tls.gibbs()), 1e-10);

    {
        double worst_t = 0, worst_h = 0;
        int n_draws = (level == CheckLevel::full) ? 100 : 30;
        for (int k = 0; k < n_draws; ++k) {
            Operator x = detail::random_hermitian_unit_trace(rng, 2);
            for (const Generator* g : {&lind, &htme, &arh, &linzd, &dc}) {
                Operator y = g->apply(x);
                worst_t = std::max(worst_t, std::abs(y.trace()));
                worst_h = std::max(worst_h, (y - y.adjoint()).cwiseAbs().maxCoeff());
            }
        }
        push("trace_preservation", worst_t, 1e-12);
        push("hermiticity_preservation", worst_h, 1e-12);
    }

    push("linearized_equals_htme",
         (linzd.effective_matrix() - htme.effective_matrix()).cwiseAbs().maxCoeff(),
         1e-10);

    {
        auto rep = kossakowski_check(lind);
        out.push_back({"kossakowski_positivity", rep.is_cp, rep.min_rate, -1e-10});
    }

    push("weak_order_steady_state",
         (steady_state(arh).op - eq.value.op).cwiseAbs().maxCoeff(), 1e-12);
    push("infinite_temperature_steady_state",
         (steady_state(dc).op - identity(2) / 2.0).cwiseAbs().maxCoeff(), 1e-12);

    {
        detail::TlsFixture hot(0.01);
        push("quantum_classical_weight_equivalence",
             cd_equivalence_residual(hot.h_s, hot.ch,
                                     hot.model(SpectralMode::quantum), hot.beta),
             0.011);
    }

    // propagation consistency: [0,t] vs [0,t/2]+[t/2,t]
    {
        DensityMatrix r0 = DensityMatrix::make(0.5 * identity(2));
        auto full = propagate(htme, r0, {0.0, 1.0});
        auto half = propagate(htme, r0, {0.0, 0.5, 1.0});
        push("propagation_consistency",
             (full.states[1].op - half.states[2].op).cwiseAbs().maxCoeff(), 1e-10);
    }

    if (level == CheckLevel::full) {
        // second-order convergence of the expanded generator to the full one
        {
            std::vector<double> devs;
            for (double btw : {0.1, 0.05, 0.025}) {
                detail::TlsFixture f(btw);
                auto l = build_lindblad(f.h_s, f.ch, f.model(SpectralMode::quantum));
                auto e = make_equilibrium(f.h_s, f.beta, EquilibriumFlavor::linearized);
                auto h = build_htme(f.h_s, f.ch, f.model(SpectralMode::symmetrized), e);
                double gam = f.g0 * (2.0 / std::expm1(btw) + 1.0);
                DensityMatrix r0 = DensityMatrix::make(0.5 * identity(2));
                auto times = linspace(0.0, 5.0 / gam, 60);
                auto tl = propagate(l, r0, times);
                auto th = propagate(h, r0, times);
                double dmax = 0;
                for (size_t k = 0; k < times.size(); ++k)
                    dmax = std::max(dmax, (tl.states[k].op - th.states[k].op)
                                              .cwiseAbs()
                                              .maxCoeff());
                devs.push_back(dmax);
            }
            push_range("htme_convergence_ratio_1", devs[1] / devs[0], 0.15, 0.35);
            push_range("htme_convergence_ratio_2", devs[2] / devs[1], 0.15, 0.35);
        }
        // equilibrium residual of the expanded generator shrinks quadratically
        {
            std::vector<double> res;
            for (double btw : {0.1, 0.05, 0.025}) {
                detail::TlsFixture f(btw);
                auto e = make_equilibrium(f.h_s, f.beta, EquilibriumFlavor::linearized);
                auto h = build_htme(f.h_s, f.ch, f.model(SpectralMode::symmetrized), e);
                double r = (h.M * vec_op(e.value.op) + h.b).cwiseAbs().maxCoeff();
                res.push_back(r / h.M.operatorNorm());
            }
            push_range("equilibrium_residual_ratio_1", res[1] / res[0], 0.15, 0.35);
            push_range("equilibrium_residual_ratio_2", res[2] / res[1], 0.15, 0.35);
        }
        // linear scaling of the weight-replacement residual
        {
            detail::TlsFixture f1(0.01), f2(0.005);
            double r1 = cd_equivalence_residual(f1.h_s, f1.ch,
                                                f1.model(SpectralMode::quantum),
                                                f1.beta);
            double r2 = cd_equivalence_residual(f2.h_s, f2.ch,
                                                f2.model(SpectralMode::quantum),
                                                f2.beta);
            push_range("weight_residual_halving", r2 / r1, 0.4, 0.6);
        }
        // two-spin closed forms
        {
            SingletTripletConfig cfg;
            auto res = run_singlet_triplet(cfg, GeneratorKind::htme);
            double scale = res.oracle_sigma.cwiseAbs().maxCoeff();
            push("spin_pair_sigma_closed_form",
                 (res.sigma - res.oracle_sigma).cwiseAbs().maxCoeff() / scale,
                 1e-10);
            push("spin_pair_polarization_oracle", res.cz_oracle_deviation, 1e-6);
        }
    }
    return out;
}

} // namespace htme
