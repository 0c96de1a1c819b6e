#include "htme/evolution.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <limits>

using namespace htme;
using Catch::Approx;

namespace {

struct Tls {
    double w0 = 1.0, g0 = 1.0, beta;
    Operator h_s;
    std::vector<EigenOperatorSet> ch;
    explicit Tls(double btw) : beta(btw) {
        h_s = 0.5 * w0 * pauli(Axis::z);
        ch = {decompose(h_s, pauli(Axis::x), 1e-6)};
    }
    SpectralDensityModel model(SpectralMode mode) const {
        return SpectralDensityModel::bosonic(g0, beta, mode);
    }
};

OperatorBasis tls_basis(Axis second, const std::string& label) {
    OperatorBasis b;
    b.dim = 2;
    b.identity_index = 0;
    b.labels = {"I", label};
    b.elements = {identity(2) / std::sqrt(2.0), pauli(second) / std::sqrt(2.0)};
    return b;
}

} // namespace

TEST_CASE("zero generator leaves the state fixed") {
    Generator g;
    g.dim = 2;
    g.M = Superop::Zero(4, 4);
    g.b = Vector::Zero(4);
    auto r0 = DensityMatrix::make(0.5 * (identity(2) + 0.3 * pauli(Axis::x)));
    auto traj = propagate(g, r0, linspace(0.0, 2.0, 5));
    for (const auto& s : traj.states)
        REQUIRE((s.op - r0.op).cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE(traj.max_asymmetry < 1e-14);
}

TEST_CASE("two-level relaxation matches the closed-form solution") {
    Tls f(0.4);
    auto gen = build_lindblad(f.h_s, f.ch, f.model(SpectralMode::quantum));
    double n = photon_occupation(f.beta, f.w0);
    double gam = f.g0 * (2.0 * n + 1.0);
    double sz_eq = -1.0 / (2.0 * n + 1.0);

    Operator up = 0.5 * (identity(2) + pauli(Axis::z));
    auto traj = propagate(gen, DensityMatrix::make(up), linspace(0.0, 5.0 / gam, 200));
    double worst = 0;
    for (size_t k = 0; k < traj.times.size(); ++k) {
        double t = traj.times[k];
        double sz = std::real(hs_inner(pauli(Axis::z), traj.states[k].op));
        double ref = sz_eq + (1.0 - sz_eq) * std::exp(-gam * t);
        worst = std::max(worst, std::abs(sz - ref));
    }
    REQUIRE(worst < 1e-8);
    // completely positive map keeps the state in the cone
    REQUIRE(traj.min_state_eigenvalue > -1e-10);

    // coherences decay at half the population rate
    Operator tilted = 0.5 * (identity(2) + 0.8 * pauli(Axis::x));
    auto tx = propagate(gen, DensityMatrix::make(tilted),
                        linspace(0.0, 3.0 / gam, 50));
    for (size_t k = 0; k < tx.times.size(); ++k) {
        double sx = std::real(hs_inner(pauli(Axis::x), tx.states[k].op));
        REQUIRE(sx == Approx(0.8 * std::exp(-gam * tx.times[k] / 2.0)).margin(1e-10));
    }
}

TEST_CASE("propagate validates its inputs") {
    Tls f(0.1);
    auto gen = build_lindblad(f.h_s, f.ch, f.model(SpectralMode::quantum));
    auto r0 = DensityMatrix::make(identity(2) / 2.0);
    REQUIRE_THROWS_AS(propagate(gen, r0, {}), Error);
    REQUIRE_THROWS_AS(propagate(gen, r0, {0.0, 2.0, 1.0}), Error);
    REQUIRE_THROWS_AS(propagate(gen, r0, {-1.0, 1.0}), Error);
    REQUIRE_THROWS_AS(propagate(gen, DensityMatrix::make(identity(3) / 3.0), {0.0, 1.0}),
                      Error);
    REQUIRE_THROWS_AS(linspace(0.0, 1.0, 1), Error);
    REQUIRE_THROWS_AS(linspace(1.0, 0.0, 10), Error);
}

TEST_CASE("steady states of the four thermal generators") {
    Tls f(0.2);
    auto lind = build_lindblad(f.h_s, f.ch, f.model(SpectralMode::quantum));
    Operator gibbs = matrix_exp(-f.beta * f.h_s);
    gibbs /= gibbs.trace();
    REQUIRE((steady_state(lind).op - gibbs).cwiseAbs().maxCoeff() < 1e-10);

    auto eq = make_equilibrium(f.h_s, f.beta, EquilibriumFlavor::linearized);
    auto arh = build_arh(f.h_s, f.ch, f.model(SpectralMode::symmetrized), eq);
    REQUIRE((steady_state(arh).op - eq.value.op).cwiseAbs().maxCoeff() < 1e-12);

    auto dc = build_double_commutator(f.h_s, f.ch, f.model(SpectralMode::symmetrized));
    REQUIRE((steady_state(dc).op - identity(2) / 2.0).cwiseAbs().maxCoeff() < 1e-12);

    // the corrected generator pins its own stationary point near eq
    auto htme = build_htme(f.h_s, f.ch, f.model(SpectralMode::symmetrized), eq);
    auto ss = steady_state(htme);
    REQUIRE((htme.M * vec_op(ss.op) + htme.b).cwiseAbs().maxCoeff() < 1e-12);

    Generator flat;
    flat.dim = 2;
    flat.M = Superop::Zero(4, 4);
    flat.b = Vector::Zero(4);
    REQUIRE_THROWS_AS(steady_state(flat), Error);
    try {
        steady_state(flat);
    } catch (const Error& e) {
        REQUIRE(e.code() == "degenerate_kernel");
    }
}

TEST_CASE("observable coefficients reconstruct the state") {
    auto basis = spin_pair_basis();
    // state inside the basis span
    Operator rho = identity(4) / 4.0 + 0.1 * basis.elements[1] +
                   0.05 * basis.elements[2] - 0.03 * basis.elements[3];

    Generator idgen;
    idgen.dim = 4;
    idgen.M = Superop::Zero(16, 16);
    idgen.b = Vector::Zero(16);
    auto traj = propagate(idgen, DensityMatrix::make(hermitian_part(rho)),
                          linspace(0.0, 1.0, 3));
    auto c = observables(traj, basis);
    REQUIRE(traj.labels == basis.labels);
    REQUIRE(c.rows() == 3);
    REQUIRE(c(0, 0) == Approx(2.0).epsilon(1e-12)); // Z tr(rho I/2)
    REQUIRE(c(0, 1) == Approx(0.4).epsilon(1e-12)); // Z * 0.1
    REQUIRE(c(2, 3) == Approx(-0.12).epsilon(1e-12));

    // rho = (1/Z) sum_i c_i O_i within the span
    Operator rebuilt = zero(4);
    for (int i = 0; i < 4; ++i) rebuilt += (c(0, i) / 4.0) * basis.elements[i];
    REQUIRE((rebuilt - traj.states[0].op).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rate analysis closes the polarization dynamics") {
    Tls f(0.3);
    auto gen = build_lindblad(f.h_s, f.ch, f.model(SpectralMode::quantum));
    double n = photon_occupation(f.beta, f.w0);
    double gam = f.g0 * (2.0 * n + 1.0);

    auto ra = rate_analysis(gen, tls_basis(Axis::z, "Z"));
    REQUIRE(ra.leakage < 1e-12);
    REQUIRE(ra.sigma(1, 1) == Approx(-gam).epsilon(1e-12));
    // identity column carries gam * sz_eq = -g0
    REQUIRE(ra.sigma(1, 0) == Approx(-f.g0).epsilon(1e-12));
    REQUIRE(ra.sigma(0, 0) == Approx(0.0).margin(1e-13));
    REQUIRE(ra.sigma(0, 1) == Approx(0.0).margin(1e-13));
    REQUIRE(ra.relaxation_times.at("Z") == Approx(1.0 / gam).epsilon(1e-12));

    Eigen::VectorXd ev = ra.eigenvalues.real();
    std::sort(ev.data(), ev.data() + ev.size());
    REQUIRE(ev(0) == Approx(-gam).epsilon(1e-10));
    REQUIRE(std::abs(ev(1)) < 1e-12);
}

TEST_CASE("action outside the basis span is an error") {
    Tls f(0.3);
    auto gen = build_lindblad(f.h_s, f.ch, f.model(SpectralMode::quantum));
    // {identity, x} misses the sigma_z image of the identity coordinate
    REQUIRE_THROWS_AS(rate_analysis(gen, tls_basis(Axis::x, "X")), Error);
    try {
        rate_analysis(gen, tls_basis(Axis::x, "X"));
    } catch (const Error& e) {
        REQUIRE(e.code() == "leakage");
    }
    // a generous threshold downgrades it to a reported value
    auto ra = rate_analysis(gen, tls_basis(Axis::x, "X"),
                            std::numeric_limits<double>::infinity());
    REQUIRE(ra.leakage > 1e-3);
}
