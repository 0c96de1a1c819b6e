#include "htme/eigenops.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace htme;
using Catch::Approx;

namespace {

Operator random_hermitian(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g;
    Operator m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = cxd(g(rng), g(rng));
    return hermitian_part(m);
}

} // namespace

TEST_CASE("two-level decomposition of sigma_x") {
    Operator h = 0.5 * pauli(Axis::z);
    auto set = decompose(h, pauli(Axis::x), 1e-9);
    REQUIRE(set.frequencies.size() == 2);
    REQUIRE(set.frequencies[0] == Approx(-1.0).epsilon(1e-14));
    REQUIRE(set.frequencies[1] == Approx(1.0).epsilon(1e-14));
    // lowering piece at +w, raising at -w
    REQUIRE((*set.find(1.0, 1e-9) - pauli(Axis::minus)).norm() < 1e-14);
    REQUIRE((*set.find(-1.0, 1e-9) - pauli(Axis::plus)).norm() < 1e-14);
}

TEST_CASE("decomposition properties on random operators") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dims(2, 8);
    for (int k = 0; k < 200; ++k) {
        int d = dims(rng);
        Operator h = random_hermitian(rng, d);
        Operator a = random_hermitian(rng, d);
        auto set = decompose(h, a, 1e-9);
        REQUIRE((set.sum() - a).norm() < 1e-12 * a.norm());
        for (size_t i = 0; i < set.frequencies.size(); ++i) {
            double w = set.frequencies[i];
            // [H, A(w)] = -w A(w)
            REQUIRE((commutator(h, set.ops[i]) + w * set.ops[i]).norm() <
                    1e-9 * set.ops[i].norm());
            const Operator* mirror = set.find(-w, 1e-9);
            REQUIRE(mirror != nullptr);
            REQUIRE((*mirror - set.ops[i].adjoint()).norm() < 1e-13);
        }
        // frequencies ascending
        for (size_t i = 0; i + 1 < set.frequencies.size(); ++i)
            REQUIRE(set.frequencies[i] < set.frequencies[i + 1]);
    }
}

TEST_CASE("gaps closer than freq_tol share a bin") {
    Operator h = zero(3);
    h.diagonal() << 0.0, 1.0, 1.0 + 1e-12;
    Operator a(3, 3);
    a.setZero();
    a(0, 1) = a(1, 0) = 1.0;
    a(0, 2) = a(2, 0) = 1.0;
    auto set = decompose(h, a, 1e-9);
    REQUIRE(set.frequencies.size() == 2); // merged +-1 pair only
    REQUIRE(std::abs(set.frequencies[1] - 1.0) < 1e-9);
}

TEST_CASE("binning is stable under sub-tolerance perturbations") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    Operator h = zero(4);
    h.diagonal() << 0.0, 0.5, 1.3, 2.1;
    Operator a = random_hermitian(rng, 4);
    double tol = 1e-6;
    auto base = decompose(h, a, tol);
    for (int k = 0; k < 50; ++k) {
        Operator hp = h;
        for (int i = 0; i < 4; ++i) hp(i, i) += g(rng) * tol / 30.0;
        auto pert = decompose(hp, a, tol);
        REQUIRE(pert.frequencies.size() == base.frequencies.size());
        for (size_t i = 0; i < base.frequencies.size(); ++i)
            REQUIRE(std::abs(pert.frequencies[i] - base.frequencies[i]) < tol);
    }
}

TEST_CASE("zero-frequency piece is kept") {
    Operator h = pauli(Axis::z); // sigma_z couples diagonally
    auto set = decompose(h, pauli(Axis::z), 1e-9);
    REQUIRE(set.frequencies.size() == 1);
    REQUIRE(std::abs(set.frequencies[0]) < 1e-14);
    REQUIRE((set.ops[0] - pauli(Axis::z)).norm() < 1e-14);
}

TEST_CASE("decompose input validation") {
    REQUIRE_THROWS_AS(decompose(pauli(Axis::z), pauli(Axis::x), 0.0), Error);
    REQUIRE_THROWS_AS(decompose(pauli(Axis::plus), pauli(Axis::x), 1e-9), Error);
    REQUIRE_THROWS_AS(decompose(pauli(Axis::z), pauli(Axis::plus), 1e-9), Error);
    REQUIRE_THROWS_AS(decompose(pauli(Axis::z), identity(3), 1e-9), Error);
}

TEST_CASE("secular pairs intersect frequency grids") {
    Operator h = 0.5 * pauli(Axis::z);
    auto sx = decompose(h, pauli(Axis::x), 1e-9, 0);
    auto sz = decompose(h, pauli(Axis::z), 1e-9, 1);
    auto pairs = secular_pairs({sx, sz});
    // sx carries {-1, +1}, sz carries {0}: no shared frequencies across
    // channels, two same-channel frequencies each
    int cross = 0, same = 0;
    for (auto [a, b, w] : pairs) (a == b ? same : cross)++;
    REQUIRE(cross == 0);
    REQUIRE(same == 3);
}

TEST_CASE("secular pairs reject inconsistent grids") {
    Operator h1 = 0.5 * pauli(Axis::z);
    Operator h2 = 0.5 * (1.0 + 1e-7) * pauli(Axis::z);
    auto s1 = decompose(h1, pauli(Axis::x), 1e-6, 0);
    auto s2 = decompose(h2, pauli(Axis::x), 1e-6, 1);
    REQUIRE_THROWS_AS(secular_pairs({s1, s2}), Error);

    auto s3 = decompose(h1, pauli(Axis::x), 1e-9, 1);
    REQUIRE_THROWS_AS(secular_pairs({s1, s3}), Error); // mismatched freq_tol
}
