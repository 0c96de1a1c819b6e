#pragma once

// Eigenoperator decomposition of coupling operators with respect to the
// system Hamiltonian: A = sum_w A(w) with [H_S, A(w)] = -w A(w).

#include "htme/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <vector>

namespace htme {

struct EigenOperatorSet {
    int channel = 0;
    double freq_tol = 0.0;
    std::vector<double> frequencies; // ascending, symmetric about 0
    std::vector<Operator> ops;       // aligned with frequencies

    const Operator* find(double w, double tol) const {
        for (size_t i = 0; i < frequencies.size(); ++i)
            if (std::abs(frequencies[i] - w) <= tol) return &ops[i];
        return nullptr;
    }

    Operator sum() const {
        Operator s = zero(static_cast<int>(ops.empty() ? 0 : ops[0].rows()));
        for (const auto& a : ops) s += a;
        return s;
    }
};

namespace detail {

/// Single-linkage clustering of sorted values: a gap below threshold merges
/// neighbours into one bin. Returns (weighted-mean centre, member indices).
inline std::vector<std::pair<double, std::vector<int>>>
cluster_values(const std::vector<double>& vals, const std::vector<double>& weights,
               double threshold) {
    std::vector<int> order(vals.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return vals[a] < vals[b]; });

    std::vector<std::pair<double, std::vector<int>>> out;
    std::vector<int> current;
    for (size_t k = 0; k < order.size(); ++k) {
        if (!current.empty() &&
            vals[order[k]] - vals[order[k - 1]] > threshold) {
            out.emplace_back(0.0, current);
            current.clear();
        }
        current.push_back(order[k]);
    }
    if (!current.empty()) out.emplace_back(0.0, current);

    for (auto& [centre, members] : out) {
        double wsum = 0, acc = 0;
        for (int idx : members) {
            double w = std::max(weights[idx], 1e-300);
            acc += w * vals[idx];
            wsum += w;
        }
        centre = acc / wsum;
    }
    return out;
}

} // namespace detail

/// Projects a between eigenspaces of h_s. Gaps within freq_tol of each other
/// share one bin (single linkage); bin frequency is the norm-weighted mean of
/// the merged gaps. Pieces of negligible norm are dropped; the w=0 piece is
/// kept whenever nonzero. Clustering runs on |gap| and bins are mirrored, so
/// A(-w) = A(w)^dagger holds exactly for Hermitian a.
inline EigenOperatorSet decompose(const Operator& h_s, const Operator& a,
                                  double freq_tol, int channel = 0) {
    if (freq_tol <= 0) throw Error("invalid_arg", "decompose: freq_tol must be > 0");
    if (h_s.rows() != a.rows())
        throw Error("dim_mismatch", "decompose: dimension mismatch");
    double hscale = std::max(1.0, h_s.cwiseAbs().maxCoeff());
    if (!is_hermitian(h_s, 1e-10 * hscale))
        throw Error("not_hermitian", "decompose: h_s not Hermitian");
    double ascale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (!is_hermitian(a, 1e-10 * ascale))
        throw Error("not_hermitian", "decompose: coupling operator not Hermitian");

    auto [vals, U] = hermitian_eig(h_s);
    int n = static_cast<int>(vals.size());
    Operator at = U.adjoint() * a * U; // a in the H_S eigenbasis

    // nonnegative gaps with the squared norm of the (i<-j) piece as weight
    std::vector<double> gaps, weights;
    std::vector<std::pair<int, int>> index; // (i, j) with w = vals[j]-vals[i] >= 0
    double anorm = std::max(a.norm(), 1e-300);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double w = vals[j] - vals[i];
            if (w < 0) continue;
            double piece = std::norm(at(i, j)) + std::norm(at(j, i));
            gaps.push_back(w);
            weights.push_back(piece);
            index.emplace_back(i, j);
        }
    }

    auto bins = detail::cluster_values(gaps, weights, freq_tol);

    EigenOperatorSet set;
    set.channel = channel;
    set.freq_tol = freq_tol;
    std::map<double, Operator> pieces;
    for (const auto& [centre, members] : bins) {
        bool zero_bin = std::abs(centre) <= freq_tol;
        double w = zero_bin ? 0.0 : centre;
        Operator plus = zero(n); // collects the lowering piece A(w >= 0)
        for (int k : members) {
            auto [i, j] = index[k];
            plus(i, j) += at(i, j);
            if (zero_bin && i != j) plus(j, i) += at(j, i);
        }
        Operator piece = U * plus * U.adjoint();
        if (piece.norm() <= 1e-13 * anorm) continue;
        if (zero_bin) {
            pieces[0.0] = pieces.count(0.0) ? pieces[0.0] + piece : piece;
        } else {
            pieces[w] = pieces.count(w) ? pieces[w] + piece : piece;
            Operator minus = piece.adjoint();
            pieces[-w] = pieces.count(-w) ? pieces[-w] + minus : minus;
        }
    }
    for (const auto& [w, op] : pieces) {
        set.frequencies.push_back(w);
        set.ops.push_back(op);
    }
    return set;
}

/// Index set (alpha, beta, w) of the secular double sums: all channel pairs
/// and the frequencies present in both channels.
inline std::vector<std::tuple<int, int, double>>
secular_pairs(const std::vector<EigenOperatorSet>& sets) {
    std::vector<std::tuple<int, int, double>> out;
    if (sets.empty()) return out;
    double tol = sets[0].freq_tol;
    for (const auto& s : sets)
        if (std::abs(s.freq_tol - tol) > 1e-15 * std::max(1.0, tol))
            throw Error("invalid_arg", "secular_pairs: mismatched freq_tol binning");
    // two bins from different channels closer than tol but not matching
    // signal inconsistent grids
    for (size_t a = 0; a < sets.size(); ++a) {
        for (size_t b = 0; b < sets.size(); ++b) {
            for (double wa : sets[a].frequencies) {
                for (double wb : sets[b].frequencies) {
                    double d = std::abs(wa - wb);
                    if (d > 1e-12 * std::max(1.0, std::abs(wa)) && d < 0.5 * tol)
                        throw Error("invalid_arg",
                                    "secular_pairs: inconsistent frequency grids");
                }
            }
        }
    }
    for (size_t a = 0; a < sets.size(); ++a)
        for (size_t b = 0; b < sets.size(); ++b)
            for (double wa : sets[a].frequencies)
                if (sets[b].find(wa, 1e-12 * std::max(1.0, std::abs(wa))))
                    out.emplace_back(static_cast<int>(sets[a].channel),
                                     static_cast<int>(sets[b].channel), wa);
    return out;
}

} // namespace htme
