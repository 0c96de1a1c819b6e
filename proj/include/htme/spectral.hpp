#pragma once

// Spectral-density models, detailed balance, and the high-temperature
// symmetrization / Redfield-weighting transforms.

#include "htme/operator_core.hpp"

#include <cmath>
#include <vector>

namespace htme {

enum class SpectralKind { bosonic_radiative, lorentzian_classical, discrete_bath, tabulated };
enum class SpectralMode { quantum, symmetrized, redfield_weighted };

inline const char* to_string(SpectralMode m) {
    switch (m) {
    case SpectralMode::quantum: return "quantum";
    case SpectralMode::symmetrized: return "symmetrized";
    case SpectralMode::redfield_weighted: return "redfield_weighted";
    }
    return "?";
}

/// Evaluable J_ab(w; beta_T). The symmetrized transform replaces both signed
/// branches by the absorption branch, s_ab(w>0) = J_ba(-w), which for the
/// bosonic model equals the w>0 branch with its Boltzmann asymmetry factor
/// set to 1. Redfield weighting multiplies the symmetrized value by
/// exp(beta_T w / 2).
struct SpectralDensityModel {
    SpectralKind kind = SpectralKind::bosonic_radiative;
    SpectralMode mode = SpectralMode::quantum;
    double beta_T = 0.0;
    int n_channels = 1;

    // bosonic_radiative: J(w>0) = scale * w^3 (1 + N(w))
    double scale = 1.0;

    // lorentzian_classical: J_ab(w) = kappa_ab * omega_ran^2 * 2 tau / (1 + (w tau)^2)
    double tau_ran = 0.0;
    double omega_ran = 0.0;
    Eigen::MatrixXd kappa; // channel-correlation matrix, unit diagonal

    // discrete_bath / tabulated: samples (w_k, J matrix)
    std::vector<double> omegas;
    std::vector<Eigen::MatrixXd> samples;

    static SpectralDensityModel bosonic(double scale, double beta_T,
                                        SpectralMode mode = SpectralMode::quantum) {
        SpectralDensityModel m;
        m.kind = SpectralKind::bosonic_radiative;
        m.mode = mode;
        m.scale = scale;
        m.beta_T = beta_T;
        m.n_channels = 1;
        return m;
    }

    static SpectralDensityModel lorentzian(double tau_ran, double omega_ran,
                                           const Eigen::MatrixXd& kappa, double beta_T,
                                           SpectralMode mode = SpectralMode::symmetrized) {
        if (kappa.rows() != kappa.cols())
            throw Error("invalid_arg", "lorentzian: kappa must be square");
        for (int i = 0; i < kappa.rows(); ++i) {
            if (std::abs(kappa(i, i) - 1.0) > 1e-12)
                throw Error("invalid_arg", "lorentzian: kappa diagonal must be 1");
            for (int j = 0; j < kappa.cols(); ++j) {
                if (std::abs(kappa(i, j) - kappa(j, i)) > 1e-12 ||
                    std::abs(kappa(i, j)) > 1.0 + 1e-12)
                    throw Error("invalid_arg", "lorentzian: kappa must be symmetric "
                                               "with |kappa_ij| <= 1");
            }
        }
        SpectralDensityModel m;
        m.kind = SpectralKind::lorentzian_classical;
        m.mode = mode;
        m.tau_ran = tau_ran;
        m.omega_ran = omega_ran;
        m.kappa = kappa;
        m.beta_T = beta_T;
        m.n_channels = static_cast<int>(kappa.rows());
        return m;
    }

    static SpectralDensityModel tabulated(std::vector<double> omegas,
                                          std::vector<Eigen::MatrixXd> samples,
                                          double beta_T,
                                          SpectralMode mode = SpectralMode::quantum) {
        if (omegas.empty() || omegas.size() != samples.size())
            throw Error("invalid_arg", "tabulated: omega/sample count mismatch");
        SpectralDensityModel m;
        m.kind = SpectralKind::tabulated;
        m.mode = mode;
        m.beta_T = beta_T;
        m.omegas = std::move(omegas);
        m.samples = std::move(samples);
        m.n_channels = static_cast<int>(m.samples[0].rows());
        return m;
    }
};

inline double photon_occupation(double beta_T, double w) {
    return 1.0 / std::expm1(beta_T * w);
}

namespace detail {

inline double eval_quantum(const SpectralDensityModel& m, int a, int b, double w) {
    if (a < 0 || a >= m.n_channels || b < 0 || b >= m.n_channels)
        throw Error("invalid_arg", "spectral eval: unknown channel");
    switch (m.kind) {
    case SpectralKind::bosonic_radiative: {
        if (w == 0.0)
            throw Error("invalid_arg", "bosonic spectral density undefined at w=0");
        double aw = std::abs(w);
        if (m.beta_T == 0.0)
            throw Error("invalid_arg", "bosonic quantum density diverges at beta_T=0");
        double n = photon_occupation(m.beta_T, aw);
        return (w > 0) ? m.scale * aw * aw * aw * (1.0 + n)
                       : m.scale * aw * aw * aw * n;
    }
    case SpectralKind::lorentzian_classical: {
        double t = m.tau_ran;
        double j = 2.0 * t / (1.0 + (w * t) * (w * t));
        return m.kappa(a, b) * m.omega_ran * m.omega_ran * j;
    }
    case SpectralKind::discrete_bath:
    case SpectralKind::tabulated: {
        double best = 0.0, bestd = 1e300;
        for (size_t k = 0; k < m.omegas.size(); ++k) {
            double d = std::abs(m.omegas[k] - w);
            if (d < bestd) {
                bestd = d;
                best = m.samples[k](a, b);
            }
        }
        double scale = 1.0;
        for (double x : m.omegas) scale = std::max(scale, std::abs(x));
        if (bestd > 1e-9 * scale)
            throw Error("invalid_arg", "tabulated spectral density has no sample "
                                       "near requested frequency");
        return best;
    }
    }
    throw Error("invalid_arg", "unknown spectral kind");
}

} // namespace detail

inline double eval(const SpectralDensityModel& m, int a, int b, double w) {
    switch (m.mode) {
    case SpectralMode::quantum:
        return detail::eval_quantum(m, a, b, w);
    case SpectralMode::symmetrized:
        return (w > 0) ? detail::eval_quantum(m, b, a, -w)
                       : detail::eval_quantum(m, a, b, w);
    case SpectralMode::redfield_weighted: {
        double s = (w > 0) ? detail::eval_quantum(m, b, a, -w)
                           : detail::eval_quantum(m, a, b, w);
        return s * std::exp(0.5 * m.beta_T * w);
    }
    }
    throw Error("invalid_arg", "unknown spectral mode");
}

inline SpectralDensityModel with_mode(SpectralDensityModel m, SpectralMode mode) {
    m.mode = mode;
    return m;
}

/// Discrete-bath spectral density: J_ab(w) = sum_{f f'} g_sigma(w - f' + f)
/// <f|B_a|f'><f'|B_b|f> rho_f with Gibbs weights and a normalized Gaussian
/// line profile. Samples are taken at every distinct bath gap.
inline SpectralDensityModel
discrete_spectral_density(const Operator& h_b, const std::vector<Operator>& b_ops,
                          double beta_T, double sigma_line) {
    if (sigma_line <= 0)
        throw Error("invalid_arg", "discrete_spectral_density: sigma_line must be > 0");
    double hscale = std::max(1.0, h_b.cwiseAbs().maxCoeff());
    if (!is_hermitian(h_b, 1e-10 * hscale))
        throw Error("not_hermitian", "discrete_spectral_density: h_b not Hermitian");
    for (const auto& b : b_ops) {
        double bscale = std::max(1.0, b.cwiseAbs().maxCoeff());
        if (!is_hermitian(b, 1e-10 * bscale))
            throw Error("not_hermitian", "discrete_spectral_density: bath coupling "
                                         "operator not Hermitian");
    }

    auto [f, U] = hermitian_eig(h_b);
    int n = static_cast<int>(f.size());
    int nc = static_cast<int>(b_ops.size());

    Eigen::VectorXd rho(n);
    double fmin = f.minCoeff();
    double z = 0;
    for (int i = 0; i < n; ++i) {
        rho(i) = std::exp(-beta_T * (f(i) - fmin));
        z += rho(i);
    }
    rho /= z;

    std::vector<Operator> be;
    for (const auto& b : b_ops) be.push_back(U.adjoint() * b * U);

    // distinct gaps f' - f, merged when closer than sigma_line
    std::vector<double> centres;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double w = f(j) - f(i);
            bool found = false;
            for (double c : centres)
                if (std::abs(c - w) <= sigma_line) { found = true; break; }
            if (!found) centres.push_back(w);
        }
    }
    std::sort(centres.begin(), centres.end());

    double norm = 1.0 / (sigma_line * std::sqrt(2.0 * M_PI));
    auto g = [&](double x) { return norm * std::exp(-0.5 * (x / sigma_line) * (x / sigma_line)); };

    std::vector<Eigen::MatrixXd> samples;
    for (double w : centres) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nc, nc);
        for (int a = 0; a < nc; ++a)
            for (int b = 0; b < nc; ++b)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        J(a, b) += g(w - (f(j) - f(i))) *
                                   std::real(be[a](i, j) * be[b](j, i)) * rho(i);
        samples.push_back(J);
    }

    auto m = SpectralDensityModel::tabulated(centres, samples, beta_T);
    m.kind = SpectralKind::discrete_bath;
    return m;
}

/// Max over channels and listed frequencies of the detailed-balance defect
/// |J_ab(-w) - J_ba(w) e^{-beta w}| / max(|J_ba(w)|, floor).
inline double balance_residual(const SpectralDensityModel& m,
                               const std::vector<double>& omega_list,
                               double floor = 1e-30) {
    double worst = 0.0;
    for (double w : omega_list) {
        for (int a = 0; a < m.n_channels; ++a) {
            for (int b = 0; b < m.n_channels; ++b) {
                double lhs = eval(m, a, b, -w);
                double rhs = eval(m, b, a, w) * std::exp(-m.beta_T * w);
                double denom = std::max(std::abs(eval(m, b, a, w)), floor);
                worst = std::max(worst, std::abs(lhs - rhs) / denom);
            }
        }
    }
    return worst;
}

} // namespace htme
