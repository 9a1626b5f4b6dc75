#pragma once

// Closed-form and numerical analysis of the network: synchronization bounds and the
// Lyapunov certificate, equilibria of the reduced system with their linearization,
// and the Hopf point at the origin with its first Lyapunov (cubic) coefficient.

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "wmrecall/integrator.hpp"
#include "wmrecall/model.hpp"

namespace wmrecall {

/// Real part below -kStabilityMargin counts as stable; |Re| <= kStabilityMargin is marginal.
inline constexpr double kStabilityMargin = 1e-9;

using EigenPair = std::array<std::complex<double>, 2>;

struct SyncBounds {
    double omega_min;
    double omega_max;

    bool contains(double omega) const { return omega_min < omega && omega < omega_max; }
};

/// (g_a / tau, g_a / (tau - 1)); omega strictly inside guarantees convergence to the sync manifold.
SyncBounds sync_bounds(double g_a, double tau);

/// Sum over k >= 2 of 1/2 |g_bar D_k + omega E_k|^2 + 1/2 beta omega |D_k|^2,
/// with D_k = s_1 - s_k and E_k = a_1 - a_k. Requires beta > 0.
double lyapunov_value(const NetworkState<double>& state, const NetworkParams& params);

/// Largest |s_1j - s_lj| or |a_1j - a_lj| over l and j, per trajectory sample.
std::vector<double> sync_error(const NetworkTrajectory& traj);
double sync_error(const NetworkState<double>& state);

enum class Stability { Stable, Marginal, Unstable };

const char* to_string(Stability s);

struct Equilibrium {
    double d_star = 0.0;
    double e_star = 0.0;
    EigenPair eigenvalues{};
    bool stable = false;
    Stability stability = Stability::Unstable;
    /// Set only for the origin at kappa == g_a + 2, where the pitchfork happens.
    bool degenerate = false;
    /// |(kappa - g_a) tanh(d*/2) - d*|
    double residual = 0.0;
};

/// Equilibria of the reduced system ordered (origin, +d*, -d*).
std::vector<Equilibrium> find_equilibria(double kappa, double g_a, double tau);

/// Jacobian of reduced_rhs at (d, e); it does not depend on e.
Eigen::Matrix2d jacobian_at(double d_star, double e_star, double kappa, double g_a, double tau);

/// Eigenvalues of a real 2x2 matrix from its trace and determinant.
EigenPair eigenvalues_from_trace_det(double trace, double det);
EigenPair eigenvalues_2x2(const Eigen::Matrix2d& m);
Stability classify_stability(const EigenPair& ev);

/// rho(lambda) = lambda^2 - sigma lambda + delta at the origin.
struct CharPoly {
    double sigma;
    double delta;
};

CharPoly char_poly_coeffs(double kappa, double g_a, double tau);

struct HopfReport {
    double kappa_star;
    /// g_a > 2 / tau; false means the origin never loses stability through a complex pair.
    bool condition_ga;
    EigenPair eigenvalues_at_star;
    double beta;
    double transversality;
    std::optional<double> cubic_coefficient;
};

HopfReport hopf_report(double g_a, double tau);

/// Ingredients of the normal-form computation at kappa* = 2 (1 + 1/tau).
struct HopfNormalForm {
    double kappa_star;
    double beta;
    Eigen::Matrix2d linear;      // jacobian at origin, kappa*
    Eigen::Matrix2d basis;       // (d, e) = basis * (u, v)
    Eigen::Matrix2d basis_inv;
};

HopfNormalForm hopf_normal_form(double g_a, double tau);

/// Nonlinear remainder (F1, F2) of the reduced field at kappa*, as a function of d.
Pair<double> hopf_remainder(double d, double g_a, double tau);

/// Nonlinear part of the field in (u, v) coordinates: basis_inv * F(d(u, v)).
Pair<double> hopf_transformed_remainder(double u, double v, double g_a, double tau);

/// First Lyapunov coefficient of the planar normal form
///   a = 1/16 (f_uuu + f_uvv + g_uuv + g_vvv)
///     + 1/(16 beta) (f_uv (f_uu + f_vv) - g_uv (g_uu + g_vv) - f_uu g_uu + f_vv g_vv)
/// with analytic derivatives. Requires g_a > 2 / tau.
double cubic_coefficient(double g_a, double tau);

struct CorollaryReport {
    int n_hypercolumns;
    double omega;
    double kappa;
    SyncBounds bounds;
    bool sync_condition;
    double omega_unique_max;       // (g_a + 2) / (N - 1)
    bool unique_equilibrium_condition;
    double omega_cycle_min;        // 2 (1 + 1/tau) / (N - 1)
    bool ga_condition;             // g_a > 2 / tau
    bool omega_cycle_condition;    // omega > omega_cycle_min
    bool limit_cycle_condition;    // both of the above

    bool all_satisfied() const {
        return sync_condition && unique_equilibrium_condition && limit_cycle_condition;
    }
};

CorollaryReport corollary_check(int n_hypercolumns, double omega, double g_a, double tau);

}  // namespace wmrecall
