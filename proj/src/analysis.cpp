#include "wmrecall/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wmrecall {

namespace {

void require_reduced_domain(double g_a, double tau) {
    if (!(g_a > 0.0) || !std::isfinite(g_a)) throw DomainError("g_a must be a finite positive number");
    if (!(tau > 1.0) || !std::isfinite(tau)) throw DomainError("tau must be finite and > 1");
}

/// tanh(d/2) and its first three derivatives with respect to d.
std::array<double, 4> half_tanh_derivatives(double d) {
    const double t = std::tanh(0.5 * d);
    const double sech2 = 1.0 - t * t;
    return {t, 0.5 * sech2, -0.5 * t * sech2, -0.25 * (1.0 - 3.0 * t * t) * sech2};
}

Equilibrium make_equilibrium(double d, double kappa, double g_a, double tau) {
    Equilibrium eq;
    eq.d_star = d;
    eq.e_star = g_a * std::tanh(0.5 * d);
    eq.residual = std::abs((kappa - g_a) * std::tanh(0.5 * d) - d);
    eq.eigenvalues = eigenvalues_2x2(jacobian_at(eq.d_star, eq.e_star, kappa, g_a, tau));
    eq.stability = classify_stability(eq.eigenvalues);
    eq.stable = eq.stability == Stability::Stable;
    return eq;
}

/// Positive root of (kappa - g_a) tanh(d/2) = d for kappa - g_a > 2.
double positive_root(double slope) {
    auto h = [slope](double d) { return slope * std::tanh(0.5 * d) - d; };
    double lo = 1e-12;
    double hi = slope;
    // h(lo) > 0 > h(hi); tanh < 1 keeps the root below `slope`.
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? lo : hi) = mid;
    }
    double d = 0.5 * (lo + hi);
    for (int it = 0; it < 5; ++it) {
        const double slope_h = slope * output_difference_slope(d) - 1.0;
        if (slope_h == 0.0) break;
        const double next = d - h(d) / slope_h;
        if (!(next > 0.0) || std::abs(h(next)) >= std::abs(h(d))) break;
        d = next;
    }
    return d;
}

}  // namespace

SyncBounds sync_bounds(double g_a, double tau) {
    if (!(tau > 1.0) || !std::isfinite(tau))
        throw DomainError("sync_bounds: tau must be > 1 (omega_max = g_a / (tau - 1))");
    if (!(g_a > 0.0) || !std::isfinite(g_a)) throw DomainError("sync_bounds: g_a must be positive");
    return {g_a / tau, g_a / (tau - 1.0)};
}

double lyapunov_value(const NetworkState<double>& state, const NetworkParams& params) {
    state.validate(params);
    const double beta = params.beta();
    if (!(beta > 0.0)) {
        const SyncBounds b = sync_bounds(params.g_a(), params.tau());
        std::ostringstream os;
        os << "lyapunov_value: beta = g_bar + (alpha - 1) omega = " << beta
           << " is not positive; omega = " << params.omega() << " must stay below omega_max = "
           << b.omega_max;
        throw DomainError(os.str());
    }
    const double g_bar = params.g_bar();
    const double omega = params.omega();
    double v = 0.0;
    for (Eigen::Index k = 1; k < state.s.rows(); ++k) {
        const Eigen::RowVector2d dk = state.s.row(0) - state.s.row(k);
        const Eigen::RowVector2d ek = state.a.row(0) - state.a.row(k);
        v += 0.5 * (g_bar * dk + omega * ek).squaredNorm() + 0.5 * beta * omega * dk.squaredNorm();
    }
    return v;
}

double sync_error(const NetworkState<double>& state) {
    double err = 0.0;
    for (Eigen::Index l = 1; l < state.s.rows(); ++l) {
        err = std::max(err, (state.s.row(0) - state.s.row(l)).cwiseAbs().maxCoeff());
        err = std::max(err, (state.a.row(0) - state.a.row(l)).cwiseAbs().maxCoeff());
    }
    return err;
}

std::vector<double> sync_error(const NetworkTrajectory& traj) {
    std::vector<double> out;
    out.reserve(traj.size());
    for (const auto& x : traj.states) {
        const Eigen::Index n = x.size() / 4;
        if (n < 2) throw ContractError("sync_error: needs at least 2 hypercolumns");
        double err = 0.0;
        for (Eigen::Index l = 1; l < n; ++l)
            err = std::max(err, (x.segment<4>(0) - x.segment<4>(4 * l)).cwiseAbs().maxCoeff());
        out.push_back(err);
    }
    return out;
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Marginal: return "marginal";
        case Stability::Unstable: return "unstable";
    }
    return "unknown";
}

EigenPair eigenvalues_from_trace_det(double trace, double det) {
    const double half = 0.5 * trace;
    const double disc = half * half - det;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        // Larger-magnitude root first, the other from det to avoid cancellation.
        const double big = half >= 0.0 ? half + r : half - r;
        const double small = big != 0.0 ? det / big : 0.0;
        return {std::complex<double>(std::max(big, small), 0.0), std::complex<double>(std::min(big, small), 0.0)};
    }
    const double im = std::sqrt(-disc);
    return {std::complex<double>(half, im), std::complex<double>(half, -im)};
}

EigenPair eigenvalues_2x2(const Eigen::Matrix2d& m) {
    return eigenvalues_from_trace_det(m.trace(), m.determinant());
}

Stability classify_stability(const EigenPair& ev) {
    const double re = std::max(ev[0].real(), ev[1].real());
    if (re < -kStabilityMargin) return Stability::Stable;
    if (re <= kStabilityMargin) return Stability::Marginal;
    return Stability::Unstable;
}

Eigen::Matrix2d jacobian_at(double d_star, double /*e_star*/, double kappa, double g_a, double tau) {
    const double fp = output_difference_slope(d_star);
    Eigen::Matrix2d j;
    j << -1.0 + kappa * fp, -1.0,
         g_a * fp / tau, -1.0 / tau;
    return j;
}

std::vector<Equilibrium> find_equilibria(double kappa, double g_a, double tau) {
    require_reduced_domain(g_a, tau);
    if (!std::isfinite(kappa)) throw DomainError("kappa must be finite");

    std::vector<Equilibrium> out;
    out.push_back(make_equilibrium(0.0, kappa, g_a, tau));
    const double threshold = g_a + 2.0;
    if (kappa == threshold) {
        out.front().degenerate = true;
        return out;
    }
    if (kappa < threshold) return out;

    const double d = positive_root(kappa - g_a);
    out.push_back(make_equilibrium(d, kappa, g_a, tau));
    Equilibrium neg = out.back();
    neg.d_star = -neg.d_star;
    neg.e_star = -neg.e_star;
    out.push_back(neg);
    return out;
}

CharPoly char_poly_coeffs(double kappa, double g_a, double tau) {
    if (!(tau > 1.0)) throw DomainError("char_poly_coeffs: tau must be > 1");
    return {(-2.0 * tau - 2.0 + tau * kappa) / (2.0 * tau), (-2.0 * kappa + 2.0 * g_a + 4.0) / (4.0 * tau)};
}

HopfNormalForm hopf_normal_form(double g_a, double tau) {
    require_reduced_domain(g_a, tau);
    if (!(g_a > 2.0 / tau)) throw DomainError("Hopf normal form needs g_a > 2 / tau");
    HopfNormalForm nf;
    nf.kappa_star = 2.0 * (1.0 + 1.0 / tau);
    nf.linear = jacobian_at(0.0, 0.0, nf.kappa_star, g_a, tau);
    nf.beta = std::sqrt(nf.linear.determinant());
    nf.basis << 0.0, 1.0,
                -nf.beta, 1.0 / tau;
    nf.basis_inv = nf.basis.inverse();
    return nf;
}

Pair<double> hopf_remainder(double d, double g_a, double tau) {
    const double kappa_star = 2.0 * (1.0 + 1.0 / tau);
    const double t = std::tanh(0.5 * d);
    return {(-1.0 - 1.0 / tau) * d + kappa_star * t, -g_a / (2.0 * tau) * d + g_a / tau * t};
}

Pair<double> hopf_transformed_remainder(double u, double v, double g_a, double tau) {
    const HopfNormalForm nf = hopf_normal_form(g_a, tau);
    const double d = nf.basis(0, 0) * u + nf.basis(0, 1) * v;
    return nf.basis_inv * hopf_remainder(d, g_a, tau);
}

double cubic_coefficient(double g_a, double tau) {
    const HopfNormalForm nf = hopf_normal_form(g_a, tau);
    const double kappa = nf.kappa_star;

    // Derivatives of the remainder F(d) at d = 0; the affine parts only touch order 1.
    const auto t = half_tanh_derivatives(0.0);
    const auto remainder_derivative = [&](int order) -> Pair<double> {
        return {kappa * t[order], g_a / tau * t[order]};
    };

    // d = cu * u + cv * v, so d^{p+q}/du^p dv^q of F(d) is F^{(p+q)} * cu^p * cv^q.
    const double cu = nf.basis(0, 0);
    const double cv = nf.basis(0, 1);
    const auto partial = [&](int p, int q) -> Pair<double> {
        return nf.basis_inv * remainder_derivative(p + q) * std::pow(cu, p) * std::pow(cv, q);
    };

    const Pair<double> uuu = partial(3, 0), uvv = partial(1, 2), uuv = partial(2, 1), vvv = partial(0, 3);
    const Pair<double> uu = partial(2, 0), vv = partial(0, 2), uv = partial(1, 1);
    const double f_uuu = uuu(0), f_uvv = uvv(0), g_uuv = uuv(1), g_vvv = vvv(1);
    const double f_uu = uu(0), f_vv = vv(0), f_uv = uv(0);
    const double g_uu = uu(1), g_vv = vv(1), g_uv = uv(1);

    return (f_uuu + f_uvv + g_uuv + g_vvv) / 16.0 +
           (f_uv * (f_uu + f_vv) - g_uv * (g_uu + g_vv) - f_uu * g_uu + f_vv * g_vv) / (16.0 * nf.beta);
}

HopfReport hopf_report(double g_a, double tau) {
    require_reduced_domain(g_a, tau);
    HopfReport r;
    r.kappa_star = 2.0 * (1.0 + 1.0 / tau);
    r.condition_ga = g_a > 2.0 / tau;
    const CharPoly cp = char_poly_coeffs(r.kappa_star, g_a, tau);
    r.eigenvalues_at_star = eigenvalues_from_trace_det(cp.sigma, cp.delta);
    r.beta = cp.delta > 0.0 ? std::sqrt(cp.delta) : 0.0;
    // sigma is affine in kappa with slope tau / (2 tau).
    r.transversality = tau / (2.0 * tau);
    if (r.condition_ga) r.cubic_coefficient = cubic_coefficient(g_a, tau);
    return r;
}

CorollaryReport corollary_check(int n_hypercolumns, double omega, double g_a, double tau) {
    if (n_hypercolumns < 2) throw ContractError("corollary_check: N must be >= 2");
    CorollaryReport r;
    r.n_hypercolumns = n_hypercolumns;
    r.omega = omega;
    const double n1 = static_cast<double>(n_hypercolumns - 1);
    r.kappa = n1 * omega;
    r.bounds = sync_bounds(g_a, tau);
    r.sync_condition = r.bounds.contains(omega);
    r.omega_unique_max = (g_a + 2.0) / n1;
    r.unique_equilibrium_condition = omega < r.omega_unique_max;
    r.omega_cycle_min = 2.0 / n1 * (1.0 + 1.0 / tau);
    r.ga_condition = g_a > 2.0 / tau;
    r.omega_cycle_condition = omega > r.omega_cycle_min;
    r.limit_cycle_condition = r.ga_condition && r.omega_cycle_condition;
    return r;
}

}  // namespace wmrecall
