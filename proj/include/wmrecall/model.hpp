#pragma once

// Minicolumn/hypercolumn dynamics of the two-minicolumn modular attractor network
// and its per-hypercolumn reduced (d, e) system.
//
// Every hypercolumn carries exactly two minicolumns. State blocks are N x 2 Eigen
// matrices; row i is hypercolumn i, column j is minicolumn j.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wmrecall/errors.hpp"

namespace wmrecall {

template <typename Scalar>
using Pair = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Scalar constants of the network. kappa and the Lyapunov helpers are derived on demand.
class NetworkParams {
public:
    NetworkParams(int n_hypercolumns, double omega, double g_a, double tau)
        : n_(n_hypercolumns), omega_(omega), g_a_(g_a), tau_(tau) {
        if (n_ < 2) throw ContractError("n_hypercolumns must be >= 2, got " + std::to_string(n_));
        if (!(omega_ > 0.0) || !std::isfinite(omega_))
            throw ContractError("omega must be a finite positive number");
        if (!(g_a_ > 0.0) || !std::isfinite(g_a_))
            throw ContractError("g_a must be a finite positive number");
        if (!(tau_ > 1.0) || !std::isfinite(tau_)) throw ContractError("tau must be finite and > 1");
    }

    int n_hypercolumns() const { return n_; }
    double omega() const { return omega_; }
    double g_a() const { return g_a_; }
    double tau() const { return tau_; }

    /// Effective coupling seen by one module: (N - 1) * omega.
    double kappa() const { return static_cast<double>(n_ - 1) * omega_; }
    double alpha() const { return 1.0 / tau_; }
    double g_bar() const { return alpha() * g_a_; }
    double beta() const { return g_bar() + (alpha() - 1.0) * omega_; }

private:
    int n_;
    double omega_;
    double g_a_;
    double tau_;
};

/// Parameters of the reduced per-hypercolumn system; kappa is free here.
struct ReducedParams {
    double kappa;
    double g_a;
    double tau;

    ReducedParams(double kappa_, double g_a_, double tau_) : kappa(kappa_), g_a(g_a_), tau(tau_) {
        if (!std::isfinite(kappa)) throw DomainError("kappa must be finite");
        if (!(g_a > 0.0) || !std::isfinite(g_a)) throw DomainError("g_a must be a finite positive number");
        if (!(tau > 1.0) || !std::isfinite(tau)) throw DomainError("tau must be finite and > 1");
    }

    static ReducedParams from(const NetworkParams& p) { return {p.kappa(), p.g_a(), p.tau()}; }
};

template <typename Scalar = double>
struct NetworkState {
    Block<Scalar> s;
    Block<Scalar> a;

    static NetworkState zero(int n) { return {Block<Scalar>::Zero(n, 2), Block<Scalar>::Zero(n, 2)}; }

    Eigen::Index n_hypercolumns() const { return s.rows(); }

    void validate(const NetworkParams& p) const {
        if (s.rows() != p.n_hypercolumns() || a.rows() != p.n_hypercolumns()) {
            std::ostringstream os;
            os << "state has " << s.rows() << "/" << a.rows() << " hypercolumn rows, params expect "
               << p.n_hypercolumns();
            throw ContractError(os.str());
        }
        if (!s.allFinite() || !a.allFinite()) throw DomainError("state contains non-finite entries");
    }

    /// Flat layout: per hypercolumn i, (s_i1, s_i2, a_i1, a_i2).
    VectorX<Scalar> flatten() const {
        const Eigen::Index n = s.rows();
        VectorX<Scalar> x(4 * n);
        for (Eigen::Index i = 0; i < n; ++i) {
            x.template segment<2>(4 * i) = s.row(i).transpose();
            x.template segment<2>(4 * i + 2) = a.row(i).transpose();
        }
        return x;
    }

    static NetworkState unflatten(const VectorX<Scalar>& x) {
        if (x.size() % 4 != 0 || x.size() < 8)
            throw ContractError("flat network state length must be a multiple of 4 and >= 8");
        const Eigen::Index n = x.size() / 4;
        NetworkState st{Block<Scalar>(n, 2), Block<Scalar>(n, 2)};
        for (Eigen::Index i = 0; i < n; ++i) {
            st.s.row(i) = x.template segment<2>(4 * i).transpose();
            st.a.row(i) = x.template segment<2>(4 * i + 2).transpose();
        }
        return st;
    }

    bool operator==(const NetworkState&) const = default;
};

template <typename Scalar = double>
struct ReducedState {
    Scalar d{0};
    Scalar e{0};

    Pair<Scalar> vector() const { return {d, e}; }
    static ReducedState from(const Pair<Scalar>& v) { return {v(0), v(1)}; }

    bool operator==(const ReducedState&) const = default;
};

/// Minicolumn outputs, one row per hypercolumn.
template <typename Scalar = double>
struct Output {
    Block<Scalar> o;
};

/// Two-way softmax, evaluated after subtracting the larger entry.
template <typename Scalar>
Pair<Scalar> softmax(const Pair<Scalar>& row) {
    using std::exp;
    using std::isfinite;
    if (!isfinite(row(0)) || !isfinite(row(1))) throw DomainError("softmax: non-finite input");
    const Scalar m = row.maxCoeff();
    const Pair<Scalar> w{exp(row(0) - m), exp(row(1) - m)};
    return w / w.sum();
}

template <typename Scalar>
Pair<Scalar> softmax(Scalar s1, Scalar s2) {
    return softmax(Pair<Scalar>{s1, s2});
}

/// Row-wise softmax of an N x 2 block.
template <typename Derived>
Block<typename Derived::Scalar> softmax_rows(const Eigen::MatrixBase<Derived>& s) {
    using Scalar = typename Derived::Scalar;
    Block<Scalar> o(s.rows(), 2);
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        const Scalar m = std::max(s(i, 0), s(i, 1));
        const Scalar w0 = std::exp(s(i, 0) - m);
        const Scalar w1 = std::exp(s(i, 1) - m);
        const Scalar z = w0 + w1;
        o(i, 0) = w0 / z;
        o(i, 1) = w1 / z;
    }
    return o;
}

template <typename Scalar>
Output<Scalar> outputs(const NetworkState<Scalar>& state) {
    return {softmax_rows(state.s)};
}

/// o_1 - o_2 for a hypercolumn whose activation difference is d; equals tanh(d/2).
template <typename Scalar>
Scalar output_difference(Scalar d) {
    using std::tanh;
    if (!std::isfinite(d)) throw DomainError("output_difference: non-finite input");
    return tanh(d / Scalar(2));
}

/// d/dd of output_difference: sech^2(d/2) / 2.
template <typename Scalar>
Scalar output_difference_slope(Scalar d) {
    using std::cosh;
    const Scalar c = cosh(d / Scalar(2));
    return Scalar(0.5) / (c * c);
}

/// Full network vector field:
///   ds_i = -s_i - a_i - kappa/2 + omega * sum_{k != i} softmax(s_k)
///   da_i = (g_a * softmax(s_i) - a_i) / tau
template <typename Scalar>
NetworkState<Scalar> network_rhs(const NetworkState<Scalar>& state, const NetworkParams& p) {
    if (state.s.rows() != p.n_hypercolumns() || state.a.rows() != p.n_hypercolumns()) {
        std::ostringstream os;
        os << "network_rhs: state has " << state.s.rows() << " rows, params expect "
           << p.n_hypercolumns();
        throw ContractError(os.str());
    }
    const Block<Scalar> o = softmax_rows(state.s);
    const Eigen::Matrix<Scalar, 1, 2> total = o.colwise().sum();
    const Scalar omega = Scalar(p.omega());
    const Scalar half_kappa = Scalar(p.kappa() / 2.0);

    NetworkState<Scalar> ds;
    ds.s = -state.s - state.a;
    ds.s.array() -= half_kappa;
    ds.s += omega * (total.replicate(o.rows(), 1) - o);
    ds.a = (Scalar(p.g_a()) * o - state.a) / Scalar(p.tau());
    return ds;
}

/// network_rhs on the flat (s_i1, s_i2, a_i1, a_i2)-per-hypercolumn layout, for the integrator.
class FlatNetworkRhs {
public:
    explicit FlatNetworkRhs(NetworkParams params) : p_(params) {}

    VectorX<double> operator()(const VectorX<double>& x) const {
        const Eigen::Index n = p_.n_hypercolumns();
        if (x.size() != 4 * n) throw ContractError("flat state length does not match 4*N");
        const double omega = p_.omega();
        const double half_kappa = p_.kappa() / 2.0;
        const double g_a = p_.g_a();
        const double inv_tau = 1.0 / p_.tau();

        o_.resize(n, 2);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double s1 = x(4 * i), s2 = x(4 * i + 1);
            const double m = std::max(s1, s2);
            const double w0 = std::exp(s1 - m), w1 = std::exp(s2 - m);
            const double z = w0 + w1;
            o_(i, 0) = w0 / z;
            o_(i, 1) = w1 / z;
        }
        const double t0 = o_.col(0).sum();
        const double t1 = o_.col(1).sum();

        VectorX<double> dx(x.size());
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index b = 4 * i;
            dx(b) = -x(b) - x(b + 2) - half_kappa + omega * (t0 - o_(i, 0));
            dx(b + 1) = -x(b + 1) - x(b + 3) - half_kappa + omega * (t1 - o_(i, 1));
            dx(b + 2) = (g_a * o_(i, 0) - x(b + 2)) * inv_tau;
            dx(b + 3) = (g_a * o_(i, 1) - x(b + 3)) * inv_tau;
        }
        return dx;
    }

    const NetworkParams& params() const { return p_; }

private:
    NetworkParams p_;
    mutable Block<double> o_;
};

/// Reduced system: dd = -d - e + kappa*tanh(d/2), de = (g_a*tanh(d/2) - e)/tau.
template <typename Scalar>
ReducedState<Scalar> reduced_rhs(const ReducedState<Scalar>& x, const ReducedParams& p) {
    using std::tanh;
    const Scalar f = tanh(x.d / Scalar(2));
    return {-x.d - x.e + Scalar(p.kappa) * f, (Scalar(p.g_a) * f - x.e) / Scalar(p.tau)};
}

template <typename Scalar>
ReducedState<Scalar> reduced_rhs(const ReducedState<Scalar>& x, double kappa, double g_a, double tau) {
    return reduced_rhs(x, ReducedParams{kappa, g_a, tau});
}

/// reduced_rhs on an Eigen 2-vector, for the integrator.
struct ReducedVectorField {
    ReducedParams params;

    Pair<double> operator()(const Pair<double>& x) const {
        const double f = std::tanh(0.5 * x(0));
        return {-x(0) - x(1) + params.kappa * f, (params.g_a * f - x(1)) / params.tau};
    }
};

/// Per-hypercolumn (d_i, e_i) = (s_i1 - s_i2, a_i1 - a_i2).
template <typename Scalar>
std::vector<ReducedState<Scalar>> project_reduced(const NetworkState<Scalar>& state) {
    std::vector<ReducedState<Scalar>> out;
    out.reserve(static_cast<std::size_t>(state.s.rows()));
    for (Eigen::Index i = 0; i < state.s.rows(); ++i)
        out.push_back({state.s(i, 0) - state.s(i, 1), state.a(i, 0) - state.a(i, 1)});
    return out;
}

/// True when every hypercolumn block equals the first one (within tol).
template <typename Scalar>
bool on_sync_manifold(const NetworkState<Scalar>& state, Scalar tol = Scalar(0)) {
    for (Eigen::Index i = 1; i < state.s.rows(); ++i) {
        if ((state.s.row(i) - state.s.row(0)).cwiseAbs().maxCoeff() > tol) return false;
        if ((state.a.row(i) - state.a.row(0)).cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
}

}  // namespace wmrecall
