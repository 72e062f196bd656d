#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "jdsse/errors.hpp"

namespace jdsse {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Composite wave function split across bath sectors; one complex vector
/// per sector. Convention for two-level components: index 0 = excited,
/// index 1 = ground.
struct ComponentState {
    std::vector<CVec> psi;

    ComponentState() = default;
    explicit ComponentState(std::vector<CVec> components) : psi(std::move(components)) {}

    int components() const { return static_cast<int>(psi.size()); }

    double total_norm2() const {
        double sum = 0.0;
        for (const auto& v : psi) sum += v.squaredNorm();
        return sum;
    }

    bool all_finite() const {
        for (const auto& v : psi)
            if (!v.allFinite()) return false;
        return true;
    }

    static ComponentState zeros_like(const ComponentState& other) {
        ComponentState out;
        out.psi.reserve(other.psi.size());
        for (const auto& v : other.psi) out.psi.emplace_back(CVec::Zero(v.size()));
        return out;
    }
};

/// Conjugate-linear in the first argument: sum_i conj(u_i) v_i.
inline Complex inner(const CVec& u, const CVec& v) { return u.dot(v); }

inline CVec apply(const CMat& m, const CVec& v) { return m * v; }

/// Scale all components by the common real factor that makes the total
/// norm one. Throws ZeroNormError for (numerically) zero states.
inline ComponentState normalize_state(const ComponentState& s) {
    const double n2 = s.total_norm2();
    if (!(n2 > 1e-30)) throw ZeroNormError("normalize_state: total norm^2 <= 1e-30");
    ComponentState out = s;
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& v : out.psi) v *= inv;
    return out;
}

// In-place helpers used by the integrator hot loop (no allocation when
// shapes already match).
inline void set_zero(ComponentState& s) {
    for (auto& v : s.psi) v.setZero();
}

inline void axpy(Complex a, const ComponentState& x, ComponentState& y) {
    for (std::size_t j = 0; j < y.psi.size(); ++j) y.psi[j] += a * x.psi[j];
}

inline void scale(ComponentState& s, double a) {
    for (auto& v : s.psi) v *= a;
}

// Two-level operator factories (basis: index 0 = excited, 1 = ground).
inline CMat sigma_minus() {
    CMat m = CMat::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

inline CMat sigma_plus() {
    CMat m = CMat::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

inline CMat sigma_z() {
    CMat m = CMat::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

inline CMat proj_excited() {
    CMat m = CMat::Zero(2, 2);
    m(0, 0) = 1.0;
    return m;
}

inline CMat proj_ground() {
    CMat m = CMat::Zero(2, 2);
    m(1, 1) = 1.0;
    return m;
}

inline CMat identity2() { return CMat::Identity(2, 2); }

inline bool is_hermitian(const CMat& m, double tol = 1e-12) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Ordered list of sector density matrices (eta_1, ..., eta_n).
using DensityVector = std::vector<CMat>;

inline double density_total_trace(const DensityVector& eta) {
    double tr = 0.0;
    for (const auto& m : eta) tr += m.trace().real();
    return tr;
}

}  // namespace jdsse
