#include "jdsse/lindblad.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "jdsse/errors.hpp"

namespace jdsse {

namespace {

constexpr Complex kImag{0.0, 1.0};

void dissipator_add(const CMat& op, const CMat& eta, CMat& out) {
    const CMat op_eta = op * eta;
    out += op_eta * op.adjoint();
    const CMat gram = op.adjoint() * op;
    out -= 0.5 * (gram * eta + eta * gram);
}

bool density_finite(const DensityVector& eta) {
    for (const auto& m : eta)
        if (!m.allFinite()) return false;
    return true;
}

}  // namespace

void master_rhs(const OperatorSet& ops, const DensityVector& eta, DensityVector& out) {
    const int n = ops.components;
    if (static_cast<int>(out.size()) != n) out.assign(n, CMat::Zero(ops.dim, ops.dim));
    for (int i = 0; i < n; ++i) {
        out[i] = -kImag * (ops.H[i] * eta[i] - eta[i] * ops.H[i]);
        for (int alpha = 0; alpha < ops.m1(); ++alpha) dissipator_add(ops.L[alpha][i], eta[i], out[i]);
        for (int alpha = 0; alpha < ops.m2(); ++alpha) {
            for (int k = 0; k < n; ++k) {
                // Gain into sector i from sector k, loss of sector i toward sink k.
                out[i] += ops.R[alpha][i][k] * eta[k] * ops.R[alpha][i][k].adjoint();
                const CMat gram = ops.R[alpha][k][i].adjoint() * ops.R[alpha][k][i];
                out[i] -= 0.5 * (gram * eta[i] + eta[i] * gram);
            }
        }
    }
}

namespace {

void two_band_rhs_impl(const ModelParams& p, bool with_emission, const DensityVector& eta,
                       DensityVector& out) {
    if (out.size() != 2) out.assign(2, CMat::Zero(2, 2));
    const CMat sm = sigma_minus();
    const CMat sp = sigma_plus();
    const CMat p_plus = proj_excited();
    const CMat p_minus = proj_ground();
    const CMat sz = sigma_z();
    const double g0k = p.gamma0 * p.kappa;

    out[0] = -0.5 * kImag * p.omega1 * (sz * eta[0] - eta[0] * sz);
    out[0] += p.gamma2 * (sp * eta[1] * sm);
    out[0] -= 0.5 * p.gamma1 * (p_plus * eta[0] + eta[0] * p_plus);
    out[0] -= g0k * eta[0];

    out[1] = -0.5 * kImag * p.omega2 * (sz * eta[1] - eta[1] * sz);
    out[1] += p.gamma1 * (sm * eta[0] * sp);
    out[1] -= 0.5 * p.gamma2 * (p_minus * eta[1] + eta[1] * p_minus);
    out[1] += g0k * eta[0];

    if (with_emission) {
        for (int i = 0; i < 2; ++i) {
            out[i] += p.gamma0 * (sm * eta[i] * sp);
            out[i] -= 0.5 * p.gamma0 * (p_plus * eta[i] + eta[i] * p_plus);
        }
    }
}

}  // namespace

void two_band_master_rhs(const ModelParams& p, const DensityVector& eta, DensityVector& out) {
    two_band_rhs_impl(p, true, eta, out);
}

void two_band_master_rhs_no_diffusion(const ModelParams& p, const DensityVector& eta,
                                      DensityVector& out) {
    two_band_rhs_impl(p, false, eta, out);
}

OdeSeries rk4_solve(const RateRhs& rhs, DensityVector eta0, double dt, double t_final,
                    int record_stride) {
    if (!(dt > 0.0)) throw InvalidParamsError("rk4_solve: dt must be positive");
    if (record_stride < 1) throw InvalidParamsError("rk4_solve: record_stride must be >= 1");
    const long steps = std::lround(t_final / dt);

    OdeSeries series;
    series.t.reserve(steps / record_stride + 1);
    series.eta.reserve(steps / record_stride + 1);
    series.t.push_back(0.0);
    series.eta.push_back(eta0);

    DensityVector state = std::move(eta0);
    DensityVector k1, k2, k3, k4, stage;
    for (long n = 0; n < steps; ++n) {
        rhs(state, k1);
        stage = state;
        for (std::size_t i = 0; i < state.size(); ++i) stage[i] += 0.5 * dt * k1[i];
        rhs(stage, k2);
        stage = state;
        for (std::size_t i = 0; i < state.size(); ++i) stage[i] += 0.5 * dt * k2[i];
        rhs(stage, k3);
        stage = state;
        for (std::size_t i = 0; i < state.size(); ++i) stage[i] += dt * k3[i];
        rhs(stage, k4);
        for (std::size_t i = 0; i < state.size(); ++i)
            state[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        if ((n + 1) % record_stride == 0) {
            if (!density_finite(state)) throw NonFiniteError("rk4_solve: non-finite solution");
            series.t.push_back(static_cast<double>(n + 1) * dt);
            series.eta.push_back(state);
        }
    }
    return series;
}

double steady_state_excited(const ModelParams& p) {
    if (!(p.gamma0 > 0.0 && p.gamma1 > 0.0 && p.gamma2 > 0.0 && p.kappa > 0.0))
        throw DegenerateRatesError("steady_state_excited: all rates must be positive");
    const double denom = (1.0 + p.kappa) / p.kappa + p.kappa +
                         (p.gamma0 + p.gamma1 + p.gamma0 * p.kappa) / p.gamma2;
    return (1.0 + p.kappa) / denom;
}

double excited_population(const DensityVector& eta) {
    double sum = 0.0;
    for (const auto& m : eta) sum += m(0, 0).real();
    return sum;
}

void write_ode_csv(const std::string& path, const OdeSeries& series) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    out << "t,eta1_11,eta1_22,eta1_12_re,eta1_12_im,"
           "eta2_11,eta2_22,eta2_12_re,eta2_12_im,excited_population\n";
    char buf[512];
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        const CMat& e1 = series.eta[i][0];
        const CMat& e2 = series.eta[i][1];
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      series.t[i], e1(0, 0).real(), e1(1, 1).real(), e1(0, 1).real(),
                      e1(0, 1).imag(), e2(0, 0).real(), e2(1, 1).real(), e2(0, 1).real(),
                      e2(0, 1).imag(), excited_population(series.eta[i]));
        out << buf;
    }
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace jdsse
