#pragma once

#include <functional>
#include <string>
#include <vector>

#include "jdsse/linalg.hpp"
#include "jdsse/operator_set.hpp"
#include "jdsse/two_band.hpp"

namespace jdsse {

using RateRhs = std::function<void(const DensityVector&, DensityVector&)>;

/// Generic rate-equation right-hand side for an operator set:
/// d(eta_i)/dt = -i[H^i, eta_i]
///   + sum_a (L^i_a eta_i L^i_a* - 1/2 {L^i_a* L^i_a, eta_i})
///   + sum_{a,k} (R^{ik}_a eta_k R^{ik}_a* - 1/2 {R^{ki}_a* R^{ki}_a, eta_i}).
/// The summed trace of the output vanishes identically.
void master_rhs(const OperatorSet& ops, const DensityVector& eta, DensityVector& out);

/// Closed-form two-band rate equations (both sector lines, including the
/// -gamma0*kappa eta_1 / +gamma0*kappa eta_1 exchange).
void two_band_master_rhs(const ModelParams& p, const DensityVector& eta, DensityVector& out);

/// Two-band rate equations with the gamma0 emission dissipator removed from
/// both lines (the thermal kappa*gamma0 channel is retained); the reference
/// for diffusion-off simulations.
void two_band_master_rhs_no_diffusion(const ModelParams& p, const DensityVector& eta,
                                      DensityVector& out);

struct OdeSeries {
    std::vector<double> t;
    std::vector<DensityVector> eta;
};

/// Classical fixed-step RK4. Records every `record_stride`-th step
/// (including t = 0). Throws NonFiniteError if the solution blows up.
OdeSeries rk4_solve(const RateRhs& rhs, DensityVector eta0, double dt, double t_final,
                    int record_stride = 1);

/// Long-time excited population of the two-band model,
/// (1 + kappa) / ((1 + kappa)/kappa + kappa + (gamma0 + gamma1 + gamma0*kappa)/gamma2).
/// Throws DegenerateRatesError when any rate is <= 0.
double steady_state_excited(const ModelParams& p);

/// tr(P+ eta_1) + tr(P+ eta_2) for two-level sectors.
double excited_population(const DensityVector& eta);

/// Columns: t, eta1_11, eta1_22, eta1_12_re, eta1_12_im, eta2_11, eta2_22,
/// eta2_12_re, eta2_12_im, excited_population.
void write_ode_csv(const std::string& path, const OdeSeries& series);

}  // namespace jdsse
