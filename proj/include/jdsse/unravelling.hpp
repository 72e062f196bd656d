#pragma once

#include "jdsse/operator_set.hpp"
#include "jdsse/sse_engine.hpp"

namespace jdsse {

/// Effective non-Hermitian drift operator for sector j:
/// K^j = -i H^j - 1/2 sum_a L^j_a* L^j_a - 1/2 sum_{a,k} R^{kj}_a* R^{kj}_a.
/// Its Hermitian part is negative semidefinite.
CMat effective_drift_operator(const OperatorSet& ops, int j);

/// Instantaneous mean of the diffusive measurement signal for L channel
/// alpha: 2 sum_j Re<psi_j | L^j_alpha psi_j>. The sum over sectors makes
/// the nonlinear equation norm preserving.
double quadrature_mean_l(const OperatorSet& ops, int alpha, const ComponentState& s);

/// Same for R channel (alpha, source sector k): 2 sum_j Re<psi_j | R^{jk}_alpha psi_k>.
double quadrature_mean_r(const OperatorSet& ops, int alpha, int k, const ComponentState& s);

/// Counting intensity of a channel. For L channels sum_j ||L^j_a psi_j||^2;
/// for R channels with source sector k, sum_j ||R^{jk}_a psi_k||^2, which is
/// the normalization the jump map divides by.
double counting_intensity(const OperatorSet& ops, const ChannelId& channel,
                          const ComponentState& s);

/// Deterministic drift of sector j, including the counting compensators and
/// the quadratic quadrature terms.
CVec drift_component(const OperatorSet& ops, int j, const ComponentState& s);

/// Diffusion coefficient vectors (one per sector) of a diffusive channel:
/// (L^j_a - 1/2 v_a) psi_j for L channels, R^{jk}_a psi_k - 1/2 v^k_a psi_j
/// for R channels.
ComponentState diffusion_coefficient(const OperatorSet& ops, const ChannelId& channel,
                                     const ComponentState& s);

/// Normalized post-jump state of a counting channel. Throws
/// ZeroIntensityError when the channel intensity is <= 1e-30.
ComponentState jump_map(const OperatorSet& ops, const ChannelId& channel,
                        const ComponentState& s);

/// Wire the coefficient functions of an operator set into an engine-ready
/// evaluator bundle. Channels whose operators are identically zero are
/// dropped; remaining channels keep the order (L by alpha, then R by
/// (alpha, source sector)). The drift matrices K^j are precomputed once.
ModelInterface build_unravelling(const OperatorSet& ops);

}  // namespace jdsse
