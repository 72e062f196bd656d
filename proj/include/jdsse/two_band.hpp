#pragma once

#include <string>
#include <vector>

#include "jdsse/operator_set.hpp"
#include "jdsse/sse_engine.hpp"

namespace jdsse {

/// Physical rates of the two-level system coupled to a two-band bath.
/// All rates are in scaled angular-frequency units.
struct ModelParams {
    double gamma0 = 1.0;   // spontaneous emission rate
    double gamma1 = 0.5;   // band transition rate, sector 1 -> 2 with decay
    double gamma2 = 0.3;   // band transition rate, sector 2 -> 1 with excitation
    double kappa = 2.0;    // thermal excitation factor (rate kappa * gamma0)
    double omega1 = 3.0413812651491097;  // sqrt(37)/2
    double omega2 = 3.0413812651491097;
    double epsilon = 1.0;  // detector efficiency split of the emitted light

    /// gamma_i > 0, kappa > 0, omega_i > 0, 0 < epsilon <= 1.
    /// Throws InvalidParamsError naming the offending field.
    void validate() const;
};

/// Resolves the sign/argument discrepancies of the printed model equations.
/// Corrected is the default and the only convention whose jump maps keep the
/// state normalized; AsWritten reproduces the printed terms verbatim for
/// comparison runs.
enum class JumpConvention { Corrected, AsWritten };

JumpConvention jump_convention_from_string(const std::string& name);
std::string to_string(JumpConvention convention);

/// The three counting channels, in the engine's channel order.
enum class TwoBandChannel : int {
    Decay = 0,       // sector 1 -> 2, system decays (rate gamma1)
    Excitation = 1,  // sector 2 -> 1, system excited (rate gamma2)
    Thermal = 2,     // sector 1 -> 2, state carried over (rate kappa * gamma0)
};

struct ModelIntensities {
    double decay = 0.0;
    double excitation = 0.0;
    double thermal = 0.0;
    double total() const { return decay + excitation + thermal; }
};

/// Closed-form SSE coefficients for the two-band model. The same dynamics
/// is reproduced, coefficient by coefficient, by build_unravelling applied
/// to operator_set(); this class is the fast path the CLI runs.
class TwoBandModel {
public:
    explicit TwoBandModel(const ModelParams& params,
                          JumpConvention convention = JumpConvention::Corrected,
                          bool diffusion_enabled = true);

    const ModelParams& params() const { return params_; }
    JumpConvention convention() const { return convention_; }
    bool diffusion_enabled() const { return diffusion_enabled_; }

    ModelIntensities intensities(const ComponentState& s) const;

    /// v(t) = 2 sum_k Re<psi_k | sigma_- psi_k>; invariant under a global phase.
    double quadrature_mean(const ComponentState& s) const;

    void drift(const ComponentState& s, ComponentState& out) const;

    /// Coefficient of the single effective Wiener increment. The two
    /// physical light channels share this vector, so their sqrt(eps) /
    /// sqrt(1-eps) split never changes the state law.
    void diffusion(const ComponentState& s, ComponentState& out) const;

    ComponentState apply_jump(TwoBandChannel channel, const ComponentState& s) const;

    /// Operator family that regenerates all coefficients above through
    /// build_unravelling (corrected convention).
    OperatorSet operator_set() const;

    ModelInterface interface() const;

    static ComponentState make_state(const CVec& psi1, const CVec& psi2);
    static const std::vector<std::string>& channel_names();

private:
    ModelParams params_;
    JumpConvention convention_;
    bool diffusion_enabled_;
    // Diagonal entries of the effective drift operators K^1, K^2
    // (diffusion-off runs drop the gamma0 dissipator contribution).
    Complex k1_excited_, k1_ground_, k2_excited_, k2_ground_;
    double sqrt_gamma0_;
};

}  // namespace jdsse
