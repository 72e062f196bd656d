#include "jdsse/two_band.hpp"

#include <cmath>
#include <memory>

#include "jdsse/errors.hpp"

namespace jdsse {

namespace {

constexpr Complex kImag{0.0, 1.0};

void check_positive(double value, const char* name) {
    if (!(value > 0.0)) throw InvalidParamsError(std::string(name) + " must be positive");
}

}  // namespace

void ModelParams::validate() const {
    check_positive(gamma0, "gamma0");
    check_positive(gamma1, "gamma1");
    check_positive(gamma2, "gamma2");
    check_positive(kappa, "kappa");
    check_positive(omega1, "omega1");
    check_positive(omega2, "omega2");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw InvalidParamsError("epsilon must be in (0, 1]");
}

JumpConvention jump_convention_from_string(const std::string& name) {
    if (name == "corrected") return JumpConvention::Corrected;
    if (name == "as_written") return JumpConvention::AsWritten;
    throw ConfigError("jump_convention must be \"corrected\" or \"as_written\", got \"" + name + "\"");
}

std::string to_string(JumpConvention convention) {
    return convention == JumpConvention::Corrected ? "corrected" : "as_written";
}

TwoBandModel::TwoBandModel(const ModelParams& params, JumpConvention convention,
                           bool diffusion_enabled)
    : params_(params), convention_(convention), diffusion_enabled_(diffusion_enabled) {
    params_.validate();
    const double g0 = params_.gamma0;
    const double emission = diffusion_enabled_ ? g0 : 0.0;  // gamma0 dissipator lives in the diffusive channels
    k1_excited_ = -0.5 * (emission + params_.gamma1) - 0.5 * g0 * params_.kappa -
                  0.5 * kImag * params_.omega1;
    k1_ground_ = -0.5 * g0 * params_.kappa + 0.5 * kImag * params_.omega1;
    k2_excited_ = -0.5 * emission - 0.5 * kImag * params_.omega2;
    k2_ground_ = -0.5 * params_.gamma2 + 0.5 * kImag * params_.omega2;
    sqrt_gamma0_ = std::sqrt(g0);
}

ModelIntensities TwoBandModel::intensities(const ComponentState& s) const {
    const CVec& psi1 = s.psi[0];
    const CVec& psi2 = s.psi[1];
    ModelIntensities out;
    out.decay = params_.gamma1 * std::norm(psi1(0));
    out.excitation = params_.gamma2 * std::norm(psi2(1));
    out.thermal = params_.kappa * params_.gamma0 * psi1.squaredNorm();
    return out;
}

double TwoBandModel::quadrature_mean(const ComponentState& s) const {
    // <psi | sigma_- psi> = conj(psi_ground) * psi_excited per sector.
    double sum = 0.0;
    for (const auto& psi : s.psi) sum += (std::conj(psi(1)) * psi(0)).real();
    return 2.0 * sum;
}

void TwoBandModel::drift(const ComponentState& s, ComponentState& out) const {
    if (out.psi.size() != 2 || out.psi[0].size() != 2 || out.psi[1].size() != 2)
        out = ComponentState::zeros_like(s);
    const CVec& psi1 = s.psi[0];
    const CVec& psi2 = s.psi[1];
    const double half_intensity = 0.5 * intensities(s).total();

    Complex scale_diag(half_intensity, 0.0);
    double lower_coupling = 0.0;
    if (diffusion_enabled_) {
        const double v = quadrature_mean(s);
        scale_diag -= 0.125 * params_.gamma0 * v * v;
        lower_coupling = 0.5 * params_.gamma0 * v;
    }

    out.psi[0](0) = (k1_excited_ + scale_diag) * psi1(0);
    out.psi[0](1) = (k1_ground_ + scale_diag) * psi1(1) + lower_coupling * psi1(0);
    out.psi[1](0) = (k2_excited_ + scale_diag) * psi2(0);
    out.psi[1](1) = (k2_ground_ + scale_diag) * psi2(1) + lower_coupling * psi2(0);
}

void TwoBandModel::diffusion(const ComponentState& s, ComponentState& out) const {
    if (out.psi.size() != 2 || out.psi[0].size() != 2 || out.psi[1].size() != 2)
        out = ComponentState::zeros_like(s);
    const double v = quadrature_mean(s);
    const CVec& psi1 = s.psi[0];
    // sqrt(gamma0) (sigma_- psi_j - v/2 psi_j); the printed equations reuse
    // the sector-1 expression in the second line, kept behind AsWritten.
    const CVec& psi2_arg = convention_ == JumpConvention::Corrected ? s.psi[1] : s.psi[0];
    out.psi[0](0) = -0.5 * sqrt_gamma0_ * v * psi1(0);
    out.psi[0](1) = sqrt_gamma0_ * (psi1(0) - 0.5 * v * psi1(1));
    out.psi[1](0) = -0.5 * sqrt_gamma0_ * v * psi2_arg(0);
    out.psi[1](1) = sqrt_gamma0_ * (psi2_arg(0) - 0.5 * v * psi2_arg(1));
}

ComponentState TwoBandModel::apply_jump(TwoBandChannel channel, const ComponentState& s) const {
    const ModelIntensities rates = intensities(s);
    ComponentState out = ComponentState::zeros_like(s);
    switch (channel) {
        case TwoBandChannel::Decay: {
            if (rates.decay <= 1e-30)
                throw ZeroIntensityError("decay channel cannot fire: sector-1 excited amplitude is zero");
            out.psi[1](1) = s.psi[0](0) / std::abs(s.psi[0](0));
            return out;
        }
        case TwoBandChannel::Excitation: {
            if (rates.excitation <= 1e-30)
                throw ZeroIntensityError("excitation channel cannot fire: sector-2 ground amplitude is zero");
            out.psi[0](0) = s.psi[1](1) / std::abs(s.psi[1](1));
            return out;
        }
        case TwoBandChannel::Thermal: {
            if (rates.thermal <= 1e-30)
                throw ZeroIntensityError("thermal channel cannot fire: sector-1 amplitude is zero");
            const double inv_norm = 1.0 / s.psi[0].norm();
            if (convention_ == JumpConvention::Corrected) {
                out.psi[1] = inv_norm * s.psi[0];
            } else {
                // Printed sign: psi_2 -> 2 psi_2 - psi_1 / ||psi_1||; breaks
                // normalization, excluded from acceptance runs.
                out.psi[1] = 2.0 * s.psi[1] - inv_norm * s.psi[0];
            }
            return out;
        }
    }
    throw InvalidParamsError("unknown jump channel");
}

OperatorSet TwoBandModel::operator_set() const {
    const CMat zero = CMat::Zero(2, 2);
    OperatorSet ops;
    ops.components = 2;
    ops.dim = 2;
    ops.H = {0.5 * params_.omega1 * sigma_z(), 0.5 * params_.omega2 * sigma_z()};

    // Two diffusive light channels sharing one coefficient direction.
    ops.d1 = 2;
    const CMat detected = std::sqrt(params_.gamma0 * params_.epsilon) * sigma_minus();
    const CMat lost = std::sqrt(params_.gamma0 * (1.0 - params_.epsilon)) * sigma_minus();
    ops.L = {{detected, detected}, {lost, lost}};

    // Counting channels, in TwoBandChannel order: decay, excitation, thermal.
    ops.d2 = 0;
    ops.R.assign(3, {{zero, zero}, {zero, zero}});
    ops.R[0][1][0] = std::sqrt(params_.gamma1) * sigma_minus();
    ops.R[1][0][1] = std::sqrt(params_.gamma2) * sigma_plus();
    ops.R[2][1][0] = std::sqrt(params_.gamma0 * params_.kappa) * identity2();
    return ops;
}

ModelInterface TwoBandModel::interface() const {
    auto model = std::make_shared<const TwoBandModel>(*this);
    ModelInterface out;
    out.components = 2;
    out.dim = 2;
    out.drift = [model](const ComponentState& s, ComponentState& o) { model->drift(s, o); };
    if (diffusion_enabled_)
        out.diffusion.push_back(
            [model](const ComponentState& s, ComponentState& o) { model->diffusion(s, o); });

    const auto& names = channel_names();
    for (int c = 0; c < 3; ++c) {
        const auto channel = static_cast<TwoBandChannel>(c);
        CountingChannel entry;
        entry.name = names[c];
        entry.intensity = [model, channel](const ComponentState& s) {
            const ModelIntensities rates = model->intensities(s);
            switch (channel) {
                case TwoBandChannel::Decay: return rates.decay;
                case TwoBandChannel::Excitation: return rates.excitation;
                default: return rates.thermal;
            }
        };
        entry.jump = [model, channel](const ComponentState& s, ComponentState& o) {
            o = model->apply_jump(channel, s);
        };
        out.counting.push_back(std::move(entry));
    }
    return out;
}

ComponentState TwoBandModel::make_state(const CVec& psi1, const CVec& psi2) {
    return ComponentState({psi1, psi2});
}

const std::vector<std::string>& TwoBandModel::channel_names() {
    static const std::vector<std::string> names = {"decay", "excitation", "thermal"};
    return names;
}

}  // namespace jdsse
