#include "jdsse/unravelling.hpp"

#include <cmath>
#include <memory>

#include "jdsse/errors.hpp"

namespace jdsse {

namespace {

constexpr Complex kImag{0.0, 1.0};

bool all_zero(const CMat& m) { return m.cwiseAbs().maxCoeff() == 0.0; }

struct RChannelRef {
    int alpha;
    int source;  // k
};

// Shared coefficient kernels, parameterized on the precomputed K matrices
// so the public per-call functions and the built evaluators follow the
// identical arithmetic path.

double counting_intensity_l(const OperatorSet& ops, int alpha, const ComponentState& s) {
    double sum = 0.0;
    for (int j = 0; j < ops.components; ++j) sum += (ops.L[alpha][j] * s.psi[j]).squaredNorm();
    return sum;
}

double counting_intensity_r(const OperatorSet& ops, int alpha, int k, const ComponentState& s) {
    double sum = 0.0;
    for (int j = 0; j < ops.components; ++j) sum += (ops.R[alpha][j][k] * s.psi[k]).squaredNorm();
    return sum;
}

void drift_into(const OperatorSet& ops, const std::vector<CMat>& K, const ComponentState& s,
                ComponentState& out) {
    const int n = ops.components;

    double intensity_sum = 0.0;
    for (int alpha = ops.d1; alpha < ops.m1(); ++alpha)
        intensity_sum += counting_intensity_l(ops, alpha, s);
    for (int alpha = ops.d2; alpha < ops.m2(); ++alpha)
        for (int k = 0; k < n; ++k) intensity_sum += counting_intensity_r(ops, alpha, k, s);

    for (int j = 0; j < n; ++j) {
        out.psi[j] = K[j] * s.psi[j];
        out.psi[j] += (0.5 * intensity_sum) * s.psi[j];
    }
    for (int alpha = 0; alpha < ops.d1; ++alpha) {
        const double v = quadrature_mean_l(ops, alpha, s);
        if (v == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            out.psi[j] += (0.5 * v) * (ops.L[alpha][j] * s.psi[j]);
            out.psi[j] -= (0.125 * v * v) * s.psi[j];
        }
    }
    for (int alpha = 0; alpha < ops.d2; ++alpha)
        for (int k = 0; k < n; ++k) {
            const double v = quadrature_mean_r(ops, alpha, k, s);
            if (v == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                out.psi[j] += (0.5 * v) * (ops.R[alpha][j][k] * s.psi[k]);
                out.psi[j] -= (0.125 * v * v) * s.psi[j];
            }
        }
}

void diffusion_l_into(const OperatorSet& ops, int alpha, const ComponentState& s,
                      ComponentState& out) {
    const double v = quadrature_mean_l(ops, alpha, s);
    for (int j = 0; j < ops.components; ++j) {
        out.psi[j] = ops.L[alpha][j] * s.psi[j];
        out.psi[j] -= (0.5 * v) * s.psi[j];
    }
}

void diffusion_r_into(const OperatorSet& ops, int alpha, int k, const ComponentState& s,
                      ComponentState& out) {
    const double v = quadrature_mean_r(ops, alpha, k, s);
    for (int j = 0; j < ops.components; ++j) {
        out.psi[j] = ops.R[alpha][j][k] * s.psi[k];
        out.psi[j] -= (0.5 * v) * s.psi[j];
    }
}

void jump_l_into(const OperatorSet& ops, int alpha, const ComponentState& s, ComponentState& out) {
    const double intensity = counting_intensity_l(ops, alpha, s);
    if (intensity <= 1e-30)
        throw ZeroIntensityError("jump_map: L channel intensity <= 1e-30, channel cannot fire");
    const double inv = 1.0 / std::sqrt(intensity);
    for (int j = 0; j < ops.components; ++j) out.psi[j] = inv * (ops.L[alpha][j] * s.psi[j]);
}

void jump_r_into(const OperatorSet& ops, int alpha, int k, const ComponentState& s,
                 ComponentState& out) {
    const double intensity = counting_intensity_r(ops, alpha, k, s);
    if (intensity <= 1e-30)
        throw ZeroIntensityError("jump_map: R channel intensity <= 1e-30, channel cannot fire");
    const double inv = 1.0 / std::sqrt(intensity);
    for (int j = 0; j < ops.components; ++j) out.psi[j] = inv * (ops.R[alpha][j][k] * s.psi[k]);
}

}  // namespace

CMat effective_drift_operator(const OperatorSet& ops, int j) {
    CMat k = -kImag * ops.H[j];
    for (int alpha = 0; alpha < ops.m1(); ++alpha)
        k -= 0.5 * (ops.L[alpha][j].adjoint() * ops.L[alpha][j]);
    for (int alpha = 0; alpha < ops.m2(); ++alpha)
        for (int sink = 0; sink < ops.components; ++sink)
            k -= 0.5 * (ops.R[alpha][sink][j].adjoint() * ops.R[alpha][sink][j]);
    return k;
}

double quadrature_mean_l(const OperatorSet& ops, int alpha, const ComponentState& s) {
    double sum = 0.0;
    for (int j = 0; j < ops.components; ++j)
        sum += inner(s.psi[j], ops.L[alpha][j] * s.psi[j]).real();
    return 2.0 * sum;
}

double quadrature_mean_r(const OperatorSet& ops, int alpha, int k, const ComponentState& s) {
    double sum = 0.0;
    for (int j = 0; j < ops.components; ++j)
        sum += inner(s.psi[j], ops.R[alpha][j][k] * s.psi[k]).real();
    return 2.0 * sum;
}

double counting_intensity(const OperatorSet& ops, const ChannelId& channel,
                          const ComponentState& s) {
    switch (channel.kind) {
        case ChannelId::Kind::CountingL:
            return counting_intensity_l(ops, channel.alpha, s);
        case ChannelId::Kind::CountingR:
            return counting_intensity_r(ops, channel.alpha, channel.target, s);
        default:
            throw InvalidParamsError("counting_intensity: channel is not a counting channel");
    }
}

CVec drift_component(const OperatorSet& ops, int j, const ComponentState& s) {
    std::vector<CMat> k_matrices;
    k_matrices.reserve(ops.components);
    for (int i = 0; i < ops.components; ++i) k_matrices.push_back(effective_drift_operator(ops, i));
    ComponentState out = ComponentState::zeros_like(s);
    drift_into(ops, k_matrices, s, out);
    return out.psi[j];
}

ComponentState diffusion_coefficient(const OperatorSet& ops, const ChannelId& channel,
                                     const ComponentState& s) {
    ComponentState out = ComponentState::zeros_like(s);
    switch (channel.kind) {
        case ChannelId::Kind::DiffusiveL:
            diffusion_l_into(ops, channel.alpha, s, out);
            break;
        case ChannelId::Kind::DiffusiveR:
            diffusion_r_into(ops, channel.alpha, channel.target, s, out);
            break;
        default:
            throw InvalidParamsError("diffusion_coefficient: channel is not diffusive");
    }
    return out;
}

ComponentState jump_map(const OperatorSet& ops, const ChannelId& channel,
                        const ComponentState& s) {
    ComponentState out = ComponentState::zeros_like(s);
    switch (channel.kind) {
        case ChannelId::Kind::CountingL:
            jump_l_into(ops, channel.alpha, s, out);
            break;
        case ChannelId::Kind::CountingR:
            jump_r_into(ops, channel.alpha, channel.target, s, out);
            break;
        default:
            throw InvalidParamsError("jump_map: channel is not a counting channel");
    }
    return out;
}

ModelInterface build_unravelling(const OperatorSet& ops) {
    ops.validate();
    auto shared_ops = std::make_shared<const OperatorSet>(ops);
    auto k_matrices = std::make_shared<const std::vector<CMat>>([&] {
        std::vector<CMat> k;
        k.reserve(ops.components);
        for (int j = 0; j < ops.components; ++j) k.push_back(effective_drift_operator(ops, j));
        return k;
    }());

    ModelInterface model;
    model.components = ops.components;
    model.dim = ops.dim;
    model.drift = [shared_ops, k_matrices](const ComponentState& s, ComponentState& out) {
        drift_into(*shared_ops, *k_matrices, s, out);
    };

    for (int alpha = 0; alpha < ops.d1; ++alpha) {
        bool live = false;
        for (int j = 0; j < ops.components; ++j) live |= !all_zero(ops.L[alpha][j]);
        if (!live) continue;
        model.diffusion.push_back([shared_ops, alpha](const ComponentState& s, ComponentState& out) {
            diffusion_l_into(*shared_ops, alpha, s, out);
        });
    }
    for (int alpha = 0; alpha < ops.d2; ++alpha)
        for (int k = 0; k < ops.components; ++k) {
            bool live = false;
            for (int j = 0; j < ops.components; ++j) live |= !all_zero(ops.R[alpha][j][k]);
            if (!live) continue;
            model.diffusion.push_back(
                [shared_ops, alpha, k](const ComponentState& s, ComponentState& out) {
                    diffusion_r_into(*shared_ops, alpha, k, s, out);
                });
        }

    for (int alpha = ops.d1; alpha < ops.m1(); ++alpha) {
        bool live = false;
        for (int j = 0; j < ops.components; ++j) live |= !all_zero(ops.L[alpha][j]);
        if (!live) continue;
        CountingChannel channel;
        channel.name = "L" + std::to_string(alpha);
        channel.intensity = [shared_ops, alpha](const ComponentState& s) {
            return counting_intensity_l(*shared_ops, alpha, s);
        };
        channel.jump = [shared_ops, alpha](const ComponentState& s, ComponentState& out) {
            jump_l_into(*shared_ops, alpha, s, out);
        };
        model.counting.push_back(std::move(channel));
    }
    for (int alpha = ops.d2; alpha < ops.m2(); ++alpha)
        for (int k = 0; k < ops.components; ++k) {
            bool live = false;
            for (int j = 0; j < ops.components; ++j) live |= !all_zero(ops.R[alpha][j][k]);
            if (!live) continue;
            CountingChannel channel;
            channel.name = "R" + std::to_string(alpha) + "k" + std::to_string(k);
            channel.intensity = [shared_ops, alpha, k](const ComponentState& s) {
                return counting_intensity_r(*shared_ops, alpha, k, s);
            };
            channel.jump = [shared_ops, alpha, k](const ComponentState& s, ComponentState& out) {
                jump_r_into(*shared_ops, alpha, k, s, out);
            };
            model.counting.push_back(std::move(channel));
        }

    return model;
}

}  // namespace jdsse
