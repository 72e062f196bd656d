#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <atomic>
#include <cmath>
#include <thread>

#include "jdsse/ensemble.hpp"
#include "jdsse/lindblad.hpp"
#include "jdsse/unravelling.hpp"
#include "testutil.hpp"

using namespace jdsse;

namespace {

CVec vec2(Complex a, Complex b) {
    CVec v(2);
    v << a, b;
    return v;
}

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

OperatorSet empty_set() {
    OperatorSet ops;
    ops.components = 2;
    ops.dim = 2;
    ops.H = {CMat::Zero(2, 2), CMat::Zero(2, 2)};
    return ops;
}

// Single diffusive light channel sigma_- acting in both sectors.
OperatorSet emission_only_set() {
    OperatorSet ops = empty_set();
    ops.d1 = 1;
    ops.L = {{sigma_minus(), sigma_minus()}};
    return ops;
}

}  // namespace

TEST_CASE("effective drift operator of the empty set vanishes") {
    const OperatorSet ops = empty_set();
    CHECK(effective_drift_operator(ops, 0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(effective_drift_operator(ops, 1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("effective drift operators are dissipative") {
    std::mt19937_64 gen(41);
    for (int i = 0; i < 100; ++i) {
        const OperatorSet ops = testutil::random_operator_set(gen);
        for (int j = 0; j < ops.components; ++j) {
            const CMat k = effective_drift_operator(ops, j);
            Eigen::SelfAdjointEigenSolver<CMat> eig(CMat(0.5 * (k + k.adjoint())));
            CHECK(eig.eigenvalues().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("quadrature means") {
    const OperatorSet ops = emission_only_set();

    SUBCASE("no coherence") {
        const ComponentState s({vec2(kInvSqrt2, 0), vec2(0, kInvSqrt2)});
        CHECK(quadrature_mean_l(ops, 0, s) == 0.0);
    }
    SUBCASE("real coherence in sector 1") {
        const ComponentState s({vec2(0.5, 0.5), vec2(0, kInvSqrt2)});
        CHECK(quadrature_mean_l(ops, 0, s) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("imaginary coherence contributes nothing") {
        const ComponentState s({vec2(Complex(0, 0.5), 0.5), vec2(0, kInvSqrt2)});
        CHECK(quadrature_mean_l(ops, 0, s) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("R variant") {
        OperatorSet rops = empty_set();
        rops.d2 = 1;
        const CMat zero = CMat::Zero(2, 2);
        rops.R = {{{zero, sigma_plus()}, {zero, zero}}};  // R^{12} = sigma_+
        const ComponentState s({vec2(1, 0), vec2(0, 1)});
        CHECK(quadrature_mean_r(rops, 0, 1, s) == doctest::Approx(2.0).epsilon(1e-12));
        const ComponentState t({vec2(0, 1), vec2(0, 1)});
        CHECK(quadrature_mean_r(rops, 0, 1, t) == doctest::Approx(0.0).epsilon(1e-12));
        const ComponentState zero_state({vec2(1, 0), vec2(0, 1)});
        CHECK(quadrature_mean_r(rops, 0, 0, zero_state) == 0.0);  // all R^{j1} zero here
    }
}

TEST_CASE("counting intensities") {
    const CMat zero = CMat::Zero(2, 2);

    SUBCASE("decay-type R channel") {
        OperatorSet ops = empty_set();
        ops.d2 = 0;
        ops.R = {{{zero, zero}, {std::sqrt(0.5) * sigma_minus(), zero}}};  // R^{21} = sqrt(g1) sm
        const ComponentState s({vec2(kInvSqrt2, 0), vec2(0, kInvSqrt2)});
        const ChannelId channel{ChannelId::Kind::CountingR, 0, 0};
        CHECK(counting_intensity(ops, channel, s) == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("identity R channel") {
        OperatorSet ops = empty_set();
        ops.R = {{{zero, zero}, {std::sqrt(2.0) * identity2(), zero}}};
        const ComponentState s({vec2(0.5, 0.5), vec2(0, kInvSqrt2)});  // |psi_1|^2 = 0.5
        const ChannelId channel{ChannelId::Kind::CountingR, 0, 0};
        CHECK(counting_intensity(ops, channel, s) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("zero source sector") {
        OperatorSet ops = empty_set();
        ops.R = {{{zero, zero}, {sigma_minus(), zero}}};
        const ComponentState s({vec2(0, 0), vec2(0, 1)});
        const ChannelId channel{ChannelId::Kind::CountingR, 0, 0};
        CHECK(counting_intensity(ops, channel, s) == 0.0);
    }
    SUBCASE("nonnegative on random states") {
        std::mt19937_64 gen(42);
        for (int i = 0; i < 200; ++i) {
            const OperatorSet ops = testutil::random_operator_set(gen);
            const ComponentState s = testutil::random_unit_state(gen);
            CHECK(counting_intensity(ops, {ChannelId::Kind::CountingL, 1, 0}, s) >= 0.0);
            CHECK(counting_intensity(ops, {ChannelId::Kind::CountingR, 1, 0}, s) >= 0.0);
            CHECK(counting_intensity(ops, {ChannelId::Kind::CountingR, 1, 1}, s) >= 0.0);
        }
    }
}

TEST_CASE("drift of the empty set vanishes") {
    const OperatorSet ops = empty_set();
    const ComponentState s({vec2(kInvSqrt2, 0), vec2(0, kInvSqrt2)});
    CHECK(drift_component(ops, 0, s).norm() == 0.0);
    const ComponentState zero_state({vec2(0, 0), vec2(0, 0)});
    CHECK(drift_component(emission_only_set(), 0, zero_state).norm() == 0.0);
}

TEST_CASE("diffusion coefficients") {
    const OperatorSet ops = emission_only_set();
    const ChannelId channel{ChannelId::Kind::DiffusiveL, 0, 0};

    SUBCASE("excited sector 1") {
        const ComponentState s({vec2(1, 0), vec2(0, 0)});
        const ComponentState out = diffusion_coefficient(ops, channel, s);
        CHECK(testutil::max_abs_diff(out.psi[0], vec2(0, 1)) <= 1e-15);
        CHECK(out.psi[1].norm() == 0.0);
    }
    SUBCASE("annihilated state gives zero") {
        const ComponentState s({vec2(0, 1), vec2(0, 0)});
        CHECK(diffusion_coefficient(ops, channel, s).total_norm2() <= 1e-28);
    }
}

TEST_CASE("jump maps") {
    const CMat zero = CMat::Zero(2, 2);

    SUBCASE("decay-type R channel concentrates sector 2") {
        OperatorSet ops = empty_set();
        ops.R = {{{zero, zero}, {std::sqrt(0.5) * sigma_minus(), zero}}};
        const ComponentState s({vec2(kInvSqrt2, kInvSqrt2), vec2(0.1, 0.3)});
        const ComponentState out = jump_map(ops, {ChannelId::Kind::CountingR, 0, 0}, s);
        CHECK(out.psi[0].norm() == 0.0);
        CHECK(testutil::max_abs_diff(out.psi[1], vec2(0, 1)) <= 1e-12);
    }
    SUBCASE("excitation-type R channel concentrates sector 1") {
        OperatorSet ops = empty_set();
        ops.R = {{{zero, std::sqrt(0.3) * sigma_plus()}, {zero, zero}}};
        const ComponentState s({vec2(0, 0), vec2(0, kInvSqrt2)});
        const ComponentState out = jump_map(ops, {ChannelId::Kind::CountingR, 0, 1}, s);
        CHECK(testutil::max_abs_diff(out.psi[0], vec2(1, 0)) <= 1e-12);
        CHECK(out.psi[1].norm() == 0.0);
    }
    SUBCASE("zero intensity cannot fire") {
        OperatorSet ops = empty_set();
        ops.R = {{{zero, zero}, {sigma_minus(), zero}}};
        const ComponentState s({vec2(0, 1), vec2(0, 0)});  // sigma_- annihilates
        CHECK_THROWS_AS(jump_map(ops, {ChannelId::Kind::CountingR, 0, 0}, s), ZeroIntensityError);
    }
    SUBCASE("unit norm whenever the intensity is positive") {
        std::mt19937_64 gen(43);
        for (int i = 0; i < 200; ++i) {
            const OperatorSet ops = testutil::random_operator_set(gen);
            const ComponentState s = testutil::random_unit_state(gen);
            for (int k = 0; k < 2; ++k) {
                const ChannelId channel{ChannelId::Kind::CountingR, 1, k};
                if (counting_intensity(ops, channel, s) <= 1e-12) continue;
                CHECK(std::abs(jump_map(ops, channel, s).total_norm2() - 1.0) <= 1e-10);
            }
        }
    }
}

TEST_CASE("per-call coefficients equal the built evaluators") {
    std::mt19937_64 gen(44);
    for (int i = 0; i < 50; ++i) {
        const OperatorSet ops = testutil::random_operator_set(gen);
        const ModelInterface built = build_unravelling(ops);
        const ComponentState s = testutil::random_unit_state(gen);

        ComponentState drift_built = ComponentState::zeros_like(s);
        built.drift(s, drift_built);
        for (int j = 0; j < 2; ++j)
            CHECK(testutil::max_abs_diff(drift_component(ops, j, s), drift_built.psi[j]) <= 1e-14);

        // diffusive channels in build order: L alpha=0, then R (alpha=0, k=0..1)
        REQUIRE(built.diffusion.size() == 3);
        ComponentState out = ComponentState::zeros_like(s);
        built.diffusion[0](s, out);
        CHECK(testutil::max_abs_diff(diffusion_coefficient(ops, {ChannelId::Kind::DiffusiveL, 0, 0}, s),
                                     out) == 0.0);
        built.diffusion[2](s, out);
        CHECK(testutil::max_abs_diff(diffusion_coefficient(ops, {ChannelId::Kind::DiffusiveR, 0, 1}, s),
                                     out) == 0.0);

        REQUIRE(built.counting.size() == 3);  // L alpha=1, R (alpha=1, k=0..1)
        CHECK(built.counting[0].intensity(s) ==
              counting_intensity(ops, {ChannelId::Kind::CountingL, 1, 0}, s));
        CHECK(built.counting[2].intensity(s) ==
              counting_intensity(ops, {ChannelId::Kind::CountingR, 1, 1}, s));
    }
}

TEST_CASE("operator set JSON loading") {
    SUBCASE("valid document") {
        const std::string text = R"({
            "n": 1,
            "H": [[[[1.5, 0], [0, 0]], [[0, 0], [-1.5, 0]]]],
            "L": {"d1": 0, "ops": [[[[[0, 0], [0, 0]], [[1, 0], [0, 0]]]]]},
            "R": {"d2": 0, "ops": []}
        })";
        const OperatorSet ops = operator_set_from_json_text(text);
        CHECK(ops.components == 1);
        CHECK(ops.dim == 2);
        CHECK(ops.m1() == 1);
        CHECK(ops.d1 == 0);
        CHECK(testutil::max_abs_diff(ops.H[0], CMat(1.5 * sigma_z())) == 0.0);
        CHECK(testutil::max_abs_diff(ops.L[0][0], sigma_minus()) == 0.0);
        const ComponentState s({vec2(1, 0)});
        CHECK(counting_intensity(ops, {ChannelId::Kind::CountingL, 0, 0}, s) == 1.0);
    }
    SUBCASE("non-Hermitian H is rejected") {
        const std::string text = R"({
            "n": 1,
            "H": [[[[0, 0], [1, 0]], [[0, 0], [0, 0]]]]
        })";
        CHECK_THROWS_AS(operator_set_from_json_text(text), InvalidParamsError);
    }
    SUBCASE("entries must be [re, im] pairs") {
        const std::string text = R"({"n": 1, "H": [[[1.5, 0], [0, -1.5]]]})";
        CHECK_THROWS_AS(operator_set_from_json_text(text), ConfigError);
    }
    SUBCASE("malformed JSON") {
        CHECK_THROWS_AS(operator_set_from_json_text("{\"n\": 1,"), ConfigError);
    }
}

// The central claim: the trajectory ensemble of the built unravelling
// averages to the solution of the generic rate equation.
TEST_CASE("ensemble density of a random unravelling solves the rate equation") {
    std::mt19937_64 gen(45);
    const OperatorSet ops = testutil::random_operator_set(gen);
    const ModelInterface model = build_unravelling(ops);

    ComponentState initial({vec2(0.8, Complex(0.1, 0.2)), vec2(0.3, Complex(0, 0.4))});
    const double norm = std::sqrt(initial.total_norm2());
    for (auto& v : initial.psi) v /= norm;

    IntegratorConfig icfg;
    icfg.dt = 1e-3;
    icfg.t_final = 1.0;
    icfg.record_stride = 1000;
    icfg.snapshot_times = {1.0};

    constexpr int kTrajectories = 5000;
    std::vector<ComponentState> snapshots(kTrajectories);
    std::vector<char> completed(kTrajectories, 0);
    auto worker = [&](int begin, int end) {
        for (int r = begin; r < end; ++r) {
            TrajectoryRng rng(777, static_cast<std::uint64_t>(r));
            const TrajectoryRecord record = run_trajectory(model, initial, icfg, rng, Observable{});
            if (record.status == TerminationStatus::Completed) {
                snapshots[r] = record.snapshots[0];
                completed[r] = 1;
            }
        }
    };
    std::thread half(worker, 0, kTrajectories / 2);
    worker(kTrajectories / 2, kTrajectories);
    half.join();

    std::vector<ComponentState> kept;
    kept.reserve(kTrajectories);
    for (int r = 0; r < kTrajectories; ++r)
        if (completed[r]) kept.push_back(snapshots[r]);
    const long R = static_cast<long>(kept.size());
    REQUIRE(R > kTrajectories * 0.99);

    const DensityVector mc = ensemble_density(kept);

    DensityVector eta0 = {initial.psi[0] * initial.psi[0].adjoint(),
                          initial.psi[1] * initial.psi[1].adjoint()};
    const RateRhs rhs = [&](const DensityVector& eta, DensityVector& out) {
        master_rhs(ops, eta, out);
    };
    const OdeSeries series = rk4_solve(rhs, eta0, 1e-3, 1.0, 1000);
    const DensityVector& reference = series.eta.back();

    // Combined standard error: Frobenius aggregate of the per-entry sample
    // variances of the projector entries, converted to a trace-norm bound
    // via ||X||_1 <= sqrt(2) ||X||_F for 2x2 blocks.
    double combined = 0.0;
    for (int i = 0; i < 2; ++i) {
        double var_sum = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double sq = 0.0;
                for (const auto& s : kept) {
                    const Complex v = s.psi[i](a) * std::conj(s.psi[i](b)) - mc[i](a, b);
                    sq += std::norm(v);
                }
                var_sum += sq / static_cast<double>(R - 1);
            }
        combined += 0.5 * std::sqrt(2.0) * std::sqrt(var_sum / static_cast<double>(R));
    }

    const double distance = testutil::density_trace_distance(mc, reference);
    CHECK(distance <= 3.0 * combined);
    CHECK(distance <= 0.05);

    // the a priori state keeps its total trace
    CHECK(std::abs(density_total_trace(mc) - 1.0) <= 1e-12);
}
