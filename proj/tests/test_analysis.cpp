#include "qsmb/analysis.hpp"

#include "qsmb/gates.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace qsmb;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> grid50() {
    std::vector<double> g(50);
    for (int k = 0; k < 50; ++k) g[k] = 2.0 * kPi * k / 50.0;
    return g;
}

// Records with exact (sampling-free) counts for a given per-phi0 probability.
std::vector<ExperimentRecord> exact_records(const std::vector<double>& phi0,
                                            const std::vector<double>& p, int shots) {
    std::vector<ExperimentRecord> records;
    for (std::size_t i = 0; i < phi0.size(); ++i) {
        ExperimentRecord r;
        r.device_label = "synthetic";
        r.qubit_set = {0, 1};
        r.n_iterations = 1;
        r.epsilon = 0.973;
        r.theta0 = kPi / 8.0;
        r.phi0 = phi0[i];
        r.run_index = 0;
        r.shots = shots;
        r.success_count = static_cast<int>(std::lround(p[i] * shots));
        records.push_back(std::move(r));
    }
    return records;
}
}  // namespace

TEST_CASE("sigma_stat") {
    CHECK(sigma_stat(0.0, 100) == 0.0);
    CHECK(sigma_stat(1.0, 100) == 0.0);
    CHECK(sigma_stat(0.8775, 10000) == Approx(0.0032786).epsilon(1e-3));
    CHECK(sigma_stat(0.3, 4000) == Approx(0.5 * sigma_stat(0.3, 1000)).epsilon(1e-12));
    CHECK_THROWS_AS(sigma_stat(0.5, 0), std::invalid_argument);
}

TEST_CASE("aggregate") {
    SUBCASE("pools runs and reduces over phi0") {
        std::vector<ExperimentRecord> records;
        for (int run = 0; run < 2; ++run) {
            for (double phi0 : {0.0, 1.0}) {
                ExperimentRecord r;
                r.device_label = "dev";
                r.n_iterations = 1;
                r.epsilon = 0.9;
                r.theta0 = 0.4;
                r.phi0 = phi0;
                r.run_index = run;
                r.shots = 1000;
                r.success_count = phi0 == 0.0 ? 400 : 450;
                records.push_back(r);
            }
        }
        const Aggregate agg = aggregate(records);
        CHECK(agg.shots_per_point == 2000);
        CHECK(agg.estimates == std::vector<double>{0.4, 0.45});
        CHECK(agg.mean == Approx(0.425).epsilon(1e-15));
        CHECK(agg.sigma_exp == Approx(0.025).epsilon(1e-12));
    }

    SUBCASE("two-point hand example") {
        const auto records = exact_records({0.0, 1.0}, {0.8, 0.9}, 1000);
        const Aggregate agg = aggregate(records);
        CHECK(agg.mean == Approx(0.85).epsilon(1e-12));
        CHECK(agg.sigma_exp == Approx(0.05).epsilon(1e-12));
    }

    SUBCASE("equal counts give zero spread") {
        const auto records = exact_records(grid50(), std::vector<double>(50, 0.73), 1000);
        CHECK(aggregate(records).sigma_exp < 1e-15);  // mean accumulation dust only
    }

    SUBCASE("ragged grids are rejected") {
        auto records = exact_records({0.0, 1.0}, {0.8, 0.9}, 1000);
        records.back().shots = 500;
        CHECK_THROWS_AS(aggregate(records), std::invalid_argument);
    }

    SUBCASE("mixed groups are rejected") {
        auto records = exact_records({0.0, 1.0}, {0.8, 0.9}, 1000);
        records.back().device_label = "other";
        CHECK_THROWS_AS(aggregate(records), std::invalid_argument);
    }
}

TEST_CASE("metric_f reproduces the reported scores") {
    const double ps = 0.8775;
    const double ratios[] = {1.014, 0.977, 0.974, 0.970, 0.940};
    const double expected[] = {0.986, 0.977, 0.974, 0.970, 0.940};
    for (int i = 0; i < 5; ++i) {
        CHECK(metric_f(ratios[i] * ps, ps) == Approx(expected[i]).epsilon(1e-9));
    }
    CHECK(metric_f(0.5, 0.5) == 1.0);
    // deviations beyond 100% go negative and are reported raw
    CHECK(metric_f(1.9, 0.9) < 1.0);
    CHECK(metric_f(0.0001, 0.9) > 0.0);
    CHECK_THROWS_AS(metric_f(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("metric_s") {
    CHECK(metric_s(0.01, 0.01) == 1.0);
    CHECK_THROWS_AS(metric_s(0.01, 0.0), std::invalid_argument);

    // lima one-iteration row: S = 3.812 given its sigma inputs
    const double sigma = sigma_stat(0.8775, 10000);
    CHECK(metric_s(3.812 * sigma, sigma) == Approx(3.812).epsilon(1e-12));
    // nairobi two-iteration row, same consistency reading
    const double sigma2 = sigma_stat(0.7267, 10000);
    CHECK(metric_s(9.953 * sigma2, sigma2) == Approx(9.953).epsilon(1e-12));
}

TEST_CASE("metric scale consistency") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(0.1, 3.0);
    for (int i = 0; i < 10; ++i) {
        const double c = dist(rng);
        CHECK(metric_f(c * 0.82, c * 0.87) == Approx(metric_f(0.82, 0.87)).epsilon(1e-12));
        CHECK(metric_s(c * 0.013, c * 0.003) == Approx(metric_s(0.013, 0.003)).epsilon(1e-12));
    }

    // duplicating every record leaves F and the spread unchanged
    auto records = exact_records(grid50(), std::vector<double>(50, 0.85), 1000);
    auto doubled = records;
    for (auto r : records) {
        r.run_index += 1;
        doubled.push_back(r);
    }
    CHECK(aggregate(doubled).mean == aggregate(records).mean);
    CHECK(aggregate(doubled).sigma_exp == aggregate(records).sigma_exp);
}

TEST_CASE("make_metric_report needs a grid") {
    const auto single = exact_records({0.3}, {0.8}, 1000);
    CHECK_THROWS_AS(make_metric_report(single), std::invalid_argument);
}

TEST_CASE("process and average gate fidelity") {
    std::mt19937 dummy(1);
    const ComplexMatrix i2 = ComplexMatrix::identity(2);

    CHECK(process_fidelity_unitary(gates::hadamard(), gates::hadamard()) ==
          Approx(1.0).epsilon(1e-14));

    for (double alpha : {0.01, 0.2, 1.1}) {
        const double f = process_fidelity_unitary(gates::rx(alpha), i2);
        CHECK(f == Approx(std::cos(alpha / 2.0) * std::cos(alpha / 2.0)).epsilon(1e-13));
        const double f_neg = process_fidelity_unitary(gates::rx(-alpha), i2);
        CHECK(std::abs(f - f_neg) < 1e-14);
    }

    CHECK_THROWS_AS(process_fidelity_unitary(i2, ComplexMatrix::identity(4)),
                    std::invalid_argument);

    CHECK(average_gate_fidelity(1.0, 2) == 1.0);
    CHECK(average_gate_fidelity(1.0, 4) == 1.0);
    const double alpha = 0.3;
    const double f = std::cos(alpha / 2.0) * std::cos(alpha / 2.0);
    CHECK(average_gate_fidelity(f, 2) == Approx((2.0 * f + 1.0) / 3.0).epsilon(1e-14));
}

TEST_CASE("misrotation_bound") {
    SUBCASE("perfect gates leave no room") {
        const FidelityBundle perfect = FidelityBundle::from_gate_errors({0.0, 0.0});
        CHECK(misrotation_bound(perfect, MisrotationGate::SqrtX) < 1e-5);
    }

    SUBCASE("monotone in the gate error") {
        double prev = 0.0;
        for (double err : {1e-4, 5e-4, 2e-3, 1e-2}) {
            const FidelityBundle b = FidelityBundle::from_gate_errors({err});
            const double bound = misrotation_bound(b, MisrotationGate::SqrtX);
            CHECK(bound > prev);
            prev = bound;
        }
    }

    SUBCASE("matches the closed-form inversion at the nairobi scale") {
        // F_ave(alpha) = (2 cos^2(alpha/2) + 1) / 3 at alpha = 5.26e-2
        const double alpha = 5.26e-2;
        const double c = std::cos(alpha / 2.0);
        const double f_target = (2.0 * c * c + 1.0) / 3.0;
        FidelityBundle b;
        b.gate_errors = {1.0 - f_target};
        b.f_mean = f_target;
        b.sigma_f = 0.0;
        CHECK(misrotation_bound(b, MisrotationGate::SqrtX) == Approx(alpha).epsilon(1e-6));
    }

    SUBCASE("cr curve uses dimension four") {
        // F_ave(lambda) = (4 cos^2(lambda) + 1) / 5
        const double lambda = 7.25e-2;
        const double c = std::cos(lambda);
        const double f_target = (4.0 * c * c + 1.0) / 5.0;
        FidelityBundle b;
        b.gate_errors = {1.0 - f_target};
        b.f_mean = f_target;
        b.sigma_f = 0.0;
        CHECK(misrotation_bound(b, MisrotationGate::Cr) == Approx(lambda).epsilon(1e-6));
    }

    SUBCASE("fidelity too low for the model") {
        FidelityBundle b;
        b.gate_errors = {0.9};
        b.f_mean = 0.1;
        b.sigma_f = 0.0;
        CHECK_THROWS_AS(misrotation_bound(b, MisrotationGate::SqrtX), std::invalid_argument);
    }
}

TEST_CASE("shift models") {
    const ShiftContext ctx{0.973, kPi / 8.0, 1};
    const double ideal = success_probability(0.973, kPi / 8.0, 1);

    SUBCASE("identity when the mean matches") {
        CHECK(fit_shift(ideal, ideal, ShiftModel::Depolarizing, ctx) == Approx(0.0).epsilon(1e-12));
        CHECK(fit_shift(ideal, ideal, ShiftModel::AmplitudeDamping, ctx) ==
              Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("depolarizing roundtrip") {
        const double p_dep = 0.0646;  // oslo scale
        const double shifted = apply_shift(ideal, ShiftModel::Depolarizing, p_dep, ctx);
        CHECK(shifted == Approx(analytic_ps_dep(ideal, p_dep, 4)).epsilon(1e-14));
        CHECK(fit_shift(shifted, ideal, ShiftModel::Depolarizing, ctx) ==
              Approx(p_dep).epsilon(1e-12));
        CHECK(invert_shift(shifted, ShiftModel::Depolarizing, p_dep, ctx) ==
              Approx(ideal).epsilon(1e-12));
    }

    SUBCASE("damping roundtrip agrees with the analytic formula") {
        const double gamma = 0.0121;  // nairobi scale
        const double z2 = std::pow(std::tan(kPi / 16.0), 2.0);
        const double expected = analytic_ps_ad(std::sqrt(z2), 0.973, gamma);
        const double shifted = apply_shift(ideal, ShiftModel::AmplitudeDamping, gamma, ctx);
        CHECK(shifted == Approx(expected).epsilon(1e-13));
        CHECK(fit_shift(shifted, ideal, ShiftModel::AmplitudeDamping, ctx) ==
              Approx(gamma).epsilon(1e-12));
    }

    SUBCASE("sampled depolarizing records recover the parameter within 2 sigma") {
        const double p_dep = 0.0646;  // oslo scale
        ExperimentPlan plan;
        plan.base = {0.973, kPi / 8.0, 0.0, 1};
        plan.phi0_grid = grid50();
        plan.shots = 2000;
        plan.runs = 5;
        plan.seed = 31;
        plan.noise.per_step_dep = {p_dep};
        const Aggregate agg = aggregate(run_experiment(plan));
        const double fitted = fit_shift(agg.mean, ideal, ShiftModel::Depolarizing, ctx,
                                        sigma_stat(ideal, agg.shots_per_point));
        // sigma of the recovered parameter: sigma_mean / (ideal - 2/D)
        const double sigma_p = sigma_stat(ideal, agg.shots_per_point) / std::sqrt(50.0) /
                               (ideal - 2.0 / ctx.dim());
        CHECK(std::abs(fitted - p_dep) < 2.0 * sigma_p);
    }

    SUBCASE("model auto-selection") {
        const double sigma = 0.001;
        CHECK(select_shift_model(ideal - 0.05, ideal, sigma, ctx) == ShiftModel::Depolarizing);
        CHECK(select_shift_model(ideal + 0.01, ideal, sigma, ctx) ==
              ShiftModel::AmplitudeDamping);
        // near-ties default to depolarizing
        CHECK(select_shift_model(ideal + 0.0005, ideal, sigma, ctx) == ShiftModel::Depolarizing);
        // two iterations cannot use the damping shift
        const ShiftContext ctx2{0.973, kPi / 8.0, 2};
        CHECK(select_shift_model(0.9, 0.7267, sigma, ctx2) == ShiftModel::Depolarizing);
    }

    SUBCASE("out-of-range parameters are rejected with diagnostics") {
        CHECK_THROWS_AS(fit_shift(0.1, ideal, ShiftModel::Depolarizing, ctx),
                        std::invalid_argument);
        const ShiftContext ctx2{0.973, kPi / 8.0, 2};
        CHECK_THROWS_AS(fit_shift(0.9, 0.7, ShiftModel::AmplitudeDamping, ctx2),
                        std::invalid_argument);
    }
}

TEST_CASE("coherent_parameters discovery") {
    ProtocolConfig cfg{0.973, kPi / 8.0, 0.0, 2};
    const NativeCircuit native = transpile_circuit(build_circuit(cfg), CouplingMap::linear(4));
    const auto params = coherent_parameters(native, 0.1);
    int alphas = 0, lambdas = 0;
    for (const AngleParameter& p : params) {
        if (p.kind == AngleParameter::Kind::Alpha) ++alphas;
        if (p.kind == AngleParameter::Kind::Lambda) ++lambdas;
        CHECK(p.bound == 0.1);
    }
    CHECK(alphas == 4);
    CHECK(lambdas == 4);  // (0,1), (2,3) and the two SWAP orientations collapse into 4 pairs
}

TEST_CASE("forward model reduces to the closed form at zero angles") {
    ProtocolConfig cfg{0.973, kPi / 8.0, 0.0, 1};
    const double ideal = success_probability(cfg.epsilon, cfg.theta0, 1);
    for (double phi0 : grid50()) {
        cfg.phi0 = phi0;
        const NativeCircuit native =
            transpile_circuit(build_circuit(cfg), CouplingMap::linear(2));
        const auto psi = run_statevector(native, NoiseSpec{});
        const double p = success_from_unitary_column(psi, native.kept_qubit,
                                                     native.postselect_qubits);
        CHECK(std::abs(p - ideal) < 1e-12);
    }
}

TEST_CASE("fit_coherent recovers angles from noiseless curves") {
    ProtocolConfig cfg{0.973, kPi / 8.0, 0.0, 1};
    std::vector<NativeCircuit> circuits;
    for (double phi0 : grid50()) {
        cfg.phi0 = phi0;
        circuits.push_back(transpile_circuit(build_circuit(cfg), CouplingMap::linear(2)));
    }
    std::vector<AngleParameter> params = coherent_parameters(circuits.front(), 0.08);
    REQUIRE(params.size() == 3);

    const ForwardModel model = [&](std::span<const double> angles) {
        NoiseSpec noise;
        noise.alphas[params[0].q0] = angles[0];
        noise.alphas[params[1].q0] = angles[1];
        noise.lambdas[{params[2].q0, params[2].q1}] = angles[2];
        std::vector<double> curve;
        for (const NativeCircuit& c : circuits) {
            const auto psi = run_statevector(c, noise);
            curve.push_back(
                success_from_unitary_column(psi, c.kept_qubit, c.postselect_qubits));
        }
        return curve;
    };

    SUBCASE("null data gives null angles") {
        const std::vector<double> truth(3, 0.0);
        const auto data = model(truth);
        const CoherentFitResult fit = fit_coherent(data, model, params);
        for (double a : fit.angles) CHECK(std::abs(a) < 1e-6);
        CHECK(fit.residual_rms < 1e-9);
    }

    SUBCASE("nairobi-scale generator values are recovered") {
        const std::vector<double> truth{2.83e-2, 4.45e-2, -1.78e-2};
        const auto data = model(truth);
        const CoherentFitResult fit = fit_coherent(data, model, params);
        CHECK(fit.residual_rms < 1e-7);
        for (int j = 0; j < 3; ++j) {
            CHECK(std::abs(fit.angles[j] - truth[j]) < 2e-3);
        }
    }
}

TEST_CASE("fit_pipeline") {
    ExperimentPlan plan;
    plan.base = {0.973, kPi / 8.0, 0.0, 1};
    plan.phi0_grid = grid50();
    plan.shots = 2000;
    plan.runs = 5;
    plan.seed = 77;
    plan.coupling = CouplingMap::linear(2);

    FitOptions options;
    options.alpha_bounds[0] = 5.26e-2;
    options.alpha_bounds[1] = 4.45e-2;
    options.lambda_bounds[{0, 1}] = 7.25e-2;

    SUBCASE("noiseless data yields a flat, near-zero fit") {
        const auto records = run_experiment(plan);
        const FitResult fit = fit_pipeline(records, options);
        const double sigma = sigma_stat(success_probability(0.973, kPi / 8.0, 1), 10000);
        CHECK(std::abs(fit.shift_param) < 3.0 * sigma);
        for (const FittedAngle& a : fit.alphas) CHECK(std::abs(a.value) < 3.0 * sigma * 10.0);
        double lo = 1.0, hi = 0.0;
        for (double v : fit.fitted_curve) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(hi - lo < 3.0 * sigma);
    }

    SUBCASE("depolarizing plus coherent roundtrip") {
        plan.noise.per_step_dep = {0.0199};
        plan.noise.alphas[0] = 3.63e-2;
        plan.noise.alphas[1] = 4.83e-2;
        plan.noise.lambdas[{0, 1}] = -2.63e-2;
        options.alpha_bounds[0] = 7.55e-2;
        options.alpha_bounds[1] = 5.73e-2;
        options.lambda_bounds[{0, 1}] = 6.68e-2;
        const auto records = run_experiment(plan);
        const FitResult fit = fit_pipeline(records, options);

        CHECK(fit.shift_model == ShiftModel::Depolarizing);
        CHECK(std::abs(fit.shift_param - 0.0199) < 0.2 * 0.0199 + 1e-3);
        const double sigma = sigma_stat(success_probability(0.973, kPi / 8.0, 1), 10000);
        CHECK(std::abs(fit.alphas[0].value - 3.63e-2) < std::max(7.55e-2, 3.0 * sigma));
        CHECK(std::abs(fit.alphas[1].value - 4.83e-2) < std::max(5.73e-2, 3.0 * sigma));
        CHECK(std::abs(fit.lambdas[0].value + 2.63e-2) < std::max(6.68e-2, 3.0 * sigma));
        CHECK(fit.residual_rms < 3.0 * sigma);
    }

    SUBCASE("fitted curve oscillates with one dominant period") {
        plan.noise.alphas[0] = 4.0e-2;
        plan.noise.alphas[1] = 5.0e-2;
        plan.noise.lambdas[{0, 1}] = -3.0e-2;
        options.alpha_bounds[0] = 8e-2;
        options.alpha_bounds[1] = 8e-2;
        options.lambda_bounds[{0, 1}] = 8e-2;
        plan.shots = 20000;
        const auto records = run_experiment(plan);
        const FitResult fit = fit_pipeline(records, options);

        // discrete Fourier magnitudes of the centered fitted curve
        const std::size_t m = fit.fitted_curve.size();
        double mean = 0.0;
        for (double v : fit.fitted_curve) mean += v;
        mean /= static_cast<double>(m);
        std::vector<double> mag(6, 0.0);
        for (std::size_t k = 1; k < mag.size(); ++k) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t i = 0; i < m; ++i) {
                const double arg = -2.0 * kPi * static_cast<double>(k * i) / static_cast<double>(m);
                acc += (fit.fitted_curve[i] - mean) * std::polar(1.0, arg);
            }
            mag[k] = std::abs(acc);
        }
        for (std::size_t k = 2; k < mag.size(); ++k) CHECK(mag[1] > mag[k]);

        double lo = 1.0, hi = 0.0;
        for (double v : fit.fitted_curve) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(hi - lo > 5.0 * sigma_stat(success_probability(0.973, kPi / 8.0, 1), 10000));
    }

    SUBCASE("pipeline is idempotent on its own output") {
        plan.noise.per_step_dep = {0.02};
        plan.noise.alphas[0] = 2.0e-2;
        plan.noise.alphas[1] = -1.5e-2;
        plan.noise.lambdas[{0, 1}] = 1.0e-2;
        const auto records = run_experiment(plan);
        const FitResult first = fit_pipeline(records, options);

        // feed the fitted curve back as (nearly) exact data; 1e9 shots keep
        // the count quantization far below the solver tolerance
        std::vector<ExperimentRecord> synth;
        for (std::size_t i = 0; i < first.phi0.size(); ++i) {
            ExperimentRecord r = records[i * 5];
            r.phi0 = first.phi0[i];
            r.shots = 1000000000;
            r.run_index = 0;
            r.success_count =
                static_cast<int>(std::llround(first.fitted_curve[i] * 1000000000));
            synth.push_back(r);
        }
        const FitResult second = fit_pipeline(synth, options);
        CHECK(std::abs(second.shift_param - first.shift_param) < 1e-6);
        for (std::size_t j = 0; j < first.alphas.size(); ++j) {
            CHECK(std::abs(second.alphas[j].value - first.alphas[j].value) < 1e-6);
        }
        CHECK(std::abs(second.lambdas[0].value - first.lambdas[0].value) < 1e-6);
        for (std::size_t i = 0; i < first.fitted_curve.size(); ++i) {
            CHECK(std::abs(second.fitted_curve[i] - first.fitted_curve[i]) < 1e-6);
        }
    }

    SUBCASE("n = 2 exposes exactly eight angles") {
        ExperimentPlan plan2;
        plan2.base = {0.973, kPi / 8.0, 0.0, 2};
        for (int k = 0; k < 10; ++k) plan2.phi0_grid.push_back(2.0 * kPi * k / 10.0);
        plan2.shots = 500;
        plan2.runs = 1;
        plan2.coupling = CouplingMap::linear(4);
        const auto records = run_experiment(plan2);
        FitOptions cheap;
        cheap.coherent.multistart_cap = 2;
        cheap.coherent.refine_iterations = 3;
        cheap.coherent.polish_iterations = 3;
        cheap.refine_iterations = 1;
        const FitResult fit = fit_pipeline(records, cheap);
        CHECK(fit.alphas.size() == 4);
        CHECK(fit.lambdas.size() == 4);
    }
}
