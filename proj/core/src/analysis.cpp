#include "qsmb/analysis.hpp"

#include "qsmb/gates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qsmb {

namespace {
constexpr double kPi = std::numbers::pi;
}

double sigma_stat(double p, long m) {
    if (m < 1) throw std::invalid_argument("sigma_stat: m must be at least 1");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sigma_stat: p out of [0, 1]");
    return std::sqrt(p * (1.0 - p) / static_cast<double>(m));
}

Aggregate aggregate(std::span<const ExperimentRecord> records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");
    const ExperimentRecord& first = records.front();

    std::map<double, std::pair<long, long>> per_phi0;  // phi0 -> (successes, shots)
    for (const ExperimentRecord& r : records) {
        if (r.device_label != first.device_label || r.n_iterations != first.n_iterations ||
            r.epsilon != first.epsilon || r.theta0 != first.theta0) {
            throw std::invalid_argument(
                "aggregate: records mix device or protocol parameters; group them first");
        }
        if (r.shots < 1 || r.success_count < 0 || r.success_count > r.shots) {
            throw std::invalid_argument("aggregate: invalid shot counts");
        }
        auto& cell = per_phi0[r.phi0];
        cell.first += r.success_count;
        cell.second += r.shots;
    }

    Aggregate agg;
    agg.device_label = first.device_label;
    agg.n_iterations = first.n_iterations;
    agg.epsilon = first.epsilon;
    agg.theta0 = first.theta0;
    long shots_per_point = -1;
    for (const auto& [phi0, cell] : per_phi0) {
        if (shots_per_point < 0) {
            shots_per_point = cell.second;
        } else if (cell.second != shots_per_point) {
            throw std::invalid_argument("aggregate: ragged grid (unequal shots*runs per phi0)");
        }
        agg.phi0.push_back(phi0);
        agg.estimates.push_back(static_cast<double>(cell.first) /
                                static_cast<double>(cell.second));
    }
    agg.shots_per_point = shots_per_point;

    const std::size_t n = agg.estimates.size();
    agg.mean = std::accumulate(agg.estimates.begin(), agg.estimates.end(), 0.0) /
               static_cast<double>(n);
    double var = 0.0;
    for (double e : agg.estimates) var += (e - agg.mean) * (e - agg.mean);
    agg.sigma_exp = std::sqrt(var / static_cast<double>(n));
    return agg;
}

double metric_f(double ps_exp_mean, double ps_ideal) {
    if (!(ps_ideal > 0.0)) throw std::invalid_argument("metric_f: ps_ideal must be positive");
    return 1.0 - std::abs(ps_exp_mean - ps_ideal) / ps_ideal;
}

double metric_s(double sigma_exp, double sigma_stat_value) {
    if (!(sigma_stat_value > 0.0)) {
        throw std::invalid_argument("metric_s: sigma_stat must be positive");
    }
    return sigma_exp / sigma_stat_value;
}

MetricReport make_metric_report(std::span<const ExperimentRecord> records) {
    const Aggregate agg = aggregate(records);
    MetricReport report;
    report.device_label = agg.device_label;
    report.n_iterations = agg.n_iterations;
    report.epsilon = agg.epsilon;
    report.theta0 = agg.theta0;
    report.ps_ideal = success_probability(agg.epsilon, agg.theta0, agg.n_iterations);
    report.ps_exp_mean = agg.mean;
    report.ratio = agg.mean / report.ps_ideal;
    report.f = metric_f(agg.mean, report.ps_ideal);
    report.f_out_of_range = report.f < 0.0;
    report.sigma_stat = sigma_stat(report.ps_ideal, agg.shots_per_point);
    report.sigma_exp = agg.sigma_exp;
    if (agg.phi0.size() < 2) {
        throw std::invalid_argument(
            "make_metric_report: insufficient grid (need at least two phi0 points for S)");
    }
    report.s = metric_s(agg.sigma_exp, report.sigma_stat);
    report.shots_per_point = agg.shots_per_point;
    report.phi0 = agg.phi0;
    report.per_phi0_estimates = agg.estimates;
    return report;
}

double process_fidelity_unitary(const ComplexMatrix& u, const ComplexMatrix& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols() || !u.is_square()) {
        throw std::invalid_argument("process_fidelity_unitary: dimension mismatch");
    }
    const int d = u.rows();
    const Complex overlap = (u.dagger() * v).trace();
    return std::norm(overlap) / (static_cast<double>(d) * d);
}

double average_gate_fidelity(double f_process, int dim) {
    if (dim < 2) throw std::invalid_argument("average_gate_fidelity: dim must be at least 2");
    return (dim * f_process + 1.0) / (dim + 1.0);
}

FidelityBundle FidelityBundle::from_gate_errors(std::vector<double> errors) {
    if (errors.empty()) throw std::invalid_argument("FidelityBundle: no gate errors");
    FidelityBundle b;
    b.gate_errors = std::move(errors);
    double mean_err = 0.0;
    for (double e : b.gate_errors) {
        if (!(e >= 0.0 && e <= 1.0)) {
            throw std::invalid_argument("FidelityBundle: gate error out of [0, 1]");
        }
        mean_err += e;
    }
    mean_err /= static_cast<double>(b.gate_errors.size());
    b.f_mean = 1.0 - mean_err;
    double var = 0.0;
    for (double e : b.gate_errors) {
        const double f = 1.0 - e;
        var += (f - b.f_mean) * (f - b.f_mean);
    }
    b.sigma_f = std::sqrt(var / static_cast<double>(b.gate_errors.size()));
    return b;
}

double misrotation_bound(const FidelityBundle& bundle, MisrotationGate gate) {
    const double target = bundle.f_mean - bundle.sigma_f;
    if (!(target > 0.0 && target <= 1.0)) {
        throw std::invalid_argument("misrotation_bound: f_mean - sigma_f must lie in (0, 1]");
    }
    auto curve = [&](double angle) {
        if (gate == MisrotationGate::SqrtX) {
            const ComplexMatrix ideal = gates::rx(kPi / 2.0);
            return average_gate_fidelity(
                process_fidelity_unitary(sqrt_x_with_error(angle), ideal), 2);
        }
        const ComplexMatrix ideal = gates::cr(kPi / 4.0);
        return average_gate_fidelity(process_fidelity_unitary(gates::cr(kPi / 4.0 + angle), ideal),
                                     4);
    };
    double lo = 0.0, hi = kPi / 2.0;
    if (curve(lo) < target) return 0.0;  // already below at a perfect gate: no misrotation room
    if (curve(hi) > target) {
        throw std::invalid_argument(
            "misrotation_bound: fidelity too low for the misrotation model (no root in [0, pi/2])");
    }
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (curve(mid) >= target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Shift models
// ---------------------------------------------------------------------------

double apply_shift(double p, ShiftModel model, double param, const ShiftContext& ctx) {
    if (model == ShiftModel::Depolarizing) {
        return (1.0 - param) * p + 2.0 * param / ctx.dim();
    }
    return (1.0 - param) * p + param;
}

double invert_shift(double p_shifted, ShiftModel model, double param, const ShiftContext& ctx) {
    if (param >= 1.0) throw std::invalid_argument("invert_shift: parameter must stay below 1");
    if (model == ShiftModel::Depolarizing) {
        return (p_shifted - 2.0 * param / ctx.dim()) / (1.0 - param);
    }
    return (p_shifted - param) / (1.0 - param);
}

double fit_shift(double ps_exp_mean, double ps_ideal, ShiftModel model, const ShiftContext& ctx,
                 double sigma) {
    double param = 0.0;
    if (model == ShiftModel::Depolarizing) {
        const double denom = ps_ideal - 2.0 / ctx.dim();
        if (std::abs(denom) < 1e-12) {
            throw std::invalid_argument("fit_shift: ideal probability sits at the fixed point 2/D");
        }
        param = (ps_ideal - ps_exp_mean) / denom;
    } else {
        if (ctx.n_iterations != 1) {
            throw std::invalid_argument(
                "fit_shift: the amplitude-damping shift is defined for one iteration only");
        }
        if (!(ps_ideal < 1.0)) {
            throw std::invalid_argument("fit_shift: ideal probability must stay below 1 for damping");
        }
        param = (ps_exp_mean - ps_ideal) / (1.0 - ps_ideal);
    }
    // Allow sampling noise to push the estimate slightly past the boundary.
    const double slack = 3.0 * sigma + 1e-12;
    if (param < -slack || param > 1.0 + slack) {
        throw std::invalid_argument("fit_shift: recovered parameter " + std::to_string(param) +
                                    " lies outside [0, 1]; mean=" + std::to_string(ps_exp_mean) +
                                    " ideal=" + std::to_string(ps_ideal));
    }
    return std::clamp(param, 0.0, 1.0);
}

ShiftModel select_shift_model(double ps_exp_mean, double ps_ideal, double sigma,
                              const ShiftContext& ctx) {
    if (std::abs(ps_exp_mean - ps_ideal) <= sigma) return ShiftModel::Depolarizing;
    if (ps_exp_mean > ps_ideal && ctx.n_iterations == 1) return ShiftModel::AmplitudeDamping;
    return ShiftModel::Depolarizing;
}

// ---------------------------------------------------------------------------
// Coherent fit
// ---------------------------------------------------------------------------

std::vector<AngleParameter> coherent_parameters(const NativeCircuit& circuit,
                                                double default_bound) {
    std::vector<AngleParameter> params;
    std::vector<int> sx_qubits;
    for (const NativeGate& g : circuit.gates) {
        if (g.kind == NativeKind::SqrtX &&
            std::find(sx_qubits.begin(), sx_qubits.end(), g.q0) == sx_qubits.end()) {
            sx_qubits.push_back(g.q0);
        }
    }
    std::sort(sx_qubits.begin(), sx_qubits.end());
    for (int q : sx_qubits) {
        params.push_back({AngleParameter::Kind::Alpha, q, -1, default_bound});
    }
    for (const NativeGate& g : circuit.gates) {
        if (g.kind != NativeKind::Cr) continue;
        const bool seen = std::any_of(params.begin(), params.end(), [&](const AngleParameter& p) {
            return p.kind == AngleParameter::Kind::Lambda && p.q0 == g.q0 && p.q1 == g.q1;
        });
        if (!seen) params.push_back({AngleParameter::Kind::Lambda, g.q0, g.q1, default_bound});
    }
    return params;
}

namespace {

// Halton low-discrepancy point, base b, index i >= 1.
double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

std::vector<double> residuals(const std::vector<double>& curve, std::span<const double> data) {
    std::vector<double> r(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) r[i] = curve[i] - data[i];
    return r;
}

double sum_of_squares(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

/// Solves the k x k system a x = b in place; returns false when singular.
bool solve_linear(std::vector<double>& a, std::vector<double>& b, int k) {
    for (int col = 0; col < k; ++col) {
        int pivot = col;
        for (int r = col + 1; r < k; ++r) {
            if (std::abs(a[r * k + col]) > std::abs(a[pivot * k + col])) pivot = r;
        }
        if (std::abs(a[pivot * k + col]) < 1e-300) return false;
        if (pivot != col) {
            for (int c = 0; c < k; ++c) std::swap(a[pivot * k + c], a[col * k + c]);
            std::swap(b[pivot], b[col]);
        }
        for (int r = col + 1; r < k; ++r) {
            const double f = a[r * k + col] / a[col * k + col];
            for (int c = col; c < k; ++c) a[r * k + c] -= f * a[col * k + c];
            b[r] -= f * b[col];
        }
    }
    for (int r = k - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < k; ++c) acc -= a[r * k + c] * b[c];
        b[r] = acc / a[r * k + r];
    }
    return true;
}

struct Box {
    double lo = 0.0;
    double hi = 0.0;
};

struct LmOutcome {
    std::vector<double> x;
    double cost = 0.0;
};

LmOutcome lm_refine(std::span<const double> data, const ForwardModel& model,
                    std::span<const Box> boxes, std::vector<double> x, int max_iterations) {
    const int k = static_cast<int>(boxes.size());
    const int m = static_cast<int>(data.size());
    auto clamp_to_box = [&](std::vector<double>& v) {
        for (int j = 0; j < k; ++j) v[j] = std::clamp(v[j], boxes[j].lo, boxes[j].hi);
    };
    clamp_to_box(x);

    std::vector<double> r = residuals(model(x), data);
    double cost = sum_of_squares(r);
    double lambda = 1e-3;

    for (int iter = 0; iter < max_iterations; ++iter) {
        // numeric Jacobian, central differences
        std::vector<double> jac(static_cast<std::size_t>(m) * k);
        for (int j = 0; j < k; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
            std::vector<double> xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const std::vector<double> cp = model(xp);
            const std::vector<double> cm = model(xm);
            for (int i = 0; i < m; ++i) jac[static_cast<std::size_t>(i) * k + j] = (cp[i] - cm[i]) / (2.0 * h);
        }
        std::vector<double> jtj(static_cast<std::size_t>(k) * k, 0.0);
        std::vector<double> jtr(k, 0.0);
        for (int i = 0; i < m; ++i) {
            for (int a = 0; a < k; ++a) {
                const double ja = jac[static_cast<std::size_t>(i) * k + a];
                jtr[a] += ja * r[i];
                for (int b = a; b < k; ++b) {
                    jtj[static_cast<std::size_t>(a) * k + b] += ja * jac[static_cast<std::size_t>(i) * k + b];
                }
            }
        }
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < a; ++b) {
                jtj[static_cast<std::size_t>(a) * k + b] = jtj[static_cast<std::size_t>(b) * k + a];
            }
        }

        bool accepted = false;
        double step_norm = 0.0;
        for (int attempt = 0; attempt < 16; ++attempt) {
            std::vector<double> lhs = jtj;
            for (int a = 0; a < k; ++a) {
                lhs[static_cast<std::size_t>(a) * k + a] +=
                    lambda * std::max(jtj[static_cast<std::size_t>(a) * k + a], 1e-12);
            }
            std::vector<double> step(k);
            for (int a = 0; a < k; ++a) step[a] = -jtr[a];
            if (!solve_linear(lhs, step, k)) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> xn = x;
            for (int a = 0; a < k; ++a) xn[a] += step[a];
            clamp_to_box(xn);
            const std::vector<double> rn = residuals(model(xn), data);
            const double costn = sum_of_squares(rn);
            if (costn < cost) {
                step_norm = 0.0;
                for (int a = 0; a < k; ++a) step_norm = std::max(step_norm, std::abs(xn[a] - x[a]));
                x = std::move(xn);
                r = rn;
                const double improvement = cost - costn;
                cost = costn;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (improvement < 1e-15 * std::max(cost, 1e-30) && step_norm < 1e-11) {
                    return {x, cost};
                }
                break;
            }
            lambda = std::min(lambda * 7.0, 1e12);
        }
        if (!accepted) break;
    }
    return {x, cost};
}

std::vector<Box> symmetric_boxes(std::span<const AngleParameter> params) {
    std::vector<Box> boxes;
    boxes.reserve(params.size());
    for (const AngleParameter& p : params) boxes.push_back({-p.bound, p.bound});
    return boxes;
}

// Deterministic multistart: the zero vector, then either the full lattice or
// a Halton set when lattice_per_dim^k would blow past the cap. Returns the
// refined outcomes sorted by cost.
std::vector<LmOutcome> multistart_fit(std::span<const double> data, const ForwardModel& model,
                                      std::span<const AngleParameter> params,
                                      const CoherentFitOptions& options) {
    const int k = static_cast<int>(params.size());
    std::vector<std::vector<double>> starts;
    starts.emplace_back(k, 0.0);
    double lattice_size = 1.0;
    for (int j = 0; j < k; ++j) lattice_size *= options.lattice_per_dim;
    if (lattice_size <= options.multistart_cap) {
        std::vector<int> idx(k, 0);
        const int per_dim = options.lattice_per_dim;
        while (true) {
            std::vector<double> x(k);
            bool all_zero = true;
            for (int j = 0; j < k; ++j) {
                const double frac = per_dim == 1 ? 0.5 : static_cast<double>(idx[j]) / (per_dim - 1);
                x[j] = (2.0 * frac - 1.0) * params[j].bound;
                if (x[j] != 0.0) all_zero = false;
            }
            if (!all_zero) starts.push_back(std::move(x));
            int j = 0;
            while (j < k && ++idx[j] == per_dim) idx[j++] = 0;
            if (j == k) break;
        }
    } else {
        static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
        for (int i = 1; i < options.multistart_cap; ++i) {
            std::vector<double> x(k);
            for (int j = 0; j < k; ++j) {
                x[j] = (2.0 * halton(i, kPrimes[j % 12]) - 1.0) * params[j].bound;
            }
            starts.push_back(std::move(x));
        }
    }

    const std::vector<Box> boxes = symmetric_boxes(params);
    std::vector<LmOutcome> outcomes;
    outcomes.reserve(starts.size());
    for (const std::vector<double>& start : starts) {
        outcomes.push_back(lm_refine(data, model, boxes, start, options.refine_iterations));
    }
    std::stable_sort(outcomes.begin(), outcomes.end(),
                     [](const LmOutcome& a, const LmOutcome& b) { return a.cost < b.cost; });
    return outcomes;
}

}  // namespace

CoherentFitResult fit_coherent(std::span<const double> data, const ForwardModel& model,
                               std::span<const AngleParameter> params,
                               const CoherentFitOptions& options) {
    if (params.empty()) throw std::invalid_argument("fit_coherent: no free parameters");
    if (data.empty()) throw std::invalid_argument("fit_coherent: no data");

    const std::vector<LmOutcome> outcomes = multistart_fit(data, model, params, options);
    const LmOutcome best = lm_refine(data, model, symmetric_boxes(params), outcomes.front().x,
                                     options.polish_iterations);

    CoherentFitResult result;
    result.angles = best.x;
    result.cost = best.cost;
    result.residual_rms = std::sqrt(best.cost / static_cast<double>(data.size()));
    return result;
}

// ---------------------------------------------------------------------------
// Four-step pipeline
// ---------------------------------------------------------------------------

namespace {

struct PipelineModel {
    std::vector<NativeCircuit> circuits;
    std::vector<AngleParameter> params;

    std::vector<double> evaluate(std::span<const double> angles) const {
        NoiseSpec coherent;
        for (std::size_t j = 0; j < params.size(); ++j) {
            if (params[j].kind == AngleParameter::Kind::Alpha) {
                coherent.alphas[params[j].q0] = angles[j];
            } else {
                coherent.lambdas[{params[j].q0, params[j].q1}] = angles[j];
            }
        }
        std::vector<double> curve;
        curve.reserve(circuits.size());
        for (const NativeCircuit& c : circuits) {
            const std::vector<Complex> psi = run_statevector(c, coherent);
            curve.push_back(success_from_unitary_column(psi, c.kept_qubit, c.postselect_qubits));
        }
        return curve;
    }
};

// Least-squares re-fit of the shift parameter given the coherent curve:
// data_i = curve_i + param * (target_i - curve_i) with target 2/D or 1.
double refit_shift(std::span<const double> data, const std::vector<double>& curve,
                   ShiftModel model, const ShiftContext& ctx) {
    const double target = model == ShiftModel::Depolarizing ? 2.0 / ctx.dim() : 1.0;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double g = target - curve[i];
        num += (data[i] - curve[i]) * g;
        den += g * g;
    }
    if (den < 1e-30) return 0.0;
    return std::clamp(num / den, 0.0, 1.0 - 1e-9);
}

}  // namespace

FitResult fit_pipeline(std::span<const ExperimentRecord> records, const FitOptions& options) {
    const Aggregate agg = aggregate(records);
    const ShiftContext ctx{agg.epsilon, agg.theta0, agg.n_iterations};
    const double ps_ideal = success_probability(agg.epsilon, agg.theta0, agg.n_iterations);
    const double sigma = sigma_stat(ps_ideal, agg.shots_per_point);

    ProtocolConfig cfg;
    cfg.epsilon = agg.epsilon;
    cfg.theta0 = agg.theta0;
    cfg.n_iterations = agg.n_iterations;
    const CouplingMap coupling = options.coupling.n_qubits() == cfg.qubit_count()
                                     ? options.coupling
                                     : CouplingMap::linear(cfg.qubit_count());

    PipelineModel model;
    for (double phi0 : agg.phi0) {
        cfg.phi0 = phi0;
        model.circuits.push_back(transpile_circuit(build_circuit(cfg), coupling));
    }
    model.params = coherent_parameters(model.circuits.front(), options.default_bound);
    for (AngleParameter& p : model.params) {
        if (p.kind == AngleParameter::Kind::Alpha) {
            const auto it = options.alpha_bounds.find(p.q0);
            if (it != options.alpha_bounds.end()) p.bound = it->second;
        } else {
            const auto it = options.lambda_bounds.find({p.q0, p.q1});
            if (it != options.lambda_bounds.end()) p.bound = it->second;
        }
    }
    const ForwardModel forward = [&model](std::span<const double> angles) {
        return model.evaluate(angles);
    };

    // Step 1: incoherent shift from the phi0-averaged estimate.
    const ShiftModel shift_model =
        options.model.value_or(select_shift_model(agg.mean, ps_ideal, sigma, ctx));
    const double shift_step1 = fit_shift(agg.mean, ps_ideal, shift_model, ctx, sigma);

    // Step 2: undo the shift so the data oscillates around the ideal value.
    std::vector<double> unshifted(agg.estimates.size());
    for (std::size_t i = 0; i < agg.estimates.size(); ++i) {
        unshifted[i] = invert_shift(agg.estimates[i], shift_model, shift_step1, ctx);
    }

    // Step 3: coherent misrotations against the transpiled forward model.
    // The multistart explores the angle box on the unshifted data; the top
    // candidates are then refined jointly with the shift parameter against
    // the raw data (the coherent angles move the curve's mean as well, so a
    // pure alternation between the two fits stalls short of the optimum).
    const std::vector<LmOutcome> candidates =
        multistart_fit(unshifted, forward, model.params, options.coherent);

    const std::size_t n_angles = model.params.size();
    const ForwardModel joint_forward = [&](std::span<const double> x) {
        std::vector<double> curve = model.evaluate(x.subspan(0, n_angles));
        for (double& v : curve) v = apply_shift(v, shift_model, x[n_angles], ctx);
        return curve;
    };
    std::vector<Box> joint_boxes = symmetric_boxes(model.params);
    joint_boxes.push_back({0.0, 1.0 - 1e-9});

    const int joint_candidates =
        std::min<int>(std::max(1, options.refine_iterations + 1), candidates.size());
    LmOutcome best;
    best.cost = std::numeric_limits<double>::infinity();
    for (int c = 0; c < joint_candidates; ++c) {
        std::vector<double> x0 = candidates[c].x;
        x0.push_back(refit_shift(agg.estimates, model.evaluate(x0), shift_model, ctx));
        const LmOutcome out = lm_refine(agg.estimates, joint_forward, joint_boxes, x0,
                                        options.coherent.polish_iterations);
        if (out.cost < best.cost) best = out;
    }
    // second polish pass so re-running the pipeline on its own output is stable
    best = lm_refine(agg.estimates, joint_forward, joint_boxes, best.x,
                     options.coherent.polish_iterations);

    const std::vector<double> angles(best.x.begin(), best.x.begin() + n_angles);
    const double shift_param = best.x[n_angles];
    const std::vector<double> curve = model.evaluate(angles);

    // Step 4: shift the fitted curve back into data space.
    FitResult result;
    result.shift_model = shift_model;
    result.shift_param = shift_param;
    result.phi0 = agg.phi0;
    result.data = agg.estimates;
    result.fitted_curve.resize(curve.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        result.fitted_curve[i] = apply_shift(curve[i], shift_model, shift_param, ctx);
        const double r = result.fitted_curve[i] - agg.estimates[i];
        ss += r * r;
    }
    result.residual_rms = std::sqrt(ss / static_cast<double>(curve.size()));

    for (std::size_t j = 0; j < model.params.size(); ++j) {
        const AngleParameter& p = model.params[j];
        FittedAngle fa;
        fa.q0 = p.q0;
        fa.q1 = p.q1;
        fa.value = angles[j];
        fa.bound = p.bound;
        fa.at_bound = std::abs(std::abs(angles[j]) - p.bound) < 1e-9;
        if (p.kind == AngleParameter::Kind::Alpha) {
            result.alphas.push_back(fa);
        } else {
            result.lambdas.push_back(fa);
        }
    }
    return result;
}

}  // namespace qsmb
