#pragma once

#include "qsmb/engine.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qsmb {

/// Binomial standard deviation sqrt(p(1-p)/m).
double sigma_stat(double p, long m);

/// Per-phi0 pooled estimates plus their mean and population spread.
struct Aggregate {
    std::string device_label;
    int n_iterations = 1;
    double epsilon = 0.0;
    double theta0 = 0.0;
    std::vector<double> phi0;
    std::vector<double> estimates;
    long shots_per_point = 0;  // pooled over runs
    double mean = 0.0;
    double sigma_exp = 0.0;  // population normalization (1/N)
};

/// Pools runs per phi0 point and reduces. Records must form one uniform
/// (device, n, epsilon, theta0) group with equal pooled shots per point.
Aggregate aggregate(std::span<const ExperimentRecord> records);

/// F = 1 - |p_exp_mean - p_ideal| / p_ideal.
double metric_f(double ps_exp_mean, double ps_ideal);

/// S = sigma_exp / sigma_stat.
double metric_s(double sigma_exp, double sigma_stat);

struct MetricReport {
    std::string device_label;
    int n_iterations = 1;
    double epsilon = 0.0;
    double theta0 = 0.0;
    double ps_ideal = 0.0;
    double ps_exp_mean = 0.0;
    double ratio = 0.0;
    double f = 0.0;
    bool f_out_of_range = false;  // deviation exceeded 100%
    double s = 0.0;
    double sigma_stat = 0.0;
    double sigma_exp = 0.0;
    long shots_per_point = 0;
    std::vector<double> phi0;
    std::vector<double> per_phi0_estimates;
};

MetricReport make_metric_report(std::span<const ExperimentRecord> records);

/// Process fidelity |Tr(U^dag V)|^2 / D^2 of two unitary channels.
double process_fidelity_unitary(const ComplexMatrix& u, const ComplexMatrix& v);

/// F_ave = (D F + 1) / (D + 1).
double average_gate_fidelity(double f_process, int dim);

/// Reported randomized-benchmarking gate errors pooled into a fidelity band.
struct FidelityBundle {
    std::vector<double> gate_errors;
    double f_mean = 1.0;
    double sigma_f = 0.0;
    static FidelityBundle from_gate_errors(std::vector<double> errors);
};

enum class MisrotationGate { SqrtX, Cr };

/// Largest angle whose average gate fidelity still reaches f_mean - sigma_f;
/// bisection on [0, pi/2] to 1e-10 over the gate-specific fidelity curve.
double misrotation_bound(const FidelityBundle& bundle, MisrotationGate gate);

// ---------------------------------------------------------------------------
// Shift models (step 1/2/4 of the fitting procedure)
// ---------------------------------------------------------------------------

enum class ShiftModel { Depolarizing, AmplitudeDamping };

struct ShiftContext {
    double epsilon = 0.0;
    double theta0 = 0.0;
    int n_iterations = 1;
    int dim() const { return 1 << (1 << n_iterations); }
};

/// Applies the declared incoherent model to an underlying success
/// probability. Depolarizing: (1-p) x + 2p/D. Damping (n = 1): (1-g) x + g,
/// the analytic damping formula rewritten as an exact affine map in x.
double apply_shift(double p, ShiftModel model, double param, const ShiftContext& ctx);
double invert_shift(double p_shifted, ShiftModel model, double param, const ShiftContext& ctx);

/// Solves the shift equation so the model maps ps_ideal onto ps_exp_mean.
/// Throws when the recovered parameter falls outside [0, 1] beyond sampling slack.
double fit_shift(double ps_exp_mean, double ps_ideal, ShiftModel model, const ShiftContext& ctx,
                 double sigma = 0.0);

/// Damping when the mean sits above the ideal (one-iteration case),
/// depolarizing otherwise; near-ties within one sigma default to depolarizing.
ShiftModel select_shift_model(double ps_exp_mean, double ps_ideal, double sigma,
                              const ShiftContext& ctx);

// ---------------------------------------------------------------------------
// Coherent-error fit (step 3)
// ---------------------------------------------------------------------------

struct AngleParameter {
    enum class Kind { Alpha, Lambda };
    Kind kind = Kind::Alpha;
    int q0 = 0;
    int q1 = -1;  // lambda target
    double bound = 0.35;
};

/// Free coherent parameters of a native circuit: one alpha per qubit carrying
/// sqrt(X) gates (ascending), one lambda per ordered CR pair (first use order).
std::vector<AngleParameter> coherent_parameters(const NativeCircuit& circuit,
                                                double default_bound);

using ForwardModel = std::function<std::vector<double>(std::span<const double>)>;

struct CoherentFitOptions {
    int lattice_per_dim = 5;
    int multistart_cap = 200;
    int refine_iterations = 40;
    int polish_iterations = 120;
};

struct CoherentFitResult {
    std::vector<double> angles;
    double residual_rms = 0.0;
    double cost = 0.0;
};

/// Box-constrained Levenberg-Marquardt refinement over a deterministic
/// multistart set (full 5^k lattice when small, Halton points when capped).
CoherentFitResult fit_coherent(std::span<const double> data, const ForwardModel& model,
                               std::span<const AngleParameter> params,
                               const CoherentFitOptions& options = {});

// ---------------------------------------------------------------------------
// Four-step pipeline
// ---------------------------------------------------------------------------

struct FitOptions {
    std::optional<ShiftModel> model;  // forced model; auto-selected when absent
    std::map<int, double> alpha_bounds;
    std::map<std::pair<int, int>, double> lambda_bounds;
    double default_bound = 0.35;
    CouplingMap coupling;  // defaults to linear over the protocol register
    /// How many extra multistart candidates (beyond the best) are carried
    /// into the joint angle-plus-shift refinement.
    int refine_iterations = 2;
    CoherentFitOptions coherent;
};

struct FittedAngle {
    int q0 = 0;
    int q1 = -1;
    double value = 0.0;
    double bound = 0.0;
    bool at_bound = false;
};

struct FitResult {
    ShiftModel shift_model = ShiftModel::Depolarizing;
    double shift_param = 0.0;
    std::vector<FittedAngle> alphas;
    std::vector<FittedAngle> lambdas;
    double residual_rms = 0.0;
    std::vector<double> phi0;
    std::vector<double> data;          // per-phi0 pooled estimates
    std::vector<double> fitted_curve;  // model curve shifted back into data space
};

/// Step 1 fit the shift parameter, step 2 unshift the data, step 3 fit the
/// coherent misrotations against the transpiled-circuit forward model,
/// step 4 shift the fitted curve back. Because the coherent angles also move
/// the curve's mean, the top multistart candidates are refined jointly with
/// the shift parameter against the raw data; this keeps the pipeline
/// idempotent on its own output.
FitResult fit_pipeline(std::span<const ExperimentRecord> records, const FitOptions& options = {});

}  // namespace qsmb
