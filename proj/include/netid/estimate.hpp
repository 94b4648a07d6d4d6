#pragma once

#include <optional>
#include <string>

#include "netid/immersion.hpp"
#include "netid/simulate.hpp"

namespace netid {

struct Dataset;

struct EntryOrders {
    int nb = 1;  // free numerator coefficients beyond the fixed feedthrough
    int na = 1;  // denominator coefficients
    bool strictly_proper = true;
};

struct ModelOrders {
    EntryOrders g{1, 1, true};
    EntryOrders h_diag{1, 1, true};     // strictly_proper ignored: diag is monic
    EntryOrders h_offdiag{1, 1, true};  // off-diagonals are forced strictly proper
};

enum class LambdaMode { Free, Fixed };

/// Parameterized model set for the MIMO predictor: per-entry rational
/// parameterizations of Gbar(theta) and a monic Hbar(theta). Structural
/// zeros (the hollow Q block) are never parameterized.
struct ModelStructure {
    Selection sel;
    std::vector<int> y_nodes, d_nodes;
    LambdaMode lambda_mode = LambdaMode::Free;

    struct GEntry {
        int row, col;  // indices into y_nodes / d_nodes
        int nb, na;
        bool strictly_proper;
        int offset;  // position of this entry's coefficients in theta
    };
    struct HEntry {
        int row, col;  // indices into y_nodes (square)
        int nc, nd;
        int offset;
    };
    std::vector<GEntry> g_entries;
    std::vector<HEntry> h_entries;
    int n_theta = 0;
    std::vector<std::string> theta_names;

    std::optional<TransferMatrix> known_input_map;  // |Y| x K filter applied to r

    TransferMatrix gbar(const Eigen::VectorXd& theta) const;
    TransferMatrix hbar(const Eigen::VectorXd& theta) const;
    ModelDelayPattern delay_pattern() const;
};

ModelStructure build_model_set(const Selection& sel, const ModelOrders& orders, LambdaMode mode);

/// Structure whose orders match a transformed network exactly, plus the
/// theta vector holding its true coefficients (handy for truth-based tests).
ModelStructure structure_from_transformed(const TransformedNetwork& tn);
Eigen::VectorXd pack_theta(const ModelStructure& ms, const TransformedNetwork& tn);

/// One-step-ahead prediction errors eps(t, theta) with zero initial
/// conditions. unstable_flag (optional) reports an unstable noise-model
/// inverse encountered during filtering.
Eigen::MatrixXd predict_errors(const ModelStructure& ms, const Eigen::VectorXd& theta, const Dataset& data,
                               bool* unstable_flag);

struct IdentifyOptions {
    int restarts = 8;
    int max_iterations = 200;
    double gradient_tol = 1e-8;
    double step_tol = 1e-10;
    uint64_t seed = 12345;
};

struct Estimate {
    Eigen::VectorXd theta;
    TransferMatrix g_hat;
    TransferMatrix h_hat;
    Eigen::MatrixXd lambda_hat;
    double criterion = 0.0;
    Eigen::MatrixXd residuals;
    int iterations = 0;
    int restarts_used = 0;
    bool converged = false;
    bool unstable_encountered = false;
    Eigen::VectorXd std_errors;
    std::vector<std::string> theta_names;
};

double wls_criterion(const Eigen::MatrixXd& residuals, const Eigen::MatrixXd& W);
double det_criterion(const Eigen::MatrixXd& residuals);

/// Weighted least squares (damped Gauss-Newton, multistart).
Estimate identify_wls(const ModelStructure& ms, const Dataset& data, const Eigen::MatrixXd& W, const IdentifyOptions& opt = {});

/// Determinant criterion; Lambda_hat is the residual sample covariance at
/// the optimum.
Estimate identify_ml(const ModelStructure& ms, const Dataset& data, const IdentifyOptions& opt = {});

/// Scalar-output direct method baseline with predictor inputs w_Dj.
Estimate miso_direct(const Dataset& data, int j, const IndexSet& Dj, const EntryOrders& g_orders, const EntryOrders& h_orders,
                     const std::optional<TransferMatrix>& r_row = std::nullopt, const IdentifyOptions& opt = {});

/// Numeric criterion gradient via the residual Jacobian (2/N J^T W eps).
Eigen::VectorXd criterion_gradient(const ModelStructure& ms, const Eigen::VectorXd& theta, const Dataset& data, const Eigen::MatrixXd& W);
/// Five-point finite-difference gradient of the criterion itself.
Eigen::VectorXd criterion_gradient_fd(const ModelStructure& ms, const Eigen::VectorXd& theta, const Dataset& data, const Eigen::MatrixXd& W);

enum class McSetup { FullInputMimo, MinimumInputMimo, MisoDirect, NaiveSiso };

struct McConfig {
    McSetup setup = McSetup::FullInputMimo;
    int i = 0, j = 0;
    IndexSet miso_inputs;  // for the MISO/naive setups
    ModelOrders orders;
    int N = 5000;
    int replicas = 20;
    uint64_t seed = 1;
    bool use_ml = false;
    ExcitationConfig excitation;
    int burn_in = 1000;
    IdentifyOptions identify;
};

struct CoefficientStat {
    std::string name;
    double truth = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    double z = 0.0;
};

struct BiasReport {
    std::vector<CoefficientStat> coefficients;  // target-entry coefficients
    int replicas = 0;
    std::vector<std::string> warnings;
    double median_target_error = 0.0;  // median over replicas of the target coefficient RMS error
};

/// Replica-parallel bias study of the target-module coefficients.
BiasReport montecarlo_bias(const NetworkSpec& net, const McConfig& cfg);

}  // namespace netid
