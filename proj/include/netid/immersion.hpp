#pragma once

#include "netid/graph.hpp"
#include "netid/network.hpp"

namespace netid {

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Network with the unmeasured nodes eliminated. Rows/columns of Gbreve
/// follow the block order Q..., o, U...; Hbreve keeps all L noise columns in
/// their original order, with the inherited Lambda.
struct ImmersedNetwork {
    Selection sel;
    int L = 0;
    std::vector<int> retained;  // block-ordered original node indices
    TransferMatrix Gbreve;      // |ret| x |ret|
    TransferMatrix Hbreve;      // |ret| x L
    std::optional<TransferMatrix> Rbreve;  // |ret| x K
    Eigen::MatrixXd Lambda;

    int block_pos(int node) const;  // position of an original node in `retained`
    std::vector<int> q_positions() const;
    std::vector<int> u_positions() const;
    std::optional<int> o_position() const;
};

/// Eliminates w_Z by substitution: Gbreve_kh = G_kh + G_kZ (I-G_ZZ)^-1 G_Zh
/// and Hbreve_kl = H_kl + G_kZ (I-G_ZZ)^-1 H_Zl.
ImmersedNetwork immerse(const NetworkSpec& net, const Selection& sel);

struct FactorOptions {
    double tol = 1e-12;      // DARE fixed-point convergence
    int max_iterations = 200000;
    int grid_points = 64;    // positivity pre-check grid
};

/// Monic, stable, minimum-phase spectral factor of Phi = Hsrc Lambda Hsrc*,
/// computed through the innovations form of a state realization (Riccati
/// fixed-point iteration).
struct SpectralFactor {
    TransferMatrix H;        // square monic factor
    Eigen::MatrixXd Lambda;  // SPD innovation covariance
    int iterations = 0;
};

SpectralFactor spectral_factorize(const TransferMatrix& Hsrc, const Eigen::MatrixXd& Lambda, const FactorOptions& opt = {});

/// Canonical transformed network of the measured signals. Rows of gbar
/// follow (Q..., o), columns (Q..., U...); the o-column of the square form
/// is structurally zero and the Q->Q block is hollow.
struct TransformedNetwork {
    Selection sel;
    int L = 0;
    std::vector<int> y_nodes;  // Q..., o
    std::vector<int> d_nodes;  // Q..., U...
    std::vector<int> u_nodes;

    TransferMatrix gbar;        // |Y| x |D|
    TransferMatrix hbar;        // |Y| x |Y| monic
    Eigen::MatrixXd lambda_bar; // |Y| x |Y| SPD
    std::optional<TransferMatrix> rbar_y;  // |Y| x K known-input map

    TransferMatrix g_square;    // (Q,o,U) x (Q,o,U), o-column zero
    std::optional<TransferMatrix> h_uu;   // monic U-block noise factor
    std::optional<Eigen::MatrixXd> lambda_uu;
    Eigen::MatrixXd lambda_tilde;         // joint innovation covariance after immersion

    std::vector<std::string> stages;  // bookkeeping of applied steps

    const RationalTransfer& gbar_entry(int y_node, int d_node) const;
};

TransformedNetwork transform_to_canonical(const ImmersedNetwork& imm, const SpectralFactor& factor);

/// Closed-form expression for the transformed target entry (independent of
/// the staged transformation path).
RationalTransfer gbar_oracle(const ImmersedNetwork& imm, const SpectralFactor& factor);

struct InvarianceReport {
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool invariant = false;
    ConditionReport conditions;
    bool passed = false;  // invariant && conditions
};

InvarianceReport verify_invariance(const NetworkSpec& net, const Selection& sel, double tol = 1e-6, int grid_points = 256);

/// Grid norm of Hbreve_{Omega,X} Lambda_XX Hbreve_{Phi,X}^* — zero whenever
/// no noise component in X confounds the estimation problem Phi -> Omega.
double confounder_block_norm(const ImmersedNetwork& imm, const IndexSet& omega, const IndexSet& phi, const IndexSet& x, int grid_points = 64);

}  // namespace netid
