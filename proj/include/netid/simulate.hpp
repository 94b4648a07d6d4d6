#pragma once

#include <cstdint>
#include <string>

#include "netid/immersion.hpp"
#include "netid/network.hpp"

namespace netid {

enum class ExcitationKind { Zero, White, FilteredWhite, Multisine };

struct ExcitationChannel {
    ExcitationKind kind = ExcitationKind::Zero;
    double amplitude = 1.0;
    uint64_t seed_offset = 0;
};

struct ExcitationConfig {
    std::vector<ExcitationChannel> channels;  // one per external signal; empty = all zero
};

struct Dataset {
    int L = 0, K = 0, N = 0;
    Eigen::MatrixXd w;  // L x N
    Eigen::MatrixXd r;  // K x N (0 x N when no excitation)
    uint64_t seed = 0;
    int burn_in = 0;
    std::string generator;
};

/// Simulates w = (I-G)^-1 (R r + H e) with e ~ N(0, Lambda) drawn from a
/// counter-based generator; deterministic per seed.
Dataset simulate(const NetworkSpec& net, int N, uint64_t seed, const ExcitationConfig& exc = {}, int burn_in = 1000);

void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);

/// Averaged-periodogram cross-spectral estimate (Hann window). The
/// normalization makes unit white noise flat at 1, matching the analytic
/// convention Phi_v = H Lambda H*.
struct SpectrumEstimate {
    std::vector<double> omega;
    std::vector<Eigen::MatrixXcd> phi;
};

SpectrumEstimate estimate_spectrum(const Dataset& data, const std::vector<int>& signals, int segment = 512, double overlap = 0.5);

/// Data-informativity condition: min eig of Phi_kappa with
/// kappa = [w_D; xi_Q; w_o] must exceed tol at the required fraction of
/// grid frequencies. Model-driven variant (analytic spectra).
ConditionReport check_informativity(const NetworkSpec& net, const Selection& sel, const TransformedNetwork& tn,
                                    const std::vector<double>& grid, double tol = 1e-9, double required_fraction = 1.0);

/// Data-driven variant: Welch estimate of the stacked [w_D; xi_Q; w_o]
/// using residual-based innovations from the transformed quantities.
ConditionReport check_informativity_data(const Dataset& data, const Selection& sel, const TransformedNetwork& tn,
                                         double tol = 1e-9, double required_fraction = 1.0);

}  // namespace netid
