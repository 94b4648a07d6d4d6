#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netid/state_space.hpp"
#include "netid/transfer.hpp"

namespace netid {

/// Node indices are 1-based everywhere in the public API, matching the
/// numbering used in network documents and reports.
class NetworkSpec {
   public:
    int L = 0;  // node count
    int K = 0;  // external signal count
    TransferMatrix G;                        // L x L, hollow
    TransferMatrix H;                        // L x L, monic noise model
    std::optional<TransferMatrix> R;         // L x K when K > 0
    Eigen::MatrixXd Lambda;                  // L x L, SPD covariance of e

    const RationalTransfer& g(int to, int from) const { return G.at(to - 1, from - 1); }
    const RationalTransfer& h(int to, int from) const { return H.at(to - 1, from - 1); }

    bool has_w_edge(int from, int to) const { return !g(to, from).is_zero(); }
    bool has_e_edge(int e_index, int to) const;  // via H and static Lambda coupling

    /// Boolean nonzero pattern of the disturbance spectrum Phi_v = H Lambda H*.
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> noise_correlation_pattern() const;

    std::vector<int> in_neighbors(int node) const;   // k with G_{node,k} != 0
    std::vector<int> out_neighbors(int node) const;  // k with G_{k,node} != 0
};

struct ValidationItem {
    std::string check;
    bool passed;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationItem> items;
    bool valid() const {
        for (const auto& it : items)
            if (!it.passed) return false;
        return true;
    }
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses the JSON network document (see README for the schema). Unspecified
/// H defaults to identity, unspecified Lambda to identity.
NetworkSpec parse_network(const std::string& text);
NetworkSpec load_network(const std::string& path);
std::string serialize_network(const NetworkSpec& net);

/// Numerical checks: hollow G, monic H, Lambda SPD, stability of (I-G)^-1,
/// stability and minimum phase of H. Failures are report entries, not errors.
ValidationReport validate_network(const NetworkSpec& net, double margin = 1e-8);

}  // namespace netid
