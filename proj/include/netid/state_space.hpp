#pragma once

#include <Eigen/Dense>

#include "netid/transfer.hpp"

namespace netid {

/// Discrete-time state-space quadruple x+ = Ax + Bu, y = Cx + Du.
struct StateSpace {
    Eigen::MatrixXd A, B, C, D;

    int nx() const { return static_cast<int>(A.rows()); }
    int ni() const { return static_cast<int>(D.cols()); }
    int no() const { return static_cast<int>(D.rows()); }

    static StateSpace constant(const Eigen::MatrixXd& d);
    Eigen::MatrixXcd eval(Complex z) const;  // C (zI - A)^-1 B + D
};

double spectral_radius(const Eigen::MatrixXd& a);
bool is_stable(const StateSpace& s, double margin = 1e-8);

/// Unique P solving A P A^T - P + Q = 0 for stable A (Smith doubling).
Eigen::MatrixXd dlyap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

/// Block realization of a transfer matrix (one shift register per entry).
StateSpace realize(const TransferMatrix& m);

/// Per-entry conversion back to rational form. Each SISO subsystem is
/// reduced to a minimal realization first, so common factors cancel and
/// orders stay at the McMillan degree.
TransferMatrix to_transfer(const StateSpace& s, double snap = 1e-9);

/// Kalman staircase removal of uncontrollable/unobservable states, then
/// balanced truncation of Hankel modes below btol (stable systems only).
StateSpace minreal(const StateSpace& s, double rtol = 1e-9, double btol = 1e-10);

StateSpace ss_series(const StateSpace& first, const StateSpace& second);  // y = second(first(u))
StateSpace ss_add(const StateSpace& a, const StateSpace& b);
StateSpace ss_inverse(const StateSpace& s);  // requires invertible D

/// Matrix-level rational algebra routed through minimal realizations.
TransferMatrix tfm_add(const TransferMatrix& a, const TransferMatrix& b);
TransferMatrix tfm_sub(const TransferMatrix& a, const TransferMatrix& b);
TransferMatrix tfm_mul(const TransferMatrix& a, const TransferMatrix& b);
TransferMatrix tfm_inverse(const TransferMatrix& a);
/// (I - a)^-1 for square a.
TransferMatrix tfm_feedback_inverse(const TransferMatrix& a);

}  // namespace netid
