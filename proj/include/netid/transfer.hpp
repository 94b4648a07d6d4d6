#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace netid {

using Complex = std::complex<double>;

/// Real polynomial helpers. Coefficients are stored in ascending powers of
/// the indeterminate (for transfers the indeterminate is the unit delay q^-1).
namespace poly {

using Coeffs = std::vector<double>;

Coeffs add(const Coeffs& a, const Coeffs& b);
Coeffs sub(const Coeffs& a, const Coeffs& b);
Coeffs mul(const Coeffs& a, const Coeffs& b);
Coeffs scale(const Coeffs& a, double s);
Complex eval(const Coeffs& a, Complex x);
/// Drops trailing coefficients with |c| <= tol * max|c|.
Coeffs trim(const Coeffs& a, double tol = 1e-12);
int degree(const Coeffs& a);
/// Roots via the companion matrix; empty for constants.
std::vector<Complex> roots(const Coeffs& a);
/// Real monic polynomial from a conjugate-closed root set.
Coeffs from_roots(const std::vector<Complex>& r);

}  // namespace poly

/// Scalar rational transfer function in the backward-shift operator:
///   H(q) = (b0 + b1 q^-1 + ... ) / (1 + a1 q^-1 + ...).
/// The denominator constant term is always 1, so every value is proper.
class RationalTransfer {
   public:
    RationalTransfer() : num_{0.0}, den_{1.0}, is_zero_(true) {}
    RationalTransfer(poly::Coeffs num, poly::Coeffs den);

    static RationalTransfer zero() { return RationalTransfer(); }
    static RationalTransfer constant(double g) { return RationalTransfer({g}, {1.0}); }
    static RationalTransfer delay(int k);  // q^-k

    const poly::Coeffs& num() const { return num_; }
    const poly::Coeffs& den() const { return den_; }
    bool is_zero() const { return is_zero_; }
    bool strictly_proper() const { return is_zero_ || num_[0] == 0.0; }
    double feedthrough() const { return is_zero_ ? 0.0 : num_[0]; }
    int order() const { return std::max(poly::degree(num_), poly::degree(den_)); }

    /// Value at z = e^{j omega}. Sets pole_flag when the denominator is
    /// numerically zero on the unit circle.
    Complex eval(double omega, bool* pole_flag = nullptr) const;
    Complex eval_at(Complex z) const;  // arbitrary z off the unit circle

    /// Cancels near-common num/den roots (relative tolerance on root
    /// distance) and renormalizes. Coefficient noise below snap is zeroed.
    RationalTransfer reduced(double tol = 1e-7, double snap = 1e-11) const;

    RationalTransfer operator+(const RationalTransfer& rhs) const;
    RationalTransfer operator-(const RationalTransfer& rhs) const;
    RationalTransfer operator*(const RationalTransfer& rhs) const;
    RationalTransfer operator-() const;
    /// Proper inverse; throws if the feedthrough is zero.
    RationalTransfer inverse() const;

    bool equal_coeffs(const RationalTransfer& rhs, double tol) const;

   private:
    void normalize();

    poly::Coeffs num_, den_;
    bool is_zero_ = false;
};

/// Dense matrix of scalar rational transfers.
class TransferMatrix {
   public:
    TransferMatrix() = default;
    TransferMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), entries_(static_cast<size_t>(rows) * cols) {
        if (rows <= 0 || cols <= 0) throw std::invalid_argument("TransferMatrix: dimensions must be positive");
    }

    static TransferMatrix identity(int n);
    static TransferMatrix zeros(int rows, int cols) { return TransferMatrix(rows, cols); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    RationalTransfer& at(int r, int c) { return entries_[index(r, c)]; }
    const RationalTransfer& at(int r, int c) const { return entries_[index(r, c)]; }

    /// Submatrix by explicit 0-based row/column index lists.
    TransferMatrix slice(const std::vector<int>& rows, const std::vector<int>& cols) const;

    Eigen::MatrixXcd eval(double omega, bool* pole_flag = nullptr) const;

    bool all_zero() const;
    int max_order() const;

   private:
    size_t index(int r, int c) const {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw std::out_of_range("TransferMatrix: index out of bounds");
        return static_cast<size_t>(r) * cols_ + c;
    }

    int rows_ = 0, cols_ = 0;
    std::vector<RationalTransfer> entries_;
};

/// Frequency response of every entry on a grid of radian frequencies
/// in [0, pi]; exact rational evaluation.
struct FrequencyResponse {
    std::vector<double> grid;
    std::vector<Eigen::MatrixXcd> values;
    std::vector<bool> pole_flag;  // per grid point: some entry hit a unit-circle pole
};

FrequencyResponse frequency_response(const TransferMatrix& m, const std::vector<double>& grid);

std::vector<double> uniform_grid(int points);  // [0, pi], endpoints included

}  // namespace netid
