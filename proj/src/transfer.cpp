#include "netid/transfer.hpp"

#include <algorithm>
#include <cmath>

namespace netid {

namespace poly {

Coeffs add(const Coeffs& a, const Coeffs& b) {
    Coeffs out(std::max(a.size(), b.size()), 0.0);
    for (size_t k = 0; k < a.size(); ++k) out[k] += a[k];
    for (size_t k = 0; k < b.size(); ++k) out[k] += b[k];
    return out;
}

Coeffs sub(const Coeffs& a, const Coeffs& b) {
    Coeffs out(std::max(a.size(), b.size()), 0.0);
    for (size_t k = 0; k < a.size(); ++k) out[k] += a[k];
    for (size_t k = 0; k < b.size(); ++k) out[k] -= b[k];
    return out;
}

Coeffs mul(const Coeffs& a, const Coeffs& b) {
    if (a.empty() || b.empty()) return {0.0};
    Coeffs out(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

Coeffs scale(const Coeffs& a, double s) {
    Coeffs out = a;
    for (double& c : out) c *= s;
    return out;
}

Complex eval(const Coeffs& a, Complex x) {
    Complex acc(0.0, 0.0);
    for (size_t k = a.size(); k-- > 0;) acc = acc * x + a[k];
    return acc;
}

Coeffs trim(const Coeffs& a, double tol) {
    double mx = 0.0;
    for (double c : a) mx = std::max(mx, std::abs(c));
    Coeffs out = a;
    while (out.size() > 1 && std::abs(out.back()) <= tol * std::max(1.0, mx)) out.pop_back();
    if (out.empty()) out.push_back(0.0);
    return out;
}

int degree(const Coeffs& a) {
    for (size_t k = a.size(); k-- > 0;)
        if (a[k] != 0.0) return static_cast<int>(k);
    return 0;
}

std::vector<Complex> roots(const Coeffs& a_in) {
    Coeffs a = trim(a_in, 1e-14);
    const int n = static_cast<int>(a.size()) - 1;
    if (n < 1) return {};
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) comp(0, k) = -a[n - 1 - k] / a[n];
    for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
    std::vector<Complex> out(n);
    for (int k = 0; k < n; ++k) out[k] = es.eigenvalues()(k);
    return out;
}

Coeffs from_roots(const std::vector<Complex>& r) {
    std::vector<Complex> acc{Complex(1.0, 0.0)};
    for (const Complex& root : r) {
        std::vector<Complex> next(acc.size() + 1, Complex(0.0, 0.0));
        for (size_t k = 0; k < acc.size(); ++k) {
            next[k] -= acc[k] * root;
            next[k + 1] += acc[k];
        }
        acc = std::move(next);
    }
    Coeffs out(acc.size());
    for (size_t k = 0; k < acc.size(); ++k) out[k] = acc[k].real();
    return out;
}

}  // namespace poly

RationalTransfer::RationalTransfer(poly::Coeffs num, poly::Coeffs den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.empty() || den_[0] == 0.0) throw std::invalid_argument("RationalTransfer: denominator constant term must be nonzero");
    normalize();
}

RationalTransfer RationalTransfer::delay(int k) {
    if (k < 0) throw std::invalid_argument("RationalTransfer::delay: negative delay");
    poly::Coeffs num(k + 1, 0.0);
    num[k] = 1.0;
    return RationalTransfer(num, {1.0});
}

void RationalTransfer::normalize() {
    if (num_.empty()) num_ = {0.0};
    // monic denominator in the delay-operator sense: constant term 1
    if (den_[0] != 1.0) {
        const double s = den_[0];
        for (double& c : den_) c /= s;
        for (double& c : num_) c /= s;
    }
    num_ = poly::trim(num_);
    den_ = poly::trim(den_);
    is_zero_ = true;
    for (double c : num_)
        if (c != 0.0) is_zero_ = false;
    if (is_zero_) {
        num_ = {0.0};
        den_ = {1.0};
    }
}

Complex RationalTransfer::eval(double omega, bool* pole_flag) const {
    const Complex x = std::exp(Complex(0.0, -omega));  // q^-1 at z = e^{j w}
    const Complex d = poly::eval(den_, x);
    if (std::abs(d) < 1e-12) {
        if (pole_flag) *pole_flag = true;
        return Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    }
    return poly::eval(num_, x) / d;
}

Complex RationalTransfer::eval_at(Complex z) const {
    const Complex x = 1.0 / z;
    return poly::eval(num_, x) / poly::eval(den_, x);
}

RationalTransfer RationalTransfer::operator+(const RationalTransfer& rhs) const {
    if (is_zero_) return rhs;
    if (rhs.is_zero_) return *this;
    return RationalTransfer(poly::add(poly::mul(num_, rhs.den_), poly::mul(rhs.num_, den_)), poly::mul(den_, rhs.den_));
}

RationalTransfer RationalTransfer::operator-(const RationalTransfer& rhs) const { return *this + (-rhs); }

RationalTransfer RationalTransfer::operator-() const {
    if (is_zero_) return *this;
    return RationalTransfer(poly::scale(num_, -1.0), den_);
}

RationalTransfer RationalTransfer::operator*(const RationalTransfer& rhs) const {
    if (is_zero_ || rhs.is_zero_) return zero();
    return RationalTransfer(poly::mul(num_, rhs.num_), poly::mul(den_, rhs.den_));
}

RationalTransfer RationalTransfer::inverse() const {
    if (is_zero_ || num_[0] == 0.0) throw std::domain_error("RationalTransfer::inverse: no proper (delay-free) inverse");
    return RationalTransfer(den_, num_);
}

RationalTransfer RationalTransfer::reduced(double tol, double snap) const {
    if (is_zero_) return zero();
    std::vector<Complex> nr = poly::roots(num_);
    std::vector<Complex> dr = poly::roots(den_);
    std::vector<bool> used(dr.size(), false);
    std::vector<Complex> nkeep;
    for (const Complex& z : nr) {
        bool cancelled = false;
        for (size_t k = 0; k < dr.size(); ++k) {
            if (used[k]) continue;
            if (std::abs(z - dr[k]) <= tol * std::max(1.0, std::abs(z))) {
                used[k] = true;
                cancelled = true;
                break;
            }
        }
        if (!cancelled) nkeep.push_back(z);
    }
    std::vector<Complex> dkeep;
    for (size_t k = 0; k < dr.size(); ++k)
        if (!used[k]) dkeep.push_back(dr[k]);

    // rebuild with the original leading coefficients
    poly::Coeffs nn = poly::from_roots(nkeep);
    poly::Coeffs dd = poly::from_roots(dkeep);
    const double ngain = num_[poly::degree(num_)];
    const double dgain = den_[poly::degree(den_)];
    nn = poly::scale(nn, ngain);
    dd = poly::scale(dd, dgain);
    if (std::abs(dd[0]) < 1e-12) throw std::domain_error("RationalTransfer::reduced: cancellation produced improper result");
    // snap tiny coefficients
    double mx = 0.0;
    for (double c : nn) mx = std::max(mx, std::abs(c));
    for (double& c : nn)
        if (std::abs(c) <= snap * std::max(1.0, mx)) c = 0.0;
    for (double& c : dd)
        if (std::abs(c) <= snap) c = 0.0;
    return RationalTransfer(nn, dd);
}

bool RationalTransfer::equal_coeffs(const RationalTransfer& rhs, double tol) const {
    const poly::Coeffs& n1 = num_;
    const poly::Coeffs& n2 = rhs.num_;
    const poly::Coeffs& d1 = den_;
    const poly::Coeffs& d2 = rhs.den_;
    const size_t nn = std::max(n1.size(), n2.size());
    const size_t nd = std::max(d1.size(), d2.size());
    for (size_t k = 0; k < nn; ++k) {
        const double a = k < n1.size() ? n1[k] : 0.0;
        const double b = k < n2.size() ? n2[k] : 0.0;
        if (std::abs(a - b) > tol) return false;
    }
    for (size_t k = 0; k < nd; ++k) {
        const double a = k < d1.size() ? d1[k] : 0.0;
        const double b = k < d2.size() ? d2[k] : 0.0;
        if (std::abs(a - b) > tol) return false;
    }
    return true;
}

TransferMatrix TransferMatrix::identity(int n) {
    TransferMatrix m(n, n);
    for (int k = 0; k < n; ++k) m.at(k, k) = RationalTransfer::constant(1.0);
    return m;
}

TransferMatrix TransferMatrix::slice(const std::vector<int>& rows, const std::vector<int>& cols) const {
    if (rows.empty() || cols.empty()) throw std::invalid_argument("TransferMatrix::slice: empty index set");
    TransferMatrix out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < cols.size(); ++c) out.at(static_cast<int>(r), static_cast<int>(c)) = at(rows[r], cols[c]);
    return out;
}

Eigen::MatrixXcd TransferMatrix::eval(double omega, bool* pole_flag) const {
    Eigen::MatrixXcd out(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) out(r, c) = at(r, c).eval(omega, pole_flag);
    return out;
}

bool TransferMatrix::all_zero() const {
    for (const auto& e : entries_)
        if (!e.is_zero()) return false;
    return true;
}

int TransferMatrix::max_order() const {
    int mx = 0;
    for (const auto& e : entries_) mx = std::max(mx, e.order());
    return mx;
}

FrequencyResponse frequency_response(const TransferMatrix& m, const std::vector<double>& grid) {
    FrequencyResponse out;
    out.grid = grid;
    out.values.reserve(grid.size());
    out.pole_flag.assign(grid.size(), false);
    for (size_t k = 0; k < grid.size(); ++k) {
        bool flag = false;
        out.values.push_back(m.eval(grid[k], &flag));
        out.pole_flag[k] = flag;
    }
    return out;
}

std::vector<double> uniform_grid(int points) {
    std::vector<double> g(points);
    for (int k = 0; k < points; ++k) g[k] = M_PI * static_cast<double>(k) / (points - 1);
    return g;
}

}  // namespace netid
