#include "netid/state_space.hpp"

#include <algorithm>
#include <cmath>

namespace netid {

namespace {

// Orthonormal basis of the column space with a relative rank threshold.
Eigen::MatrixXd orth(const Eigen::MatrixXd& m, double rtol) {
    if (m.cols() == 0 || m.norm() == 0.0) return Eigen::MatrixXd(m.rows(), 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int k = 0; k < sv.size(); ++k)
        if (sv(k) > rtol * sv(0)) ++rank;
    return svd.matrixU().leftCols(rank);
}

// Basis of the reachable subspace of (A, B).
Eigen::MatrixXd reachable_basis(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double rtol) {
    Eigen::MatrixXd v = orth(b, rtol);
    for (int pass = 0; pass < a.rows(); ++pass) {
        Eigen::MatrixXd grown(a.rows(), v.cols() * 2);
        grown << v, a * v;
        Eigen::MatrixXd vn = orth(grown, rtol);
        if (vn.cols() == v.cols()) return vn;
        v = vn;
        if (v.cols() == a.rows()) return v;
    }
    return v;
}

StateSpace project(const StateSpace& s, const Eigen::MatrixXd& v) {
    StateSpace out;
    out.A = v.transpose() * s.A * v;
    out.B = v.transpose() * s.B;
    out.C = s.C * v;
    out.D = s.D;
    return out;
}

StateSpace remove_uncontrollable(const StateSpace& s, double rtol) {
    if (s.nx() == 0) return s;
    Eigen::MatrixXd v = reachable_basis(s.A, s.B, rtol);
    if (v.cols() == s.nx()) return s;
    return project(s, v);
}

StateSpace remove_unobservable(const StateSpace& s, double rtol) {
    if (s.nx() == 0) return s;
    Eigen::MatrixXd v = reachable_basis(s.A.transpose(), s.C.transpose(), rtol);
    if (v.cols() == s.nx()) return s;
    StateSpace out;
    out.A = v.transpose() * s.A * v;
    out.B = v.transpose() * s.B;
    out.C = s.C * v;
    out.D = s.D;
    return out;
}

// Balanced truncation for a stable system; drops Hankel values <= btol * max.
StateSpace balanced_truncate(const StateSpace& s, double btol) {
    const int n = s.nx();
    if (n == 0) return s;
    if (spectral_radius(s.A) >= 1.0 - 1e-10) return s;  // only safe for stable A

    Eigen::MatrixXd p = dlyap(s.A, s.B * s.B.transpose());
    Eigen::MatrixXd q = dlyap(s.A.transpose(), s.C.transpose() * s.C);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ep(0.5 * (p + p.transpose()));
    Eigen::VectorXd dp = ep.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd lp = ep.eigenvectors() * dp.asDiagonal();  // P = lp lp^T

    Eigen::MatrixXd h = lp.transpose() * (0.5 * (q + q.transpose())) * lp;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(h);
    // Hankel singular values, descending
    Eigen::VectorXd hv = eh.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::vector<int> order(n);
    for (int k = 0; k < n; ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return hv(x) > hv(y); });

    const double hmax = hv(order[0]);
    if (hmax <= 0.0) {
        StateSpace out;
        out.A = Eigen::MatrixXd(0, 0);
        out.B = Eigen::MatrixXd(0, s.ni());
        out.C = Eigen::MatrixXd(s.no(), 0);
        out.D = s.D;
        return out;
    }
    int r = 0;
    for (int k = 0; k < n; ++k)
        if (hv(order[k]) > btol * hmax) ++r;
    if (r == n) return s;

    Eigen::MatrixXd u(n, r);
    Eigen::VectorXd sig(r);
    for (int k = 0; k < r; ++k) {
        u.col(k) = eh.eigenvectors().col(order[k]);
        sig(k) = hv(order[k]);
    }
    // balancing transform: T = lp * u * sig^{-1/2}, Tinv = sig^{-1/2} u^T lp^T Q ... use pseudo-inverse form
    Eigen::VectorXd si = sig.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd t = lp * u * si.asDiagonal();
    Eigen::MatrixXd tleft = si.asDiagonal() * u.transpose() * lp.transpose() * (0.5 * (q + q.transpose()));
    // rows of tleft scaled so tleft * t = I
    Eigen::MatrixXd gram = tleft * t;
    Eigen::MatrixXd tinv = gram.llt().solve(tleft);

    StateSpace out;
    out.A = tinv * s.A * t;
    out.B = tinv * s.B;
    out.C = s.C * t;
    out.D = s.D;
    return out;
}

// Real polynomial from eigenvalues, pairing conjugates to kill imaginary dust.
poly::Coeffs char_poly_z(const Eigen::VectorXcd& eigs) {
    std::vector<Complex> roots;
    roots.reserve(eigs.size());
    for (int k = 0; k < eigs.size(); ++k) roots.push_back(eigs(k));
    return poly::from_roots(roots);
}

}  // namespace

StateSpace StateSpace::constant(const Eigen::MatrixXd& d) {
    StateSpace s;
    s.A = Eigen::MatrixXd(0, 0);
    s.B = Eigen::MatrixXd(0, d.cols());
    s.C = Eigen::MatrixXd(d.rows(), 0);
    s.D = d;
    return s;
}

Eigen::MatrixXcd StateSpace::eval(Complex z) const {
    if (nx() == 0) return D.cast<Complex>();
    Eigen::MatrixXcd m = z * Eigen::MatrixXcd::Identity(nx(), nx()) - A.cast<Complex>();
    return C.cast<Complex>() * m.partialPivLu().solve(B.cast<Complex>()) + D.cast<Complex>();
}

double spectral_radius(const Eigen::MatrixXd& a) {
    if (a.rows() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stable(const StateSpace& s, double margin) { return spectral_radius(s.A) < 1.0 - margin; }

Eigen::MatrixXd dlyap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
    Eigen::MatrixXd p = q;
    Eigen::MatrixXd m = a;
    for (int it = 0; it < 128; ++it) {
        Eigen::MatrixXd upd = m * p * m.transpose();
        p += upd;
        if (upd.norm() <= 1e-16 * std::max(1.0, p.norm())) break;
        m = m * m;
        if (m.norm() < 1e-154) break;
    }
    return 0.5 * (p + p.transpose());
}

StateSpace realize(const TransferMatrix& m) {
    // per-entry controllable canonical form, stacked block-diagonally
    struct EntryReal {
        int r, c, nx;
        Eigen::MatrixXd a;
        Eigen::VectorXd b;
        Eigen::RowVectorXd cvec;
        double d;
    };
    std::vector<EntryReal> parts;
    int total = 0;
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) {
            const RationalTransfer& h = m.at(r, c);
            if (h.is_zero()) continue;
            const auto& bq = h.num();
            const auto& aq = h.den();
            const int p = std::max(poly::degree(bq), poly::degree(aq));
            EntryReal e;
            e.r = r;
            e.c = c;
            e.nx = p;
            e.d = bq[0];
            if (p > 0) {
                Eigen::VectorXd av = Eigen::VectorXd::Zero(p);
                Eigen::VectorXd bv = Eigen::VectorXd::Zero(p);
                for (int k = 1; k <= p; ++k) {
                    const double ak = k < static_cast<int>(aq.size()) ? aq[k] : 0.0;
                    const double bk = k < static_cast<int>(bq.size()) ? bq[k] : 0.0;
                    av(k - 1) = ak;
                    bv(k - 1) = bk - bq[0] * ak;
                }
                e.a = Eigen::MatrixXd::Zero(p, p);
                e.a.row(0) = -av.transpose();
                for (int k = 1; k < p; ++k) e.a(k, k - 1) = 1.0;
                e.b = Eigen::VectorXd::Zero(p);
                e.b(0) = 1.0;
                e.cvec = bv.transpose();
            }
            total += p;
            parts.push_back(std::move(e));
        }
    }
    StateSpace s;
    s.A = Eigen::MatrixXd::Zero(total, total);
    s.B = Eigen::MatrixXd::Zero(total, m.cols());
    s.C = Eigen::MatrixXd::Zero(m.rows(), total);
    s.D = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    int off = 0;
    for (const auto& e : parts) {
        s.D(e.r, e.c) += e.d;
        if (e.nx > 0) {
            s.A.block(off, off, e.nx, e.nx) = e.a;
            s.B.block(off, e.c, e.nx, 1) = e.b;
            s.C.block(e.r, off, 1, e.nx) = e.cvec;
            off += e.nx;
        }
    }
    return s;
}

TransferMatrix to_transfer(const StateSpace& s, double snap) {
    TransferMatrix out(s.no(), s.ni());
    for (int r = 0; r < s.no(); ++r) {
        for (int c = 0; c < s.ni(); ++c) {
            StateSpace sub;
            sub.A = s.A;
            sub.B = s.B.col(c);
            sub.C = s.C.row(r);
            sub.D = Eigen::MatrixXd::Constant(1, 1, s.D(r, c));
            sub = minreal(sub);
            const int n = sub.nx();
            if (n == 0) {
                const double d = sub.D(0, 0);
                out.at(r, c) = std::abs(d) <= snap * 1e-3 ? RationalTransfer::zero() : RationalTransfer::constant(d);
                continue;
            }
            Eigen::EigenSolver<Eigen::MatrixXd> es(sub.A, false);
            poly::Coeffs den_z = char_poly_z(es.eigenvalues());  // ascending in z, monic degree n

            // numerator values on a probe circle, inverted by scaled DFT
            const double rho = 1.15 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
            const int np = n + 1;
            std::vector<Complex> vals(np);
            double scale_ref = 0.0;
            for (int k = 0; k < np; ++k) {
                const Complex z = std::polar(rho, 2.0 * M_PI * k / np);
                const Complex hz = sub.eval(z)(0, 0);
                vals[k] = hz * poly::eval(den_z, z);
                scale_ref = std::max(scale_ref, std::abs(hz));
            }
            poly::Coeffs num_z(np, 0.0);
            for (int mdx = 0; mdx < np; ++mdx) {
                Complex acc(0.0, 0.0);
                for (int k = 0; k < np; ++k) acc += vals[k] * std::exp(Complex(0.0, -2.0 * M_PI * k * mdx / np));
                num_z[mdx] = (acc / static_cast<double>(np)).real() / std::pow(rho, mdx);
            }
            // convert z-polynomials to delay-operator form: coef of q^{n-m} is c_m
            poly::Coeffs num_q(n + 1, 0.0), den_q(n + 1, 0.0);
            for (int k = 0; k <= n; ++k) {
                num_q[n - k] = k < static_cast<int>(num_z.size()) ? num_z[k] : 0.0;
                den_q[n - k] = k < static_cast<int>(den_z.size()) ? den_z[k] : 0.0;
            }
            double nmax = 0.0;
            for (double v : num_q) nmax = std::max(nmax, std::abs(v));
            for (double& v : num_q)
                if (std::abs(v) <= snap * std::max(1.0, nmax)) v = 0.0;
            for (double& v : den_q)
                if (std::abs(v) <= snap) v = 0.0;
            if (nmax <= snap * std::max(1.0, scale_ref)) {
                out.at(r, c) = RationalTransfer::zero();
            } else {
                out.at(r, c) = RationalTransfer(num_q, den_q);
            }
        }
    }
    return out;
}

StateSpace minreal(const StateSpace& s, double rtol, double btol) {
    StateSpace out = remove_uncontrollable(s, rtol);
    out = remove_unobservable(out, rtol);
    out = balanced_truncate(out, btol);
    return out;
}

StateSpace ss_series(const StateSpace& first, const StateSpace& second) {
    if (second.ni() != first.no()) throw std::invalid_argument("ss_series: dimension mismatch");
    const int n1 = first.nx(), n2 = second.nx();
    StateSpace s;
    s.A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    s.A.topLeftCorner(n1, n1) = first.A;
    s.A.bottomLeftCorner(n2, n1) = second.B * first.C;
    s.A.bottomRightCorner(n2, n2) = second.A;
    s.B = Eigen::MatrixXd(n1 + n2, first.ni());
    s.B << first.B, second.B * first.D;
    s.C = Eigen::MatrixXd(second.no(), n1 + n2);
    s.C << second.D * first.C, second.C;
    s.D = second.D * first.D;
    return s;
}

StateSpace ss_add(const StateSpace& a, const StateSpace& b) {
    if (a.ni() != b.ni() || a.no() != b.no()) throw std::invalid_argument("ss_add: dimension mismatch");
    const int n1 = a.nx(), n2 = b.nx();
    StateSpace s;
    s.A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    s.A.topLeftCorner(n1, n1) = a.A;
    s.A.bottomRightCorner(n2, n2) = b.A;
    s.B = Eigen::MatrixXd(n1 + n2, a.ni());
    s.B << a.B, b.B;
    s.C = Eigen::MatrixXd(a.no(), n1 + n2);
    s.C << a.C, b.C;
    s.D = a.D + b.D;
    return s;
}

StateSpace ss_inverse(const StateSpace& s) {
    if (s.ni() != s.no()) throw std::invalid_argument("ss_inverse: system must be square");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(s.D);
    if (!lu.isInvertible()) throw std::domain_error("ss_inverse: singular feedthrough, no delay-free inverse exists");
    Eigen::MatrixXd dinv = lu.inverse();
    StateSpace out;
    out.A = s.A - s.B * dinv * s.C;
    out.B = s.B * dinv;
    out.C = -dinv * s.C;
    out.D = dinv;
    return out;
}

TransferMatrix tfm_add(const TransferMatrix& a, const TransferMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("tfm_add: dimension mismatch");
    TransferMatrix out(a.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) out.at(r, c) = (a.at(r, c) + b.at(r, c)).reduced();
    return out;
}

TransferMatrix tfm_sub(const TransferMatrix& a, const TransferMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("tfm_sub: dimension mismatch");
    TransferMatrix out(a.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) out.at(r, c) = (a.at(r, c) - b.at(r, c)).reduced();
    return out;
}

TransferMatrix tfm_mul(const TransferMatrix& a, const TransferMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("tfm_mul: dimension mismatch");
    StateSpace s = ss_series(realize(b), realize(a));
    return to_transfer(minreal(s));
}

TransferMatrix tfm_inverse(const TransferMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("tfm_inverse: matrix must be square");
    StateSpace s = ss_inverse(realize(a));
    return to_transfer(minreal(s));
}

TransferMatrix tfm_feedback_inverse(const TransferMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("tfm_feedback_inverse: matrix must be square");
    TransferMatrix iminus = TransferMatrix::identity(a.rows());
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) iminus.at(r, c) = iminus.at(r, c) - a.at(r, c);
    return tfm_inverse(iminus);
}

}  // namespace netid
