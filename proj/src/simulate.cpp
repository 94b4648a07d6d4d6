#include "netid/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "netid/estimate.hpp"
#include "netid/rng.hpp"

namespace netid {

Dataset simulate(const NetworkSpec& net, int N, uint64_t seed, const ExcitationConfig& exc, int burn_in) {
    if (N < 1) throw std::invalid_argument("simulate: N must be >= 1");
    ValidationReport val = validate_network(net);
    for (const auto& item : val.items) {
        if (!item.passed && (item.check == "network_stable" || item.check == "Lambda_spd"))
            throw NumericalError("simulate: " + item.check + " failed: " + item.detail);
    }

    StateSpace sg = minreal(realize(net.G));
    StateSpace sh = minreal(realize(net.H));
    std::optional<StateSpace> sr;
    if (net.R && net.K > 0) sr = minreal(realize(*net.R));

    Eigen::FullPivLU<Eigen::MatrixXd> loop_lu(Eigen::MatrixXd::Identity(net.L, net.L) - sg.D);
    if (!loop_lu.isInvertible()) throw NumericalError("simulate: delay-free loop makes the network ill-posed");
    const Eigen::MatrixXd loop_inv = loop_lu.inverse();

    Eigen::LLT<Eigen::MatrixXd> llt(net.Lambda);
    if (llt.info() != Eigen::Success) throw NumericalError("simulate: Lambda is not positive definite");
    const Eigen::MatrixXd chol = llt.matrixL();

    const CounterRng rng(seed);
    const int total = N + burn_in;

    Dataset data;
    data.L = net.L;
    data.K = net.K;
    data.N = N;
    data.seed = seed;
    data.burn_in = burn_in;
    data.generator = "counter-gaussian-v1";
    data.w = Eigen::MatrixXd::Zero(net.L, N);
    data.r = Eigen::MatrixXd::Zero(net.K, N);

    // pre-drawn excitation (deterministic per channel)
    auto excitation_at = [&](int k, int t) -> double {
        if (k >= static_cast<int>(exc.channels.size())) return 0.0;
        const ExcitationChannel& ch = exc.channels[k];
        const uint64_t stream = 1000 + ch.seed_offset + static_cast<uint64_t>(k);
        switch (ch.kind) {
            case ExcitationKind::Zero:
                return 0.0;
            case ExcitationKind::White:
                return ch.amplitude * rng.normal(stream, static_cast<uint64_t>(t));
            case ExcitationKind::FilteredWhite:
                return ch.amplitude * rng.normal(stream, static_cast<uint64_t>(t));  // shaped below
            case ExcitationKind::Multisine: {
                const int F = 16;
                double acc = 0.0;
                for (int f = 1; f <= F; ++f) {
                    const double omega = M_PI * f / (F + 1.0);
                    const double phase = 2.0 * M_PI * rng.uniform(stream, static_cast<uint64_t>(f));
                    acc += std::cos(omega * t + phase);
                }
                return ch.amplitude * std::sqrt(2.0 / F) * acc;
            }
        }
        return 0.0;
    };

    Eigen::VectorXd xg = Eigen::VectorXd::Zero(sg.nx());
    Eigen::VectorXd xh = Eigen::VectorXd::Zero(sh.nx());
    Eigen::VectorXd xr = sr ? Eigen::VectorXd::Zero(sr->nx()) : Eigen::VectorXd();
    std::vector<double> lp_state(std::max(net.K, 0), 0.0);  // first-order shaping for FilteredWhite

    Eigen::VectorXd e(net.L), rt(std::max(net.K, 1)), noise(net.L), u(net.L), w(net.L);
    for (int t = 0; t < total; ++t) {
        for (int k = 0; k < net.L; ++k) e(k) = rng.normal(static_cast<uint64_t>(k), static_cast<uint64_t>(t));
        e = chol * e;

        for (int k = 0; k < net.K; ++k) {
            double v = excitation_at(k, t);
            if (k < static_cast<int>(exc.channels.size()) && exc.channels[k].kind == ExcitationKind::FilteredWhite) {
                lp_state[k] = 0.7 * lp_state[k] + v;
                v = lp_state[k] * std::sqrt(1.0 - 0.7 * 0.7);  // keep unit variance
            }
            rt(k) = v;
        }

        noise = sh.C * xh + e;  // H is monic: D = I
        u.setZero();
        if (sr) u = sr->C * xr + sr->D * rt.head(net.K);

        w = loop_inv * (sg.C * xg + noise + u);

        if (sg.nx() > 0) xg = sg.A * xg + sg.B * w;
        if (sh.nx() > 0) xh = sh.A * xh + sh.B * e;
        if (sr && sr->nx() > 0) xr = sr->A * xr + sr->B * rt.head(net.K);

        if (t >= burn_in) {
            data.w.col(t - burn_in) = w;
            if (net.K > 0) data.r.col(t - burn_in) = rt.head(net.K);
        }
    }
    if (!data.w.allFinite()) throw NumericalError("simulate: trajectory diverged (non-finite samples)");
    return data;
}

void save_dataset(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
    nlohmann::ordered_json meta;
    meta["format_version"] = 1;
    meta["L"] = data.L;
    meta["K"] = data.K;
    meta["N"] = data.N;
    meta["seed"] = data.seed;
    meta["burn_in"] = data.burn_in;
    meta["generator"] = data.generator;
    out << "# netident-dataset " << meta.dump() << "\n";
    out.precision(17);
    for (int t = 0; t < data.N; ++t) {
        for (int k = 0; k < data.L; ++k) out << (k ? " " : "") << data.w(k, t);
        for (int k = 0; k < data.K; ++k) out << " " << data.r(k, t);
        out << "\n";
    }
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
    std::string header;
    std::getline(in, header);
    const std::string tag = "# netident-dataset ";
    if (header.rfind(tag, 0) != 0) throw std::runtime_error("load_dataset: missing dataset header");
    nlohmann::json meta = nlohmann::json::parse(header.substr(tag.size()));
    Dataset data;
    data.L = meta.at("L").get<int>();
    data.K = meta.at("K").get<int>();
    data.N = meta.at("N").get<int>();
    data.seed = meta.at("seed").get<uint64_t>();
    data.burn_in = meta.at("burn_in").get<int>();
    data.generator = meta.value("generator", "");
    data.w = Eigen::MatrixXd(data.L, data.N);
    data.r = Eigen::MatrixXd(data.K, data.N);
    for (int t = 0; t < data.N; ++t) {
        for (int k = 0; k < data.L; ++k) in >> data.w(k, t);
        for (int k = 0; k < data.K; ++k) in >> data.r(k, t);
    }
    if (!in) throw std::runtime_error("load_dataset: truncated dataset");
    return data;
}

namespace {

// iterative radix-2 FFT, in place
void fft(std::vector<Complex>& a) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const Complex wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const Complex u = a[i + k];
                const Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}  // namespace

SpectrumEstimate estimate_spectrum(const Dataset& data, const std::vector<int>& signals, int segment, double overlap) {
    if ((segment & (segment - 1)) != 0 || segment < 8) throw std::invalid_argument("estimate_spectrum: segment must be a power of two >= 8");
    if (data.N < 8 * segment) throw std::invalid_argument("estimate_spectrum: data too short (need N >= 8 x segment)");
    const int ns = static_cast<int>(signals.size());
    const int hop = std::max(1, static_cast<int>(segment * (1.0 - overlap)));
    const int nseg = (data.N - segment) / hop + 1;
    const int nbin = segment / 2 + 1;

    std::vector<double> win(segment);
    double wnorm = 0.0;
    for (int k = 0; k < segment; ++k) {
        win[k] = 0.5 * (1.0 - std::cos(2.0 * M_PI * k / (segment - 1)));
        wnorm += win[k] * win[k];
    }

    SpectrumEstimate out;
    out.omega.resize(nbin);
    for (int b = 0; b < nbin; ++b) out.omega[b] = M_PI * b / (nbin - 1.0);
    out.phi.assign(nbin, Eigen::MatrixXcd::Zero(ns, ns));

    std::vector<std::vector<Complex>> spec(ns, std::vector<Complex>(segment));
    for (int s = 0; s < nseg; ++s) {
        const int start = s * hop;
        for (int sig = 0; sig < ns; ++sig) {
            const int row = signals[sig] - 1;
            double mean = 0.0;
            for (int k = 0; k < segment; ++k) mean += data.w(row, start + k);
            mean /= segment;
            for (int k = 0; k < segment; ++k) spec[sig][k] = Complex((data.w(row, start + k) - mean) * win[k], 0.0);
            fft(spec[sig]);
        }
        for (int b = 0; b < nbin; ++b)
            for (int p = 0; p < ns; ++p)
                for (int q = 0; q < ns; ++q) out.phi[b](p, q) += spec[p][b] * std::conj(spec[q][b]);
    }
    const double scale = 1.0 / (static_cast<double>(nseg) * wnorm);
    for (int b = 0; b < nbin; ++b) out.phi[b] *= scale;
    return out;
}

namespace {

ConditionReport informativity_from_values(const std::vector<double>& grid, const std::vector<double>& min_eigs, double tol, double required_fraction) {
    int ok = 0;
    std::vector<int> offending;
    for (size_t k = 0; k < min_eigs.size(); ++k) {
        if (min_eigs[k] > tol) ++ok;
        else if (offending.size() < 8) offending.push_back(static_cast<int>(k));
    }
    const double frac = grid.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(grid.size());
    ConditionReport rep;
    rep.name = "data_informativity";
    CheckItem item;
    item.label = "phi_kappa_positive";
    item.passed = frac >= required_fraction;
    if (!item.passed) {
        std::ostringstream os;
        os << "min eig of Phi_kappa <= " << tol << " at " << (grid.size() - ok) << "/" << grid.size() << " grid frequencies";
        item.detail = os.str();
        item.witness = offending;
    }
    rep.items.push_back(std::move(item));
    return rep;
}

}  // namespace

ConditionReport check_informativity(const NetworkSpec& net, const Selection& sel, const TransformedNetwork& tn,
                                    const std::vector<double>& grid, double tol, double required_fraction) {
    sel.validate(net.L);
    const IndexSet D = sel.D();
    const int nd = static_cast<int>(D.size());
    const int nq = static_cast<int>(sel.Q.size());
    const int nk = nd + nq + (sel.has_o() ? 1 : 0);

    std::vector<double> min_eigs;
    min_eigs.reserve(grid.size());
    for (double w : grid) {
        const Eigen::MatrixXcd gw = net.G.eval(w);
        const Eigen::MatrixXcd hw = net.H.eval(w);
        const Eigen::MatrixXcd tw = (Eigen::MatrixXcd::Identity(net.L, net.L) - gw).partialPivLu().solve(hw);

        // rows of kappa as combinations of w: [w_D; xi_Q; w_o]
        Eigen::MatrixXcd map = Eigen::MatrixXcd::Zero(nk, net.L);
        for (int d = 0; d < nd; ++d) map(d, D[d] - 1) = 1.0;
        if (nq > 0 || sel.has_o()) {
            const Eigen::MatrixXcd hbar_w = tn.hbar.eval(w);
            const Eigen::MatrixXcd gbar_w = tn.gbar.eval(w);
            const int ny = static_cast<int>(tn.y_nodes.size());
            Eigen::MatrixXcd sel_map = Eigen::MatrixXcd::Zero(ny, net.L);
            for (int y = 0; y < ny; ++y) sel_map(y, tn.y_nodes[y] - 1) = 1.0;
            Eigen::MatrixXcd d_map = Eigen::MatrixXcd::Zero(nd, net.L);
            for (int d = 0; d < nd; ++d) d_map(d, tn.d_nodes[d] - 1) = 1.0;
            const Eigen::MatrixXcd xi_map = hbar_w.partialPivLu().solve(sel_map - gbar_w * d_map);
            for (int q = 0; q < nq; ++q) map.row(nd + q) = xi_map.row(q);
        }
        if (sel.has_o()) map(nd + nq, *sel.o - 1) = 1.0;

        const Eigen::MatrixXcd mt = map * tw;
        Eigen::MatrixXcd phi = mt * net.Lambda.cast<Complex>() * mt.adjoint();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (phi + phi.adjoint()));
        min_eigs.push_back(es.eigenvalues().minCoeff());
    }
    return informativity_from_values(grid, min_eigs, tol, required_fraction);
}

ConditionReport check_informativity_data(const Dataset& data, const Selection& sel, const TransformedNetwork& tn,
                                         double tol, double required_fraction) {
    sel.validate(data.L);
    // residual-based innovations of the Y block
    ModelStructure ms = structure_from_transformed(tn);
    const Eigen::VectorXd theta = pack_theta(ms, tn);
    Eigen::MatrixXd xi = predict_errors(ms, theta, data, nullptr);

    const IndexSet D = sel.D();
    const int nd = static_cast<int>(D.size());
    const int nq = static_cast<int>(sel.Q.size());
    const int nk = nd + nq + (sel.has_o() ? 1 : 0);

    Dataset stacked;
    stacked.L = nk;
    stacked.K = 0;
    stacked.N = data.N;
    stacked.w = Eigen::MatrixXd(nk, data.N);
    for (int d = 0; d < nd; ++d) stacked.w.row(d) = data.w.row(D[d] - 1);
    for (int q = 0; q < nq; ++q) stacked.w.row(nd + q) = xi.row(q);
    if (sel.has_o()) stacked.w.row(nd + nq) = data.w.row(*sel.o - 1);

    std::vector<int> all(nk);
    for (int k = 0; k < nk; ++k) all[k] = k + 1;
    SpectrumEstimate est = estimate_spectrum(stacked, all);
    std::vector<double> min_eigs;
    min_eigs.reserve(est.omega.size());
    for (const auto& phi : est.phi) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (phi + phi.adjoint()));
        min_eigs.push_back(es.eigenvalues().minCoeff());
    }
    return informativity_from_values(est.omega, min_eigs, tol, required_fraction);
}

}  // namespace netid
