#include "netid/network.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace netid {

using nlohmann::json;
using nlohmann::ordered_json;

bool NetworkSpec::has_e_edge(int e_index, int to) const {
    // e_l reaches w_k directly if H_{k,m} != 0 for some m statically
    // coupled to e_l through Lambda (for diagonal Lambda: H_{k,l} != 0).
    for (int m = 1; m <= L; ++m) {
        if (Lambda(m - 1, e_index - 1) != 0.0 && !h(to, m).is_zero()) return true;
    }
    return false;
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> NetworkSpec::noise_correlation_pattern() const {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> bh(L, L), bl(L, L), out(L, L);
    for (int r = 0; r < L; ++r)
        for (int c = 0; c < L; ++c) {
            bh(r, c) = !H.at(r, c).is_zero();
            bl(r, c) = Lambda(r, c) != 0.0;
        }
    for (int r = 0; r < L; ++r)
        for (int c = 0; c < L; ++c) {
            bool v = false;
            for (int m = 0; m < L && !v; ++m)
                for (int n = 0; n < L && !v; ++n) v = bh(r, m) && bl(m, n) && bh(c, n);
            out(r, c) = v;
        }
    return out;
}

std::vector<int> NetworkSpec::in_neighbors(int node) const {
    std::vector<int> out;
    for (int k = 1; k <= L; ++k)
        if (k != node && has_w_edge(k, node)) out.push_back(k);
    return out;
}

std::vector<int> NetworkSpec::out_neighbors(int node) const {
    std::vector<int> out;
    for (int k = 1; k <= L; ++k)
        if (k != node && has_w_edge(node, k)) out.push_back(k);
    return out;
}

namespace {

poly::Coeffs coeffs_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + ": expected a non-empty coefficient array");
    poly::Coeffs out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ParseError(std::string(what) + ": coefficients must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

RationalTransfer transfer_from_json(const json& j, const char* what) {
    poly::Coeffs num = coeffs_from_json(j.at("num"), what);
    poly::Coeffs den = j.contains("den") ? coeffs_from_json(j.at("den"), what) : poly::Coeffs{1.0};
    if (den[0] == 0.0) throw ParseError(std::string(what) + ": denominator constant term must be nonzero");
    return RationalTransfer(num, den);
}

void fill_entries(TransferMatrix& m, const json& arr, int max_to, int max_from, const char* what, bool forbid_diagonal) {
    for (const auto& e : arr) {
        const int to = e.at("to").get<int>();
        const int from = e.at("from").get<int>();
        std::ostringstream ctx;
        ctx << what << " (" << from << " -> " << to << ")";
        if (to < 1 || to > max_to || from < 1 || from > max_from) throw ParseError(ctx.str() + ": index out of range");
        if (forbid_diagonal && to == from) throw ParseError(ctx.str() + ": non-hollow G (self-loop G_" + std::to_string(to) + std::to_string(from) + ")");
        m.at(to - 1, from - 1) = transfer_from_json(e, ctx.str().c_str());
    }
}

json transfer_to_json(const RationalTransfer& t, int to, int from) {
    ordered_json e;
    e["to"] = to;
    e["from"] = from;
    e["num"] = t.num();
    e["den"] = t.den();
    return e;
}

}  // namespace

NetworkSpec parse_network(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ParseError(std::string("syntax error: ") + err.what());
    }
    NetworkSpec net;
    try {
        net.L = doc.at("L").get<int>();
        if (net.L < 1) throw ParseError("L must be >= 1");
        net.G = TransferMatrix::zeros(net.L, net.L);
        if (doc.contains("modules")) fill_entries(net.G, doc.at("modules"), net.L, net.L, "modules", true);

        net.H = TransferMatrix::identity(net.L);
        net.Lambda = Eigen::MatrixXd::Identity(net.L, net.L);
        if (doc.contains("noise")) {
            const json& noise = doc.at("noise");
            if (noise.contains("H")) {
                fill_entries(net.H, noise.at("H"), net.L, net.L, "noise.H", false);
                for (int k = 1; k <= net.L; ++k) {
                    if (net.h(k, k).feedthrough() != 1.0)
                        throw ParseError("noise.H: non-monic H diagonal at node " + std::to_string(k));
                }
            }
            if (noise.contains("Lambda")) {
                const json& lam = noise.at("Lambda");
                if (!lam.is_array() || static_cast<int>(lam.size()) != net.L) throw ParseError("noise.Lambda: expected an LxL array");
                for (int r = 0; r < net.L; ++r) {
                    if (static_cast<int>(lam[r].size()) != net.L) throw ParseError("noise.Lambda: row " + std::to_string(r + 1) + " has wrong length");
                    for (int c = 0; c < net.L; ++c) net.Lambda(r, c) = lam[r][c].get<double>();
                }
            } else if (noise.contains("lambda_diag")) {
                const json& lam = noise.at("lambda_diag");
                if (static_cast<int>(lam.size()) != net.L) throw ParseError("noise.lambda_diag: expected L values");
                net.Lambda.setZero();
                for (int k = 0; k < net.L; ++k) net.Lambda(k, k) = lam[k].get<double>();
            }
        }

        net.K = doc.value("K", 0);
        if (doc.contains("excitation")) {
            const json& exc = doc.at("excitation");
            if (net.K == 0) {
                int mx = 0;
                for (const auto& e : exc) mx = std::max(mx, e.at("from").get<int>());
                net.K = mx;
            }
            TransferMatrix r = TransferMatrix::zeros(net.L, std::max(net.K, 1));
            fill_entries(r, exc, net.L, net.K, "excitation", false);
            net.R = r;
        }
    } catch (const json::exception& err) {
        throw ParseError(std::string("document error: ") + err.what());
    }
    return net;
}

NetworkSpec load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open network file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_network(ss.str());
}

std::string serialize_network(const NetworkSpec& net) {
    ordered_json doc;
    doc["format_version"] = 1;
    doc["L"] = net.L;
    ordered_json modules = ordered_json::array();
    for (int to = 1; to <= net.L; ++to)
        for (int from = 1; from <= net.L; ++from)
            if (!net.g(to, from).is_zero()) modules.push_back(transfer_to_json(net.g(to, from), to, from));
    doc["modules"] = modules;

    ordered_json hent = ordered_json::array();
    for (int to = 1; to <= net.L; ++to)
        for (int from = 1; from <= net.L; ++from)
            if (!net.h(to, from).is_zero()) hent.push_back(transfer_to_json(net.h(to, from), to, from));
    ordered_json lam = ordered_json::array();
    for (int r = 0; r < net.L; ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < net.L; ++c) row.push_back(net.Lambda(r, c));
        lam.push_back(row);
    }
    doc["noise"] = ordered_json{{"H", hent}, {"Lambda", lam}};

    if (net.R && net.K > 0) {
        doc["K"] = net.K;
        ordered_json exc = ordered_json::array();
        for (int to = 1; to <= net.L; ++to)
            for (int from = 1; from <= net.K; ++from)
                if (!net.R->at(to - 1, from - 1).is_zero()) exc.push_back(transfer_to_json(net.R->at(to - 1, from - 1), to, from));
        doc["excitation"] = exc;
    }
    return doc.dump(2);
}

ValidationReport validate_network(const NetworkSpec& net, double margin) {
    ValidationReport rep;

    bool hollow = true;
    for (int k = 1; k <= net.L; ++k)
        if (!net.g(k, k).is_zero()) hollow = false;
    rep.items.push_back({"hollow_G", hollow, hollow ? "" : "diagonal entry of G is nonzero"});

    bool monic = true;
    std::string monic_detail;
    for (int r = 1; r <= net.L && monic; ++r)
        for (int c = 1; c <= net.L && monic; ++c) {
            const double ft = net.h(r, c).feedthrough();
            if ((r == c && ft != 1.0) || (r != c && ft != 0.0)) {
                monic = false;
                monic_detail = "H feedthrough is not the identity at (" + std::to_string(r) + "," + std::to_string(c) + ")";
            }
        }
    rep.items.push_back({"monic_H", monic, monic_detail});

    bool spd = net.Lambda.isApprox(net.Lambda.transpose(), 1e-12);
    if (spd) {
        Eigen::LLT<Eigen::MatrixXd> llt(net.Lambda);
        spd = llt.info() == Eigen::Success;
    }
    rep.items.push_back({"Lambda_spd", spd, spd ? "" : "Lambda is not symmetric positive definite"});

    // network stability: poles of (I - G)^-1
    bool net_stable = false;
    std::string stab_detail;
    try {
        StateSpace sg = minreal(realize(net.G));
        Eigen::MatrixXd iminus = Eigen::MatrixXd::Identity(net.L, net.L) - sg.D;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(iminus);
        if (!lu.isInvertible()) {
            stab_detail = "delay-free loop makes the network ill-posed";
        } else {
            Eigen::MatrixXd acl = sg.A + sg.B * lu.solve(sg.C);
            const double rho = spectral_radius(acl);
            net_stable = rho < 1.0 - margin;
            if (!net_stable) stab_detail = "closed-loop spectral radius " + std::to_string(rho);
        }
    } catch (const std::exception& err) {
        stab_detail = err.what();
    }
    rep.items.push_back({"network_stable", net_stable, stab_detail});

    StateSpace sh = minreal(realize(net.H));
    const double rho_h = spectral_radius(sh.A);
    const bool h_stable = rho_h < 1.0 - margin;
    rep.items.push_back({"H_stable", h_stable, h_stable ? "" : "H spectral radius " + std::to_string(rho_h)});

    bool h_minphase = false;
    std::string mp_detail;
    try {
        StateSpace shi = ss_inverse(sh);
        const double rho_i = spectral_radius(shi.A);
        h_minphase = rho_i < 1.0 - margin;
        if (!h_minphase) mp_detail = "inverse noise model spectral radius " + std::to_string(rho_i);
    } catch (const std::exception& err) {
        mp_detail = err.what();
    }
    rep.items.push_back({"H_minimum_phase", h_minphase, mp_detail});

    return rep;
}

}  // namespace netid
