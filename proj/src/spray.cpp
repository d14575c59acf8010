#include "cfin/spray.hpp"

#include <algorithm>

namespace cfin {

SprayData::SprayData(int n, std::vector<Field> spray, std::vector<Field> theta)
    : n_(n), spray_(std::move(spray)), theta_(std::move(theta)) {
    if (int(spray_.size()) != n || int(theta_.size()) != n) {
        throw std::invalid_argument("SprayData: component count mismatch");
    }
}

SprayData SprayData::of_metric(const ConnectionBundle& conn) {
    std::vector<Field> g, t;
    for (int i = 1; i <= conn.n(); ++i) {
        g.push_back(conn.spray().at({i}));
        t.push_back(conn.theta_star().at({i}));
    }
    return SprayData(conn.n(), std::move(g), std::move(t));
}

Field SprayData::jet(const std::vector<Field>& base, int which, int i,
                     std::span<const Var> vars) const {
    for (const Var& v : vars) {
        if (v.kind != VarKind::Eta && v.kind != VarKind::EtaBar) {
            throw std::invalid_argument("SprayData: jets are vertical only");
        }
    }
    std::vector<uint8_t> key_vars;
    for (const Var& v : vars) key_vars.push_back(uint8_t((uint8_t(v.kind) << 5) | v.index));
    std::sort(key_vars.begin(), key_vars.end());

    std::string key;
    key.push_back(char(which));
    key.push_back(char(i));
    key.append(key_vars.begin(), key_vars.end());

    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = jets_.find(key);
        if (it != jets_.end()) return it->second;
    }
    Field f;
    if (vars.empty()) {
        f = base[i - 1];
    } else {
        std::vector<Var> head(vars.begin(), vars.end() - 1);
        f = jet(base, which, i, head).derivative(vars.back());
    }
    std::lock_guard<std::mutex> lk(mu_);
    return jets_.emplace(std::move(key), std::move(f)).first->second;
}

Field SprayData::spray_jet(int i, std::span<const Var> vars) const { return jet(spray_, 0, i, vars); }
Field SprayData::theta_jet(int i, std::span<const Var> vars) const { return jet(theta_, 1, i, vars); }

Field SprayData::spray_trace_jet(std::span<const Var> vars) const {
    Field acc;
    std::vector<Var> ext(vars.begin(), vars.end());
    for (int l = 1; l <= n_; ++l) {
        ext.push_back({VarKind::Eta, l});
        acc += spray_jet(l, ext);
        ext.pop_back();
    }
    return acc;
}

Field SprayData::theta_trace_jet(std::span<const Var> vars) const {
    Field acc;
    std::vector<Var> ext(vars.begin(), vars.end());
    for (int l = 1; l <= n_; ++l) {
        ext.push_back({VarKind::Eta, l});
        acc += theta_jet(l, ext);
        ext.pop_back();
    }
    return acc;
}

Field SprayData::canonical_n(int i, int j) const {
    Var v{VarKind::Eta, j};
    return spray_jet(i, {&v, 1});
}

Field SprayData::trace_n() const { return spray_trace_jet({}); }

Field SprayData::delta_can(const Field& f, int k) const {
    Field out = d(f, VarKind::Z, k);
    for (int j = 1; j <= n_; ++j) out -= canonical_n(j, k) * d(f, VarKind::Eta, j);
    return out;
}

Field SprayData::delta_can_bar(const Field& f, int k) const {
    Field out = d(f, VarKind::ZBar, k);
    for (int j = 1; j <= n_; ++j) out -= conj(canonical_n(j, k)) * d(f, VarKind::EtaBar, j);
    return out;
}

}  // namespace cfin
