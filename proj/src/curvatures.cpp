#include "cfin/curvatures.hpp"

namespace cfin {

namespace {
const Slot kUpP{Variance::Up, BarType::Plain};
const Slot kDownP{Variance::Down, BarType::Plain};
const Slot kDownB{Variance::Down, BarType::Barred};

double scaled_diff(Complex lhs, Complex rhs) {
    return std::abs(lhs - rhs) / (1.0 + std::max(std::abs(lhs), std::abs(rhs)));
}
}  // namespace

FieldTensor covariant_derivative(const ConnectionBundle& conn, const FieldTensor& t,
                                 CovDirection dir, int k) {
    const int n = t.n();
    FieldTensor out(n, t.slots());
    const int rank = t.rank();
    std::vector<int> idx(rank, 1);

    auto for_each_index = [&](auto&& body) {
        size_t total = 1;
        for (int r = 0; r < rank; ++r) total *= size_t(n);
        for (size_t f = 0; f < total; ++f) {
            size_t rem = f;
            for (int s = rank - 1; s >= 0; --s) {
                idx[s] = int(rem % n) + 1;
                rem /= n;
            }
            body();
        }
    };

    const bool horizontal = dir == CovDirection::HPlain || dir == CovDirection::HBar;
    const bool barred_dir = dir == CovDirection::HBar || dir == CovDirection::VBar;

    for_each_index([&] {
        const Field& f = t.at(idx);
        Field acc;
        switch (dir) {
            case CovDirection::HPlain: acc = conn.delta(f, k); break;
            case CovDirection::HBar: acc = conn.delta_bar(f, k); break;
            case CovDirection::VPlain: acc = d(f, VarKind::Eta, k); break;
            case CovDirection::VBar: acc = d(f, VarKind::EtaBar, k); break;
        }
        for (int s = 0; s < rank; ++s) {
            const Slot& slot = t.slots()[s];
            bool slot_barred = slot.bar == BarType::Barred;
            if (slot_barred != barred_dir) continue;  // (1,0)-type connection
            const FieldTensor& gamma = horizontal ? conn.chern_l() : conn.chern_c();
            int a = idx[s];
            std::vector<int> jdx = idx;
            for (int l = 1; l <= n; ++l) {
                jdx[s] = l;
                int up = slot.variance == Variance::Up ? a : l;
                int lo = slot.variance == Variance::Up ? l : a;
                Field coeff = slot_barred ? conj(gamma.at({up, lo, k})) : gamma.at({up, lo, k});
                if (slot.variance == Variance::Up) {
                    acc += t.at(jdx) * coeff;
                } else {
                    acc -= t.at(jdx) * coeff;
                }
            }
        }
        out.at(idx) = acc;
    });
    return out;
}

CurvatureBundle::CurvatureBundle(const ConnectionBundle& conn) : conn_(conn) {}

const FieldTensor& CurvatureBundle::k_hh3() const {
    std::lock_guard<std::mutex> lk(mu_);
    if (!k_hh3_) {
        const int n = conn_.n();
        FieldTensor t(n, {kUpP, kDownP, kDownP});
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    t.at({i, j, k}) = conn_.delta_can(conn_.canonical_n().at({i, j}), k) -
                                      conn_.delta_can(conn_.canonical_n().at({i, k}), j);
        k_hh3_ = std::move(t);
    }
    return *k_hh3_;
}

const FieldTensor& CurvatureBundle::theta_mixed() const {
    std::lock_guard<std::mutex> lk(mu_);
    if (!theta_mixed_) {
        const int n = conn_.n();
        FieldTensor t(n, {kUpP, kDownP, kDownB});
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    t.at({i, j, k}) = conn_.delta_can_bar(conn_.canonical_n().at({i, j}), k);
        theta_mixed_ = std::move(t);
    }
    return *theta_mixed_;
}

const FieldTensor& CurvatureBundle::k_hh() const {
    std::lock_guard<std::mutex> lk(mu_);
    if (!k_hh_) {
        const int n = conn_.n();
        const FieldTensor& g = conn_.berwald_gamma();
        FieldTensor t(n, {kUpP, kDownP, kDownP, kDownP});
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    for (int h = 1; h <= n; ++h) {
                        Field acc = conn_.delta_can(g.at({i, j, k}), h) -
                                    conn_.delta_can(g.at({i, j, h}), k);
                        for (int l = 1; l <= n; ++l) {
                            acc += g.at({l, j, k}) * g.at({i, l, h});
                            acc -= g.at({l, j, h}) * g.at({i, l, k});
                        }
                        t.at({i, j, k, h}) = acc;
                    }
        k_hh_ = std::move(t);
    }
    return *k_hh_;
}

const FieldTensor& CurvatureBundle::k_barbar() const {
    std::lock_guard<std::mutex> lk(mu_);
    if (!k_barbar_) {
        const int n = conn_.n();
        const FieldTensor& gm = conn_.berwald_gamma_mixed();
        FieldTensor t(n, {kUpP, kDownP, kDownB, kDownB});
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    for (int h = 1; h <= n; ++h) {
                        Field acc = conn_.delta_can_bar(gm.at({i, j, k}), h) -
                                    conn_.delta_can_bar(gm.at({i, j, h}), k);
                        for (int l = 1; l <= n; ++l) {
                            acc += gm.at({l, j, k}) * gm.at({i, l, h});
                            acc -= gm.at({l, j, h}) * gm.at({i, l, k});
                        }
                        t.at({i, j, k, h}) = acc;
                    }
        k_barbar_ = std::move(t);
    }
    return *k_barbar_;
}

const FieldTensor& CurvatureBundle::k_mixed() const {
    std::lock_guard<std::mutex> lk(mu_);
    if (!k_mixed_) {
        const int n = conn_.n();
        const FieldTensor& g = conn_.berwald_gamma();
        const FieldTensor& gm = conn_.berwald_gamma_mixed();
        FieldTensor t(n, {kUpP, kDownP, kDownB, kDownP});
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    for (int h = 1; h <= n; ++h) {
                        Field acc = conn_.delta_can(gm.at({i, j, k}), h) -
                                    conn_.delta_can_bar(g.at({i, j, h}), k);
                        for (int l = 1; l <= n; ++l) {
                            acc += gm.at({l, j, k}) * g.at({i, l, h});
                            acc -= g.at({l, j, h}) * gm.at({i, l, k});
                        }
                        t.at({i, j, k, h}) = acc;
                    }
        k_mixed_ = std::move(t);
    }
    return *k_mixed_;
}

const FieldTensor& CurvatureBundle::g_hv() const {
    std::lock_guard<std::mutex> lk(mu_);
    if (!g_hv_) {
        const int n = conn_.n();
        FieldTensor t(n, {kUpP, kDownP, kDownP, kDownP});
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    for (int h = 1; h <= n; ++h)
                        t.at({i, j, k, h}) = d(conn_.berwald_gamma().at({i, j, k}), VarKind::Eta, h);
        g_hv_ = std::move(t);
    }
    return *g_hv_;
}

const FieldTensor& CurvatureBundle::g_barvbar() const {
    std::lock_guard<std::mutex> lk(mu_);
    if (!g_barvbar_) {
        const int n = conn_.n();
        FieldTensor t(n, {kUpP, kDownP, kDownB, kDownB});
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    for (int h = 1; h <= n; ++h)
                        t.at({i, j, k, h}) =
                            d(conn_.berwald_gamma_mixed().at({i, j, k}), VarKind::EtaBar, h);
        g_barvbar_ = std::move(t);
    }
    return *g_barvbar_;
}

const FieldTensor& CurvatureBundle::g_mixedv() const {
    std::lock_guard<std::mutex> lk(mu_);
    if (!g_mixedv_) {
        const int n = conn_.n();
        FieldTensor t(n, {kUpP, kDownP, kDownB, kDownP});
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    for (int h = 1; h <= n; ++h)
                        t.at({i, j, k, h}) =
                            d(conn_.berwald_gamma_mixed().at({i, j, k}), VarKind::Eta, h);
        g_mixedv_ = std::move(t);
    }
    return *g_mixedv_;
}

const FieldTensor& CurvatureBundle::r_mixed() const {
    std::lock_guard<std::mutex> lk(mu_);
    if (!r_mixed_) {
        const int n = conn_.n();
        FieldTensor t(n, {kUpP, kDownP, kDownB, kDownP});
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    for (int h = 1; h <= n; ++h) {
                        Field acc = -conn_.delta_bar(conn_.chern_l().at({i, j, h}), k);
                        for (int l = 1; l <= n; ++l) {
                            acc -= conn_.delta_bar(conn_.chern_finsler_n().at({l, h}), k) *
                                   conn_.chern_c().at({i, j, l});
                        }
                        t.at({i, j, k, h}) = acc;
                    }
        r_mixed_ = std::move(t);
    }
    return *r_mixed_;
}

const FieldTensor& CurvatureBundle::r_lowered() const {
    const FieldTensor& r = r_mixed();
    std::lock_guard<std::mutex> lk(mu_);
    if (!r_lowered_) {
        const int n = conn_.n();
        const FinslerMetric& m = conn_.metric();
        FieldTensor t(n, {kDownB, kDownP, kDownB, kDownP});
        for (int rr = 1; rr <= n; ++rr)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    for (int h = 1; h <= n; ++h) {
                        Field acc;
                        for (int i = 1; i <= n; ++i) acc += r.at({i, j, k, h}) * Expr(m.g(i, rr));
                        t.at({rr, j, k, h}) = acc;
                    }
        r_lowered_ = std::move(t);
    }
    return *r_lowered_;
}

const FieldTensor& CurvatureBundle::k_lowered() const {
    const FieldTensor& k = k_mixed();
    std::lock_guard<std::mutex> lk(mu_);
    if (!k_lowered_) {
        const int n = conn_.n();
        const FinslerMetric& m = conn_.metric();
        FieldTensor t(n, {kDownB, kDownP, kDownB, kDownP});
        for (int rr = 1; rr <= n; ++rr)
            for (int j = 1; j <= n; ++j)
                for (int kk = 1; kk <= n; ++kk)
                    for (int h = 1; h <= n; ++h) {
                        Field acc;
                        for (int i = 1; i <= n; ++i) acc += k.at({i, j, kk, h}) * Expr(m.g(i, rr));
                        t.at({rr, j, kk, h}) = acc;
                    }
        k_lowered_ = std::move(t);
    }
    return *k_lowered_;
}

const FieldTensor& CurvatureBundle::ricci_hv() const {
    const FieldTensor& g = g_hv();
    std::lock_guard<std::mutex> lk(mu_);
    if (!ricci_hv_) ricci_hv_ = g.trace(0, 1);
    return *ricci_hv_;
}

const FieldTensor& CurvatureBundle::ricci_barvbar() const {
    const FieldTensor& g = g_barvbar();
    std::lock_guard<std::mutex> lk(mu_);
    if (!ricci_barvbar_) ricci_barvbar_ = g.trace(0, 1);
    return *ricci_barvbar_;
}

const FieldTensor& CurvatureBundle::ricci_mixed() const {
    const FieldTensor& g = g_mixedv();
    std::lock_guard<std::mutex> lk(mu_);
    if (!ricci_mixed_) ricci_mixed_ = g.trace(0, 1);
    return *ricci_mixed_;
}

const FieldTensor& CurvatureBundle::ricci_k() const {
    const FieldTensor& k = k_hh();
    std::lock_guard<std::mutex> lk(mu_);
    if (!ricci_k_) ricci_k_ = k.trace(0, 1);
    return *ricci_k_;
}

const FieldTensor& CurvatureBundle::ricci_h() const {
    const FieldTensor& k = k_hh();
    std::lock_guard<std::mutex> lk(mu_);
    if (!ricci_h_) ricci_h_ = k.trace(0, 3);
    return *ricci_h_;
}

const FieldTensor& CurvatureBundle::ricci_k_mixed() const {
    const FieldTensor& k = k_mixed();
    std::lock_guard<std::mutex> lk(mu_);
    if (!ricci_k_mixed_) ricci_k_mixed_ = k.trace(0, 1);
    return *ricci_k_mixed_;
}

namespace {
Field eta_contract_all(const FieldTensor& t4) {
    // contract slots (rbar, j, kbar, h) against etabar, eta, etabar, eta
    return t4.contract_eta(0).contract_eta(0).contract_eta(0).contract_eta(0).at(
        std::span<const int>{});
}
}  // namespace

const Field& CurvatureBundle::holomorphic_curvature() const {
    const FieldTensor& rl = r_lowered();
    std::lock_guard<std::mutex> lk(mu_);
    if (!kf_) {
        Expr L(conn_.metric().L());
        kf_ = eta_contract_all(rl) * (Expr::constant(2.0) / pow(L, 2));
    }
    return *kf_;
}

const Field& CurvatureBundle::holomorphic_curvature_berwald() const {
    const FieldTensor& kl = k_lowered();
    std::lock_guard<std::mutex> lk(mu_);
    if (!kf_berwald_) {
        Expr L(conn_.metric().L());
        kf_berwald_ = eta_contract_all(kl) * (Expr::constant(2.0) / pow(L, 2));
    }
    return *kf_berwald_;
}

double CurvatureBundle::holomorphic_curvature_at(EvalContext& ctx) const {
    Complex v = ctx.value(holomorphic_curvature());
    if (std::abs(v.imag()) > 1e-10 * (1.0 + std::abs(v))) {
        throw std::runtime_error("holomorphic curvature has non-real value " + std::to_string(v.real()) +
                                 " + " + std::to_string(v.imag()) + "i");
    }
    return v.real();
}

const CurvatureBundle::IdentityFields& CurvatureBundle::identity_fields() const {
    const FieldTensor& k3 = k_hh3();
    const FieldTensor& k4 = k_hh();
    const FieldTensor& ghv = g_hv();
    const FieldTensor& gbb = g_barvbar();
    const FieldTensor& gmx = g_mixedv();
    std::lock_guard<std::mutex> lk(mu_);
    if (!identity_fields_) {
        const int n = conn_.n();
        IdentityFields f;
        f.k_jet_diff = FieldTensor(n, {kUpP, kDownP, kDownP, kDownP});
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    for (int h = 1; h <= n; ++h)
                        f.k_jet_diff.at({i, j, k, h}) =
                            k4.at({i, j, k, h}) - d(k3.at({i, k, h}), VarKind::Eta, j);

        std::vector<Slot> r5{kUpP, kDownP, kDownP, kDownP, kDownP};
        f.bianchi.assign(6, FieldTensor(n, r5));
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    for (int h = 1; h <= n; ++h)
                        for (int r = 1; r <= n; ++r) {
                            std::initializer_list<int> idx{i, j, k, h, r};
                            f.bianchi[0].at(idx) = d(ghv.at({i, j, k, h}), VarKind::Eta, r) -
                                                   d(ghv.at({i, j, k, r}), VarKind::Eta, h);
                            f.bianchi[1].at(idx) = d(gmx.at({i, j, k, h}), VarKind::Eta, r) -
                                                   d(gmx.at({i, j, k, r}), VarKind::Eta, h);
                            f.bianchi[2].at(idx) = d(ghv.at({i, j, k, h}), VarKind::EtaBar, r) -
                                                   d(gmx.at({i, j, r, k}), VarKind::Eta, h);
                            f.bianchi[3].at(idx) = d(gbb.at({i, j, k, h}), VarKind::Eta, r) -
                                                   d(gmx.at({i, j, k, r}), VarKind::EtaBar, h);
                            f.bianchi[4].at(idx) = d(gbb.at({i, j, k, h}), VarKind::EtaBar, r) -
                                                   d(gbb.at({i, j, k, r}), VarKind::EtaBar, h);
                            f.bianchi[5].at(idx) = d(gmx.at({i, j, h, k}), VarKind::EtaBar, r) -
                                                   d(gmx.at({i, j, r, k}), VarKind::EtaBar, h);
                        }
        identity_fields_ = std::move(f);
    }
    return *identity_fields_;
}

std::vector<IdentityResidual> CurvatureBundle::identity_residuals(EvalContext& ctx) const {
    const int n = conn_.n();
    std::vector<IdentityResidual> out;
    auto record = [&](const std::string& name, double r) { out.push_back({name, r}); };
    const IdentityFields& fields = identity_fields();

    // K^i_{jkh} = d K^i_{kh} / d eta^j and K^i_{jkh} eta^j = K^i_{kh}
    {
        double r_jet = 0, r_eta = 0;
        double k4_scale = 1.0 + k_hh().max_abs(ctx);
        for (int i = 1; i <= n; ++i)
            for (int k = 1; k <= n; ++k)
                for (int h = 1; h <= n; ++h) {
                    Complex base = ctx.value(k_hh3().at({i, k, h}));
                    Complex contracted(0, 0);
                    for (int j = 1; j <= n; ++j) {
                        r_jet = std::max(r_jet, std::abs(ctx.value(fields.k_jet_diff.at({i, j, k, h}))) /
                                                    k4_scale);
                        contracted += ctx.value(k_hh().at({i, j, k, h})) * ctx.point().eta[j - 1];
                    }
                    r_eta = std::max(r_eta, scaled_diff(contracted, base));
                }
        record("k_hh_is_vertical_jet", r_jet);
        record("k_hh_eta_contraction", r_eta);
    }

    // K^i_{j kbar hbar} + K^i_{j hbar kbar} = 0
    {
        double r = 0;
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    for (int h = 1; h <= n; ++h) {
                        Complex a = ctx.value(k_barbar().at({i, j, k, h}));
                        Complex b = ctx.value(k_barbar().at({i, j, h, k}));
                        r = std::max(r, scaled_diff(a, -b));
                    }
        record("k_barbar_antisymmetry", r);
    }

    // G^i_{j kbar h} eta^j = G^i_{h kbar} ; G^i_{j kbar hbar} etabar^h = -G^i_{j kbar}
    {
        double r1 = 0, r2 = 0;
        for (int i = 1; i <= n; ++i)
            for (int k = 1; k <= n; ++k)
                for (int h = 1; h <= n; ++h) {
                    Complex acc(0, 0);
                    for (int j = 1; j <= n; ++j)
                        acc += ctx.value(g_mixedv().at({i, j, k, h})) * ctx.point().eta[j - 1];
                    r1 = std::max(r1, scaled_diff(acc, ctx.value(conn_.berwald_gamma_mixed().at({i, h, k}))));
                }
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k) {
                    Complex acc(0, 0);
                    for (int h = 1; h <= n; ++h)
                        acc += ctx.value(g_barvbar().at({i, j, k, h})) * std::conj(ctx.point().eta[h - 1]);
                    r2 = std::max(r2, scaled_diff(acc, -ctx.value(conn_.berwald_gamma_mixed().at({i, j, k}))));
                }
        record("g_mixedv_eta_contraction", r1);
        record("g_barvbar_etabar_contraction", r2);
    }

    // vertical Bianchi symmetries of the displayed list
    {
        double r = 0;
        double scale = 1.0 + std::max({g_hv().max_abs(ctx), g_barvbar().max_abs(ctx),
                                       g_mixedv().max_abs(ctx)});
        for (const FieldTensor& t : fields.bianchi) r = std::max(r, t.max_abs(ctx) / scale);
        record("vertical_bianchi_symmetries", r);
    }

    return out;
}

CurvatureBundle::RicciSuite CurvatureBundle::ricci_suite(EvalContext& ctx) const {
    const int n = conn_.n();
    RicciSuite s;
    s.k.resize(n, n);
    s.h.resize(n, n);
    s.k_mixed.resize(n, n);
    s.h0k.resize(n);
    s.hk0.resize(n);
    s.hk.resize(n);
    for (int k = 1; k <= n; ++k) {
        for (int h = 1; h <= n; ++h) {
            s.k(k - 1, h - 1) = ctx.value(ricci_k().at({k, h}));
            s.h(k - 1, h - 1) = ctx.value(ricci_h().at({k, h}));
            s.k_mixed(k - 1, h - 1) = ctx.value(ricci_k_mixed().at({k, h}));
        }
    }
    const auto& eta = ctx.point().eta;
    for (int k = 1; k <= n; ++k) {
        Complex h0(0, 0), hk0(0, 0);
        for (int j = 1; j <= n; ++j) {
            h0 += eta[j - 1] * s.h(j - 1, k - 1);
            hk0 += s.h(k - 1, j - 1) * eta[j - 1];
        }
        s.h0k(k - 1) = h0;
        s.hk0(k - 1) = hk0;
        s.hk(k - 1) = n >= 2 ? (double(n) * h0 + hk0) / double(n - 1) : Complex(0, 0);
    }
    s.link_residual = 0;
    for (int j = 1; j <= n; ++j)
        for (int k = 1; k <= n; ++k)
            s.link_residual = std::max(
                s.link_residual, scaled_diff(s.h(k - 1, j - 1) - s.h(j - 1, k - 1), s.k(j - 1, k - 1)));
    return s;
}

}  // namespace cfin
