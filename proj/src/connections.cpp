#include "cfin/connections.hpp"

namespace cfin {

namespace {
const Slot kUpP{Variance::Up, BarType::Plain};
const Slot kDownP{Variance::Down, BarType::Plain};
const Slot kDownB{Variance::Down, BarType::Barred};
}  // namespace

ConnectionBundle::ConnectionBundle(const FinslerMetric& m) : m_(m) {
    const int n = m.n();
    const HessianPtr& h = m.hessian();

    n_cf_ = FieldTensor(n, {kUpP, kDownP});
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            Field acc;
            for (int mm = 1; mm <= n; ++mm) {
                Expr row = Expr::zero();
                for (int l = 1; l <= n; ++l) {
                    row = row + d(m.g(l, mm), VarKind::Z, j) * Expr::eta(l);
                }
                acc += Field::inverse_entry(h, mm, i) * row;
            }
            n_cf_.at({i, j}) = acc;
        }
    }

    spray_ = FieldTensor(n, {kUpP});
    for (int i = 1; i <= n; ++i) {
        Field acc;
        for (int j = 1; j <= n; ++j) acc += n_cf_.at({i, j}) * Expr::eta(j);
        spray_.at({i}) = acc * Expr::constant(0.5);
    }

    n_can_ = FieldTensor(n, {kUpP, kDownP});
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) n_can_.at({i, j}) = d(spray_.at({i}), VarKind::Eta, j);
    }

    g_jk_ = FieldTensor(n, {kUpP, kDownP, kDownP});
    g_jkbar_ = FieldTensor(n, {kUpP, kDownP, kDownB});
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            for (int k = 1; k <= n; ++k) {
                g_jk_.at({i, j, k}) = d(n_can_.at({i, j}), VarKind::Eta, k);
                g_jkbar_.at({i, j, k}) = d(n_can_.at({i, j}), VarKind::EtaBar, k);
            }
        }
    }

    l_ = FieldTensor(n, {kUpP, kDownP, kDownP});
    l_alt_ = FieldTensor(n, {kUpP, kDownP, kDownP});
    c_ = FieldTensor(n, {kUpP, kDownP, kDownP});
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            for (int k = 1; k <= n; ++k) {
                Field acc, acc_c;
                for (int l = 1; l <= n; ++l) {
                    acc += Field::inverse_entry(h, l, i) * delta(Field::from_expr(m.g(j, l)), k);
                    acc_c += Field::inverse_entry(h, l, i) * Expr(d(m.g(j, l), VarKind::Eta, k));
                }
                l_.at({i, j, k}) = acc;
                l_alt_.at({i, j, k}) = d(n_cf_.at({i, k}), VarKind::Eta, j);
                c_.at({i, j, k}) = acc_c;
            }
        }
    }

    t_ = FieldTensor(n, {kUpP, kDownP, kDownP});
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            for (int k = 1; k <= n; ++k) t_.at({i, j, k}) = l_.at({i, j, k}) - l_.at({i, k, j});
        }
    }

    theta_ = FieldTensor(n, {kUpP});
    theta_alt_ = FieldTensor(n, {kUpP});
    for (int i = 1; i <= n; ++i) {
        Field acc, acc_alt;
        for (int j = 1; j <= n; ++j) {
            // delta_can_bar applied to L, written out with dL/dzbar^j and
            // the conjugated canonical connection
            Field db = Field::from_expr(d(m.L(), VarKind::ZBar, j));
            Field diff_contracted;
            for (int r = 1; r <= n; ++r) {
                Expr etabar_r = m.etabar_lowered(r);
                db -= conj(n_can_.at({r, j})) * Expr(etabar_r);
                diff_contracted +=
                    (conj(n_cf_.at({r, j})) - conj(n_can_.at({r, j}))) * Expr(etabar_r);
            }
            acc += Field::inverse_entry(h, j, i) * db;
            acc_alt += Field::inverse_entry(h, j, i) * diff_contracted;
        }
        theta_.at({i}) = acc * Expr::constant(2.0);
        theta_alt_.at({i}) = acc_alt * Expr::constant(2.0);
    }
}

Field ConnectionBundle::delta(const Field& f, int k) const {
    Field out = d(f, VarKind::Z, k);
    for (int j = 1; j <= n(); ++j) out -= n_cf_.at({j, k}) * d(f, VarKind::Eta, j);
    return out;
}

Field ConnectionBundle::delta_bar(const Field& f, int k) const {
    Field out = d(f, VarKind::ZBar, k);
    for (int j = 1; j <= n(); ++j) out -= conj(n_cf_.at({j, k})) * d(f, VarKind::EtaBar, j);
    return out;
}

Field ConnectionBundle::delta_can(const Field& f, int k) const {
    Field out = d(f, VarKind::Z, k);
    for (int j = 1; j <= n(); ++j) out -= n_can_.at({j, k}) * d(f, VarKind::Eta, j);
    return out;
}

Field ConnectionBundle::delta_can_bar(const Field& f, int k) const {
    Field out = d(f, VarKind::ZBar, k);
    for (int j = 1; j <= n(); ++j) out -= conj(n_can_.at({j, k})) * d(f, VarKind::EtaBar, j);
    return out;
}

KahlerClassReport ConnectionBundle::kahler_class(EvalContext& ctx, double tol) const {
    const int nn = n();
    const EvalPoint& p = ctx.point();
    KahlerClassReport rep;

    Eigen::MatrixXcd g = ctx.metric_matrix(*m_.hessian());
    rep.scale = g.cwiseAbs().maxCoeff();

    for (int k = 1; k <= nn; ++k) {
        Complex weak(0, 0);
        for (int i = 1; i <= nn; ++i) {
            Complex contracted(0, 0);
            for (int j = 1; j <= nn; ++j) {
                Complex tv = ctx.value(t_.at({i, j, k}));
                rep.strongly = std::max(rep.strongly, std::abs(tv));
                contracted += tv * p.eta[j - 1];
            }
            rep.kahler = std::max(rep.kahler, std::abs(contracted));
            for (int l = 1; l <= nn; ++l) {
                weak += g(i - 1, l - 1) * contracted * std::conj(p.eta[l - 1]);
            }
        }
        rep.weakly = std::max(rep.weakly, std::abs(weak));
    }

    for (int i = 1; i <= nn; ++i) {
        for (int j = 1; j <= nn; ++j) {
            for (int k = 1; k <= nn; ++k) {
                rep.purely_hermitian =
                    std::max({rep.purely_hermitian, std::abs(ctx.value(d(m_.g(i, j), VarKind::Eta, k))),
                              std::abs(ctx.value(d(m_.g(i, j), VarKind::EtaBar, k)))});
            }
        }
    }

    double gate = tol * (1.0 + rep.scale);
    rep.is_strongly = rep.strongly <= gate;
    rep.is_kahler = rep.kahler <= gate;
    rep.is_weakly = rep.weakly <= gate;
    rep.is_purely_hermitian = rep.purely_hermitian <= gate;
    return rep;
}

double ConnectionBundle::vertical_spray_pairing_residual(EvalContext& ctx) const {
    const int nn = n();
    double worst = 0;
    for (int k = 1; k <= nn; ++k) {
        Complex acc(0, 0);
        for (int i = 1; i <= nn; ++i) {
            acc += ctx.value(d(spray_.at({i}), VarKind::EtaBar, k)) * ctx.value(m_.eta_lowered(i));
        }
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

const std::pair<FieldTensor, FieldTensor>& ConnectionBundle::theta_identity_pair() const {
    std::lock_guard<std::mutex> lk(mu_);
    if (!theta_identity_) {
        const int nn = n();
        const HessianPtr& h = m_.hessian();
        FieldTensor lhs(nn, {{Variance::Up, BarType::Plain}, {Variance::Down, BarType::Plain}});
        FieldTensor diff(nn, {{Variance::Up, BarType::Plain}, {Variance::Down, BarType::Plain}});
        for (int i = 1; i <= nn; ++i) {
            for (int k = 1; k <= nn; ++k) {
                Field l = d(theta_.at({i}), VarKind::Eta, k);
                Field rhs;
                for (int ll = 1; ll <= nn; ++ll) rhs -= theta_.at({ll}) * c_.at({i, k, ll});
                for (int j = 1; j <= nn; ++j) {
                    Field bracket;
                    for (int r = 1; r <= nn; ++r) {
                        bracket += (conj(n_cf_.at({r, j})) - conj(n_can_.at({r, j}))) *
                                   Expr(m_.g(k, r));
                        Expr c_contracted = Expr::zero();
                        for (int ll = 1; ll <= nn; ++ll) {
                            c_contracted =
                                c_contracted + d(m_.g(ll, r), VarKind::EtaBar, j) * Expr::eta(ll);
                        }
                        bracket += d(conj(spray_.at({r})), VarKind::Eta, k) * c_contracted;
                    }
                    rhs += Field::inverse_entry(h, j, i) * bracket * Expr::constant(2.0);
                }
                lhs.at({i, k}) = l;
                diff.at({i, k}) = l - rhs;
            }
        }
        theta_identity_ = std::make_pair(std::move(lhs), std::move(diff));
    }
    return *theta_identity_;
}

double ConnectionBundle::theta_derivative_identity_residual(EvalContext& ctx) const {
    const auto& [lhs, diff] = theta_identity_pair();
    const int nn = n();
    double worst = 0;
    for (int i = 1; i <= nn; ++i) {
        for (int k = 1; k <= nn; ++k) {
            double scale = 1.0 + 2.0 * std::abs(ctx.value(lhs.at({i, k})));
            worst = std::max(worst, std::abs(ctx.value(diff.at({i, k}))) / scale);
        }
    }
    return worst;
}

ConnectionBundle::ConnectionBundle(const ConnectionBundle& o)
    : m_(o.m_),
      n_cf_(o.n_cf_),
      spray_(o.spray_),
      n_can_(o.n_can_),
      g_jk_(o.g_jk_),
      g_jkbar_(o.g_jkbar_),
      l_(o.l_),
      l_alt_(o.l_alt_),
      c_(o.c_),
      t_(o.t_),
      theta_(o.theta_),
      theta_alt_(o.theta_alt_) {}

}  // namespace cfin
