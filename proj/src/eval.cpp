#include "cfin/eval.hpp"

#include <cmath>

#include "cfin/parser.hpp"

namespace cfin {

EvalPoint::EvalPoint(std::vector<Complex> z_, std::vector<Complex> eta_)
    : z(std::move(z_)), eta(std::move(eta_)) {
    if (z.size() != eta.size()) throw std::invalid_argument("EvalPoint: z and eta sizes differ");
    double norm2 = 0.0;
    for (Complex w : eta) norm2 += std::norm(w);
    if (norm2 <= 0.0) throw std::invalid_argument("EvalPoint: eta must be nonzero");
}

void ExprEvaluator::set_point(const EvalPoint& p) {
    pt_ = p;
    ++stamp_;
}

Complex ExprEvaluator::value(ExprId root) {
    const ExprPool& pool = ExprPool::instance();
    if (seen_.size() < pool.size()) {
        seen_.resize(pool.size(), 0);
        memo_.resize(pool.size());
    }

    // Explicit post-order stack; derivative towers can be deep.
    struct Frame {
        ExprId id;
        uint32_t next = 0;
    };
    std::vector<Frame> stack;
    stack.push_back({root});

    auto lookup = [&](ExprId id) -> bool { return seen_[id] == stamp_ + 1; };

    while (!stack.empty()) {
        Frame& f = stack.back();
        if (lookup(f.id)) {
            stack.pop_back();
            continue;
        }
        auto kids = pool.children(f.id);
        if (f.next < kids.size()) {
            ExprId k = kids[f.next++];
            if (!lookup(k)) stack.push_back({k});
            continue;
        }

        const ExprPool::Node& nd = pool.node(f.id);
        Complex v;
        switch (nd.kind) {
            case NodeKind::Constant:
                v = nd.cval;
                break;
            case NodeKind::Variable: {
                int i = nd.vindex - 1;
                if (i >= int(pt_.z.size())) throw EvalError("variable index beyond point dimension", f.id);
                switch (nd.vkind) {
                    case VarKind::Z: v = pt_.z[i]; break;
                    case VarKind::ZBar: v = std::conj(pt_.z[i]); break;
                    case VarKind::Eta: v = pt_.eta[i]; break;
                    case VarKind::EtaBar: v = std::conj(pt_.eta[i]); break;
                }
                break;
            }
            case NodeKind::Sum: {
                v = Complex(0.0, 0.0);
                for (ExprId k : kids) v += memo_[k];
                break;
            }
            case NodeKind::Product: {
                v = Complex(1.0, 0.0);
                for (ExprId k : kids) v *= memo_[k];
                break;
            }
            case NodeKind::Quotient: {
                Complex den = memo_[kids[1]];
                if (den == Complex(0.0, 0.0)) throw EvalError("division by zero at " + print(Expr(kids[1])), f.id);
                v = memo_[kids[0]] / den;
                break;
            }
            case NodeKind::IntPow: {
                Complex b = memo_[kids[0]];
                int32_t e = nd.ipow;
                if (b == Complex(0.0, 0.0) && e < 0) {
                    throw EvalError("zero raised to negative power at " + print(Expr(kids[0])), f.id);
                }
                bool inv = e < 0;
                uint32_t k = uint32_t(inv ? -int64_t(e) : int64_t(e));
                Complex acc(1.0, 0.0);
                while (k) {
                    if (k & 1) acc *= b;
                    b *= b;
                    k >>= 1;
                }
                v = inv ? Complex(1.0, 0.0) / acc : acc;
                break;
            }
            case NodeKind::RealPow: {
                Complex b = memo_[kids[0]];
                if (b == Complex(0.0, 0.0) && nd.rpow < 0.0) {
                    throw EvalError("zero raised to negative power at " + print(Expr(kids[0])), f.id);
                }
                v = std::pow(b, nd.rpow);
                break;
            }
            case NodeKind::Exp:
                v = std::exp(memo_[kids[0]]);
                break;
            case NodeKind::Log: {
                Complex b = memo_[kids[0]];
                if (b == Complex(0.0, 0.0)) throw EvalError("log of zero at " + print(Expr(kids[0])), f.id);
                v = std::log(b);
                break;
            }
            case NodeKind::Neg:
                v = -memo_[kids[0]];
                break;
        }
        memo_[f.id] = v;
        seen_[f.id] = stamp_ + 1;
        stack.pop_back();
    }
    return memo_[root];
}

uint64_t Rng::next_u64() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double Rng::next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

double Rng::next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

std::vector<EvalPoint> sample_points(int n, const SamplingConfig& cfg) {
    Rng rng(cfg.seed);
    std::vector<EvalPoint> pts;
    pts.reserve(cfg.count);
    const double two_pi = 6.283185307179586476925286766559;
    for (int c = 0; c < cfg.count; ++c) {
        // Direction uniform on the sphere of R^{2n} via normalized Gaussians,
        // radius with the ball-volume exponent.
        std::vector<Complex> z(n);
        double norm2 = 0.0;
        for (int k = 0; k < n; ++k) {
            double u1 = rng.next_unit(), u2 = rng.next_unit();
            u1 = u1 <= 0.0 ? 1e-300 : u1;
            double r = std::sqrt(-2.0 * std::log(u1));
            z[k] = Complex(r * std::cos(two_pi * u2), r * std::sin(two_pi * u2));
            norm2 += std::norm(z[k]);
        }
        double radius = cfg.z_radius * std::pow(rng.next_unit(), 1.0 / (2.0 * n));
        double scale = norm2 > 0.0 ? radius / std::sqrt(norm2) : 0.0;
        for (int k = 0; k < n; ++k) z[k] *= scale;

        std::vector<Complex> eta(n);
        for (int k = 0; k < n; ++k) {
            double rho = rng.next_range(cfg.eta_floor, 1.0);
            double phi = rng.next_range(0.0, two_pi);
            eta[k] = Complex(rho * std::cos(phi), rho * std::sin(phi));
        }
        pts.emplace_back(std::move(z), std::move(eta));
    }
    return pts;
}

Complex fd_wirtinger(Expr e, Var v, const EvalPoint& p, double h) {
    if (h <= 0.0) throw std::invalid_argument("fd_wirtinger: step must be positive");
    ExprEvaluator ev;
    int i = v.index - 1;
    bool is_eta = v.kind == VarKind::Eta || v.kind == VarKind::EtaBar;
    bool barred = v.kind == VarKind::ZBar || v.kind == VarKind::EtaBar;

    auto feval = [&](Complex delta) {
        EvalPoint q = p;
        (is_eta ? q.eta[i] : q.z[i]) += delta;
        ev.set_point(q);
        return ev.value(e);
    };

    Complex dre = (feval(Complex(h, 0.0)) - feval(Complex(-h, 0.0))) / (2.0 * h);
    Complex dim = (feval(Complex(0.0, h)) - feval(Complex(0.0, -h))) / (2.0 * h);
    const Complex iu(0.0, 1.0);
    return barred ? 0.5 * (dre + iu * dim) : 0.5 * (dre - iu * dim);
}

}  // namespace cfin
