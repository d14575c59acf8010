#include "cfin/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>

namespace cfin {

Var conj_var(Var v) {
    switch (v.kind) {
        case VarKind::Z: return {VarKind::ZBar, v.index};
        case VarKind::ZBar: return {VarKind::Z, v.index};
        case VarKind::Eta: return {VarKind::EtaBar, v.index};
        case VarKind::EtaBar: return {VarKind::Eta, v.index};
    }
    return v;
}

namespace {

// -0.0 folds to 0.0 so that conjugation of real constants is handle-stable.
double canon(double x) { return x == 0.0 ? 0.0 : x; }
Complex canon(Complex c) { return Complex(canon(c.real()), canon(c.imag())); }

void put_bytes(std::string& s, const void* p, size_t k) {
    s.append(reinterpret_cast<const char*>(p), k);
}

Complex int_pow_value(Complex base, int32_t e) {
    if (e < 0) {
        if (base == Complex(0.0, 0.0)) throw ExprError("division by zero constant");
        return Complex(1.0, 0.0) / int_pow_value(base, -e);
    }
    Complex acc(1.0, 0.0), b = base;
    uint32_t k = uint32_t(e);
    while (k) {
        if (k & 1) acc *= b;
        b *= b;
        k >>= 1;
    }
    return acc;
}

}  // namespace

ExprPool& ExprPool::instance() {
    static ExprPool pool;
    return pool;
}

ExprPool::ExprPool() {
    zero_ = constant(Complex(0.0, 0.0));
    one_ = constant(Complex(1.0, 0.0));
}

size_t ExprPool::size() const {
    std::lock_guard<std::mutex> lk(mu_);
    return nodes_.size();
}

ExprId ExprPool::intern(Node nd, std::span<const ExprId> kids) {
    std::string key;
    key.reserve(32 + kids.size() * 4);
    key.push_back(char(nd.kind));
    switch (nd.kind) {
        case NodeKind::Constant: {
            Complex c = canon(nd.cval);
            nd.cval = c;
            double re = c.real(), im = c.imag();
            put_bytes(key, &re, sizeof re);
            put_bytes(key, &im, sizeof im);
            break;
        }
        case NodeKind::Variable:
            key.push_back(char(nd.vkind));
            put_bytes(key, &nd.vindex, sizeof nd.vindex);
            break;
        case NodeKind::IntPow:
            put_bytes(key, &nd.ipow, sizeof nd.ipow);
            break;
        case NodeKind::RealPow: {
            double r = canon(nd.rpow);
            nd.rpow = r;
            put_bytes(key, &r, sizeof r);
            break;
        }
        default:
            break;
    }
    for (ExprId k : kids) put_bytes(key, &k, sizeof k);

    std::lock_guard<std::mutex> lk(mu_);
    auto it = intern_.find(key);
    if (it != intern_.end()) return it->second;

    uint8_t mask = 0;
    if (nd.kind == NodeKind::Variable) mask = var_kind_bit(nd.vkind);
    for (ExprId k : kids) mask |= nodes_[k].varmask;
    nd.varmask = mask;
    nd.child_begin = uint32_t(children_.size());
    nd.child_count = uint32_t(kids.size());
    children_.insert(children_.end(), kids.begin(), kids.end());
    ExprId id = ExprId(nodes_.size());
    nodes_.push_back(nd);
    intern_.emplace(std::move(key), id);
    return id;
}

ExprId ExprPool::constant(Complex c) {
    Node nd{};
    nd.kind = NodeKind::Constant;
    nd.cval = c;
    return intern(nd, {});
}

ExprId ExprPool::variable(VarKind k, int index) {
    if (index < 1 || index > 32) throw ExprError("variable index out of range");
    Node nd{};
    nd.kind = NodeKind::Variable;
    nd.vkind = k;
    nd.vindex = int16_t(index);
    return intern(nd, {});
}

// coeff * rest with the convention that a coefficient of 1 disappears and a
// rest of 1 collapses to the constant.
ExprId ExprPool::make_term(Complex coeff, ExprId rest) {
    coeff = canon(coeff);
    if (coeff == Complex(0.0, 0.0)) return zero_;
    if (rest == one_) return constant(coeff);
    if (coeff == Complex(1.0, 0.0)) return rest;
    ExprId kids[2] = {constant(coeff), rest};
    return product(kids);
}

ExprId ExprPool::sum(std::span<const ExprId> kids) {
    // Flatten nested sums, fold constants, collect like terms by handle.
    Complex const_acc(0.0, 0.0);
    std::map<ExprId, Complex> terms;  // rest handle -> coefficient

    // Note: nodes_/children_ may reallocate during nested construction, so
    // node payloads and child lists are copied out before any building call.
    auto add_term = [&](ExprId t, Complex outer) {
        Node nd = nodes_[t];
        if (nd.kind == NodeKind::Constant) {
            const_acc += outer * nd.cval;
            return;
        }
        Complex coeff = outer;
        ExprId rest = t;
        if (nd.kind == NodeKind::Product && nd.child_count > 0 &&
            nodes_[children_[nd.child_begin]].kind == NodeKind::Constant) {
            coeff *= nodes_[children_[nd.child_begin]].cval;
            if (nd.child_count == 2) {
                rest = children_[nd.child_begin + 1];
            } else {
                std::vector<ExprId> rest_kids(children_.begin() + nd.child_begin + 1,
                                              children_.begin() + nd.child_begin + nd.child_count);
                rest = product(rest_kids);
            }
        }
        terms[rest] += coeff;
    };

    for (ExprId k : kids) {
        Node nd = nodes_[k];
        if (nd.kind == NodeKind::Sum) {
            std::vector<ExprId> sub(children_.begin() + nd.child_begin,
                                    children_.begin() + nd.child_begin + nd.child_count);
            for (ExprId s : sub) add_term(s, Complex(1.0, 0.0));
        } else {
            add_term(k, Complex(1.0, 0.0));
        }
    }

    std::vector<ExprId> out;
    const_acc = canon(const_acc);
    if (const_acc != Complex(0.0, 0.0)) out.push_back(constant(const_acc));
    for (auto& [rest, coeff] : terms) {
        ExprId t = make_term(coeff, rest);
        if (t != zero_) out.push_back(t);
    }
    if (out.empty()) return zero_;
    if (out.size() == 1) return out[0];
    // std::map already produced deterministic (id-sorted) term order; keep a
    // possible constant first.
    Node nd{};
    nd.kind = NodeKind::Sum;
    return intern(nd, out);
}

ExprId ExprPool::product(std::span<const ExprId> kids) {
    Complex const_acc(1.0, 0.0);
    std::map<ExprId, int64_t> factors;  // base handle -> integer exponent

    auto add_factor = [&](auto&& self, ExprId f) -> void {
        const Node& nd = nodes_[f];
        switch (nd.kind) {
            case NodeKind::Constant:
                const_acc *= nd.cval;
                return;
            case NodeKind::Product:
                for (uint32_t i = 0; i < nd.child_count; ++i) self(self, children_[nd.child_begin + i]);
                return;
            case NodeKind::IntPow:
                factors[children_[nd.child_begin]] += nd.ipow;
                return;
            default:
                factors[f] += 1;
                return;
        }
    };
    for (ExprId k : kids) add_factor(add_factor, k);

    const_acc = canon(const_acc);
    if (const_acc == Complex(0.0, 0.0)) return zero_;

    std::vector<ExprId> out;
    for (auto& [base, e] : factors) {
        if (e == 0) continue;
        out.push_back(int_pow(base, int32_t(e)));
    }
    if (out.empty()) return constant(const_acc);
    if (const_acc != Complex(1.0, 0.0)) out.insert(out.begin(), constant(const_acc));
    if (out.size() == 1) return out[0];
    Node nd{};
    nd.kind = NodeKind::Product;
    return intern(nd, out);
}

ExprId ExprPool::quotient(ExprId num, ExprId den) {
    Node nn = nodes_[num];
    Node dn = nodes_[den];
    if (dn.kind == NodeKind::Constant) {
        if (dn.cval == Complex(0.0, 0.0)) throw ExprError("division by zero constant");
        return make_term(Complex(1.0, 0.0) / dn.cval, num);
    }
    if (nn.kind == NodeKind::Constant && nn.cval == Complex(0.0, 0.0)) return zero_;
    Node nd{};
    nd.kind = NodeKind::Quotient;
    ExprId kids[2] = {num, den};
    return intern(nd, kids);
}

ExprId ExprPool::int_pow(ExprId base, int32_t exponent) {
    if (exponent == 0) return one_;
    if (exponent == 1) return base;
    Node bn = nodes_[base];
    if (bn.kind == NodeKind::Constant) return constant(int_pow_value(bn.cval, exponent));
    if (bn.kind == NodeKind::IntPow) {
        return int_pow(children_[bn.child_begin], bn.ipow * exponent);
    }
    Node nd{};
    nd.kind = NodeKind::IntPow;
    nd.ipow = exponent;
    ExprId kids[1] = {base};
    return intern(nd, kids);
}

ExprId ExprPool::real_pow(ExprId base, double exponent) {
    if (exponent == 0.0) return one_;
    if (exponent == 1.0) return base;
    if (exponent == std::floor(exponent) && std::abs(exponent) <= 16.0) {
        return int_pow(base, int32_t(exponent));
    }
    Node bn = nodes_[base];
    if (bn.kind == NodeKind::Constant) {
        if (bn.cval == Complex(0.0, 0.0) && exponent < 0.0) throw ExprError("division by zero constant");
        return constant(std::pow(bn.cval, exponent));
    }
    Node nd{};
    nd.kind = NodeKind::RealPow;
    nd.rpow = exponent;
    ExprId kids[1] = {base};
    return intern(nd, kids);
}

ExprId ExprPool::exp_of(ExprId a) {
    Node an = nodes_[a];
    if (an.kind == NodeKind::Constant) return constant(std::exp(an.cval));
    Node nd{};
    nd.kind = NodeKind::Exp;
    ExprId kids[1] = {a};
    return intern(nd, kids);
}

ExprId ExprPool::log_of(ExprId a) {
    Node an = nodes_[a];
    if (an.kind == NodeKind::Constant) {
        if (an.cval == Complex(0.0, 0.0)) throw ExprError("log of zero constant");
        return constant(std::log(an.cval));
    }
    Node nd{};
    nd.kind = NodeKind::Log;
    ExprId kids[1] = {a};
    return intern(nd, kids);
}

ExprId ExprPool::negate(ExprId a) { return make_term(Complex(-1.0, 0.0), a); }

ExprId ExprPool::derivative(ExprId e, Var v) {
    uint64_t key = (uint64_t(e) << 8) | (uint64_t(uint8_t(v.kind)) << 6) | uint64_t(v.index & 0x3f);
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = deriv_cache_.find(key);
        if (it != deriv_cache_.end()) return it->second;
    }
    ExprId r = derivative_uncached(e, v);
    std::lock_guard<std::mutex> lk(mu_);
    deriv_cache_.emplace(key, r);
    return r;
}

ExprId ExprPool::derivative_uncached(ExprId e, Var v) {
    Node nd;
    {
        std::lock_guard<std::mutex> lk(mu_);
        nd = nodes_[e];
    }
    // Subtrees not mentioning the variable kind at all differentiate to zero.
    if ((nd.varmask & var_kind_bit(v.kind)) == 0) return zero_;

    switch (nd.kind) {
        case NodeKind::Constant:
            return zero_;
        case NodeKind::Variable:
            return (nd.vkind == v.kind && nd.vindex == v.index) ? one_ : zero_;
        case NodeKind::Sum: {
            std::vector<ExprId> kids(children_.begin() + nd.child_begin,
                                     children_.begin() + nd.child_begin + nd.child_count);
            std::vector<ExprId> dk;
            dk.reserve(kids.size());
            for (ExprId k : kids) dk.push_back(derivative(k, v));
            return sum(dk);
        }
        case NodeKind::Product: {
            std::vector<ExprId> kids(children_.begin() + nd.child_begin,
                                     children_.begin() + nd.child_begin + nd.child_count);
            std::vector<ExprId> terms;
            for (size_t i = 0; i < kids.size(); ++i) {
                ExprId di = derivative(kids[i], v);
                if (di == zero_) continue;
                std::vector<ExprId> fac = kids;
                fac[i] = di;
                terms.push_back(product(fac));
            }
            return sum(terms);
        }
        case NodeKind::Quotient: {
            ExprId a = children_[nd.child_begin], b = children_[nd.child_begin + 1];
            // When the denominator is c^k keep derivatives on the same power
            // ladder: d(a/c^k) = a'/c^k - k a c' / c^(k+1).
            ExprId c = b;
            int32_t k = 1;
            Node bn = nodes_[b];
            if (bn.kind == NodeKind::IntPow) {
                c = children_[bn.child_begin];
                k = bn.ipow;
            }
            ExprId da = derivative(a, v);
            ExprId dc = derivative(c, v);
            std::vector<ExprId> terms;
            if (da != zero_) terms.push_back(quotient(da, b));
            if (dc != zero_) {
                ExprId numer[3] = {constant(Complex(-double(k), 0.0)), a, dc};
                terms.push_back(quotient(product(numer), int_pow(c, k + 1)));
            }
            return sum(terms);
        }
        case NodeKind::IntPow: {
            ExprId b = children_[nd.child_begin];
            ExprId db = derivative(b, v);
            if (db == zero_) return zero_;
            ExprId fac[3] = {constant(Complex(double(nd.ipow), 0.0)), int_pow(b, nd.ipow - 1), db};
            return product(fac);
        }
        case NodeKind::RealPow: {
            ExprId b = children_[nd.child_begin];
            ExprId db = derivative(b, v);
            if (db == zero_) return zero_;
            ExprId fac[3] = {constant(Complex(nd.rpow, 0.0)), real_pow(b, nd.rpow - 1.0), db};
            return product(fac);
        }
        case NodeKind::Exp: {
            ExprId b = children_[nd.child_begin];
            ExprId db = derivative(b, v);
            if (db == zero_) return zero_;
            ExprId fac[2] = {e, db};
            return product(fac);
        }
        case NodeKind::Log: {
            ExprId b = children_[nd.child_begin];
            ExprId db = derivative(b, v);
            if (db == zero_) return zero_;
            return quotient(db, b);
        }
        case NodeKind::Neg: {
            ExprId b = children_[nd.child_begin];
            return negate(derivative(b, v));
        }
    }
    throw ExprError("unreachable node kind in derivative");
}

ExprId ExprPool::conjugate(ExprId e) {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = conj_cache_.find(e);
        if (it != conj_cache_.end()) return it->second;
    }
    Node nd;
    {
        std::lock_guard<std::mutex> lk(mu_);
        nd = nodes_[e];
    }
    ExprId r;
    switch (nd.kind) {
        case NodeKind::Constant:
            r = constant(std::conj(nd.cval));
            break;
        case NodeKind::Variable: {
            Var cv = conj_var({nd.vkind, nd.vindex});
            r = variable(cv.kind, cv.index);
            break;
        }
        default: {
            std::vector<ExprId> kids(children_.begin() + nd.child_begin,
                                     children_.begin() + nd.child_begin + nd.child_count);
            for (ExprId& k : kids) k = conjugate(k);
            switch (nd.kind) {
                case NodeKind::Sum: r = sum(kids); break;
                case NodeKind::Product: r = product(kids); break;
                case NodeKind::Quotient: r = quotient(kids[0], kids[1]); break;
                case NodeKind::IntPow: r = int_pow(kids[0], nd.ipow); break;
                case NodeKind::RealPow: r = real_pow(kids[0], nd.rpow); break;
                case NodeKind::Exp: r = exp_of(kids[0]); break;
                case NodeKind::Log: r = log_of(kids[0]); break;
                case NodeKind::Neg: r = negate(kids[0]); break;
                default: throw ExprError("unreachable node kind in conjugate");
            }
        }
    }
    std::lock_guard<std::mutex> lk(mu_);
    conj_cache_.emplace(e, r);
    conj_cache_.emplace(r, e);
    return r;
}

Expr sum_of(std::span<const Expr> terms) {
    std::vector<ExprId> ids;
    ids.reserve(terms.size());
    for (Expr t : terms) ids.push_back(t.id());
    return Expr(ExprPool::instance().sum(ids));
}

Expr simplify(Expr e) {
    ExprPool& pool = ExprPool::instance();
    ExprPool::Node nd = pool.node(e.id());
    auto kid_span = pool.children(e.id());
    std::vector<ExprId> kids(kid_span.begin(), kid_span.end());
    std::vector<ExprId> sk;
    sk.reserve(kids.size());
    for (ExprId k : kids) sk.push_back(simplify(Expr(k)).id());
    switch (nd.kind) {
        case NodeKind::Constant:
        case NodeKind::Variable: return e;
        case NodeKind::Sum: return Expr(pool.sum(sk));
        case NodeKind::Product: return Expr(pool.product(sk));
        case NodeKind::Quotient: return Expr(pool.quotient(sk[0], sk[1]));
        case NodeKind::IntPow: return Expr(pool.int_pow(sk[0], nd.ipow));
        case NodeKind::RealPow: return Expr(pool.real_pow(sk[0], nd.rpow));
        case NodeKind::Exp: return Expr(pool.exp_of(sk[0]));
        case NodeKind::Log: return Expr(pool.log_of(sk[0]));
        case NodeKind::Neg: return Expr(pool.negate(sk[0]));
    }
    return e;
}

}  // namespace cfin
