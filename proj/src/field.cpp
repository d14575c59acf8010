#include "cfin/field.hpp"

#include <algorithm>
#include <atomic>

namespace cfin {

namespace {
std::atomic<uint32_t> g_hessian_counter{1};
}

MetricHessian::MetricHessian(int n, std::vector<ExprId> entries, ExprId L)
    : n_(n), id_(g_hessian_counter.fetch_add(1)), g_(std::move(entries)), L_(L) {
    if (int(g_.size()) != n * n) throw std::invalid_argument("MetricHessian: wrong entry count");
}

Field Field::from_expr(Expr e) {
    Field f;
    if (!e.is_zero()) f.terms_.push_back({e.id(), {}});
    return f;
}

Field Field::inverse_entry(HessianPtr h, int a, int b) {
    Field f;
    f.terms_.push_back({ExprPool::instance().one(), {InvRef{std::move(h), uint8_t(a), uint8_t(b)}}});
    return f;
}

// Canonical form: invs sorted within each term, terms sorted by their invs
// key, coefficients of equal keys folded through the expression pool.
Field Field::from_terms(std::vector<FieldTerm> terms) {
    ExprPool& pool = ExprPool::instance();
    for (auto& t : terms) std::sort(t.invs.begin(), t.invs.end());
    std::sort(terms.begin(), terms.end(), [](const FieldTerm& x, const FieldTerm& y) {
        return std::lexicographical_compare(x.invs.begin(), x.invs.end(), y.invs.begin(), y.invs.end());
    });
    Field out;
    size_t i = 0;
    while (i < terms.size()) {
        size_t j = i;
        std::vector<ExprId> coeffs;
        while (j < terms.size() && terms[j].invs == terms[i].invs) {
            coeffs.push_back(terms[j].coeff);
            ++j;
        }
        ExprId c = coeffs.size() == 1 ? coeffs[0] : pool.sum(coeffs);
        if (c != pool.zero()) out.terms_.push_back({c, std::move(terms[i].invs)});
        i = j;
    }
    return out;
}

Field Field::operator+(const Field& o) const {
    std::vector<FieldTerm> all = terms_;
    all.insert(all.end(), o.terms_.begin(), o.terms_.end());
    return from_terms(std::move(all));
}

Field Field::operator-() const {
    ExprPool& pool = ExprPool::instance();
    Field out = *this;
    for (auto& t : out.terms_) t.coeff = pool.negate(t.coeff);
    return out;
}

Field Field::operator-(const Field& o) const { return *this + (-o); }

Field Field::operator*(const Field& o) const {
    ExprPool& pool = ExprPool::instance();
    std::vector<FieldTerm> all;
    all.reserve(terms_.size() * o.terms_.size());
    for (const auto& x : terms_) {
        for (const auto& y : o.terms_) {
            ExprId kids[2] = {x.coeff, y.coeff};
            FieldTerm t;
            t.coeff = pool.product(kids);
            t.invs = x.invs;
            t.invs.insert(t.invs.end(), y.invs.begin(), y.invs.end());
            all.push_back(std::move(t));
        }
    }
    return from_terms(std::move(all));
}

Field Field::operator*(Expr s) const {
    ExprPool& pool = ExprPool::instance();
    std::vector<FieldTerm> all = terms_;
    for (auto& t : all) {
        ExprId kids[2] = {t.coeff, s.id()};
        t.coeff = pool.product(kids);
    }
    return from_terms(std::move(all));
}

Field Field::operator/(Expr s) const {
    ExprPool& pool = ExprPool::instance();
    std::vector<FieldTerm> all = terms_;
    for (auto& t : all) t.coeff = pool.quotient(t.coeff, s.id());
    return from_terms(std::move(all));
}

Field Field::derivative(Var v) const {
    ExprPool& pool = ExprPool::instance();
    std::vector<FieldTerm> out;
    for (const auto& t : terms_) {
        // product rule over the coefficient ...
        ExprId dc = pool.derivative(t.coeff, v);
        if (dc != pool.zero()) out.push_back({dc, t.invs});
        // ... and over each inverse factor: d g^{abar b} =
        //   - sum_{p,q} g^{abar p} (d g_{p qbar}) g^{qbar b}
        for (size_t k = 0; k < t.invs.size(); ++k) {
            const InvRef& iv = t.invs[k];
            int n = iv.h->n();
            std::vector<InvRef> rest;
            rest.reserve(t.invs.size() + 1);
            for (size_t m = 0; m < t.invs.size(); ++m) {
                if (m != k) rest.push_back(t.invs[m]);
            }
            for (int p = 1; p <= n; ++p) {
                for (int q = 1; q <= n; ++q) {
                    ExprId dg = pool.derivative(iv.h->entry(p, q), v);
                    if (dg == pool.zero()) continue;
                    ExprId kids[2] = {pool.negate(dg), t.coeff};
                    FieldTerm nt;
                    nt.coeff = pool.product(kids);
                    nt.invs = rest;
                    nt.invs.push_back({iv.h, iv.a, uint8_t(p)});
                    nt.invs.push_back({iv.h, uint8_t(q), iv.b});
                    out.push_back(std::move(nt));
                }
            }
        }
    }
    return from_terms(std::move(out));
}

Field Field::conjugate() const {
    ExprPool& pool = ExprPool::instance();
    std::vector<FieldTerm> out = terms_;
    for (auto& t : out) {
        t.coeff = pool.conjugate(t.coeff);
        // the inverse matrix is Hermitian: conj(g^{abar b}) = g^{bbar a}
        for (auto& iv : t.invs) std::swap(iv.a, iv.b);
    }
    return from_terms(std::move(out));
}

bool Field::is_pure_expr() const {
    for (const auto& t : terms_) {
        if (!t.invs.empty()) return false;
    }
    return true;
}

Expr Field::as_expr() const {
    ExprPool& pool = ExprPool::instance();
    std::vector<ExprId> parts;
    for (const auto& t : terms_) {
        if (!t.invs.empty()) throw std::logic_error("Field::as_expr: field references the metric inverse");
        parts.push_back(t.coeff);
    }
    return Expr(pool.sum(parts));
}

void EvalContext::set_point(const EvalPoint& p) {
    ev_.set_point(p);
    inverses_.clear();
}

Eigen::MatrixXcd EvalContext::metric_matrix(const MetricHessian& h) {
    int n = h.n();
    Eigen::MatrixXcd g(n, n);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) g(i - 1, j - 1) = ev_.value(h.entry(i, j));
    }
    return g;
}

double EvalContext::min_eigenvalue(const MetricHessian& h) {
    Eigen::MatrixXcd g = metric_matrix(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    return es.eigenvalues().minCoeff();
}

const Eigen::MatrixXcd& EvalContext::inverse(const MetricHessian& h) {
    auto it = inverses_.find(h.id());
    if (it != inverses_.end()) return it->second;

    Eigen::MatrixXcd g = metric_matrix(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    double min_eig = es.eigenvalues().minCoeff();
    double trace = std::abs(g.trace());
    if (!(min_eig > pd_tolerance * trace)) {
        throw NotPositiveDefiniteError(
            min_eig, "metric tensor is not positive definite (min eigenvalue " +
                         std::to_string(min_eig) + ")");
    }
    Eigen::MatrixXcd inv = es.eigenvectors() *
                           es.eigenvalues().cwiseInverse().asDiagonal() *
                           es.eigenvectors().adjoint();
    return inverses_.emplace(h.id(), std::move(inv)).first->second;
}

Complex EvalContext::value(const Field& f) {
    Complex acc(0.0, 0.0);
    for (const auto& t : f.terms()) {
        Complex v = ev_.value(t.coeff);
        for (const auto& iv : t.invs) {
            const Eigen::MatrixXcd& m = inverse(*iv.h);
            v *= m(iv.a - 1, iv.b - 1);
        }
        acc += v;
    }
    return acc;
}

FieldTensor::FieldTensor(int n, std::vector<Slot> slots) : n_(n), slots_(std::move(slots)) {
    size_t count = 1;
    for (size_t r = 0; r < slots_.size(); ++r) count *= size_t(n);
    e_.resize(count);
}

size_t FieldTensor::flat(std::span<const int> idx) const {
    if (idx.size() != slots_.size()) throw std::logic_error("FieldTensor: rank mismatch");
    size_t f = 0;
    for (size_t k = 0; k < idx.size(); ++k) f = f * n_ + size_t(idx[k] - 1);
    return f;
}

Field& FieldTensor::at(std::span<const int> idx) { return e_[flat(idx)]; }
const Field& FieldTensor::at(std::span<const int> idx) const { return e_[flat(idx)]; }

FieldTensor FieldTensor::derivative(Var v) const {
    FieldTensor out(n_, slots_);
    for (size_t k = 0; k < e_.size(); ++k) out.e_[k] = e_[k].derivative(v);
    return out;
}

FieldTensor FieldTensor::conjugate() const {
    std::vector<Slot> slots = slots_;
    for (auto& s : slots) s.bar = s.bar == BarType::Plain ? BarType::Barred : BarType::Plain;
    FieldTensor out(n_, std::move(slots));
    for (size_t k = 0; k < e_.size(); ++k) out.e_[k] = e_[k].conjugate();
    return out;
}

FieldTensor FieldTensor::trace(int slot_up, int slot_down) const {
    const Slot& up = slots_[slot_up];
    const Slot& down = slots_[slot_down];
    if (up.variance != Variance::Up || down.variance != Variance::Down || up.bar != down.bar) {
        throw std::logic_error("FieldTensor::trace: contraction needs an up/down pair of equal bar type");
    }
    std::vector<Slot> slots;
    for (int s = 0; s < rank(); ++s) {
        if (s != slot_up && s != slot_down) slots.push_back(slots_[s]);
    }
    FieldTensor out(n_, slots);
    std::vector<int> oidx(slots.size(), 1), idx(slots_.size(), 1);
    size_t total = out.e_.size();
    for (size_t f = 0; f < total; ++f) {
        size_t rem = f;
        for (int s = int(slots.size()) - 1; s >= 0; --s) {
            oidx[s] = int(rem % n_) + 1;
            rem /= n_;
        }
        Field acc;
        for (int c = 1; c <= n_; ++c) {
            int pos = 0;
            for (int s = 0; s < rank(); ++s) {
                if (s == slot_up || s == slot_down) {
                    idx[s] = c;
                } else {
                    idx[s] = oidx[pos++];
                }
            }
            acc += at(idx);
        }
        out.e_[f] = acc;
    }
    return out;
}

FieldTensor FieldTensor::contract_eta(int slot) const {
    bool barred = slots_[slot].bar == BarType::Barred;
    std::vector<Slot> slots;
    for (int s = 0; s < rank(); ++s) {
        if (s != slot) slots.push_back(slots_[s]);
    }
    FieldTensor out(n_, slots);
    std::vector<int> oidx(slots.size(), 1), idx(slots_.size(), 1);
    for (size_t f = 0; f < out.e_.size(); ++f) {
        size_t rem = f;
        for (int s = int(slots.size()) - 1; s >= 0; --s) {
            oidx[s] = int(rem % n_) + 1;
            rem /= n_;
        }
        Field acc;
        for (int c = 1; c <= n_; ++c) {
            int pos = 0;
            for (int s = 0; s < rank(); ++s) idx[s] = (s == slot) ? c : oidx[pos++];
            Expr w = barred ? Expr::etabar(c) : Expr::eta(c);
            acc += at(idx) * w;
        }
        out.e_[f] = acc;
    }
    return out;
}

double FieldTensor::max_abs(EvalContext& ctx) const {
    double m = 0.0;
    for (const Field& f : e_) m = std::max(m, std::abs(ctx.value(f)));
    return m;
}

}  // namespace cfin
