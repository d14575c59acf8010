#ifndef CFIN_FIELD_HPP
#define CFIN_FIELD_HPP

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "cfin/eval.hpp"
#include "cfin/expr.hpp"

namespace cfin {

/// Symbolic fundamental tensor g_{i jbar} of one metric, referenced by the
/// inverse-metric leaves below. The inverse itself is never formed
/// symbolically; it is inverted numerically per point.
class MetricHessian {
public:
    MetricHessian(int n, std::vector<ExprId> entries, ExprId L);

    int n() const { return n_; }
    uint32_t id() const { return id_; }
    ExprId L() const { return L_; }
    /// g_{i jbar}, 1-based indices.
    ExprId entry(int i, int j) const { return g_[size_t(i - 1) * n_ + (j - 1)]; }

private:
    int n_;
    uint32_t id_;
    std::vector<ExprId> g_;
    ExprId L_;
};

using HessianPtr = std::shared_ptr<const MetricHessian>;

/// One inverse-metric entry g^{abar b} (row = barred index), to be read off
/// the numeric inverse of h at the evaluation point.
struct InvRef {
    HessianPtr h;
    uint8_t a, b;  // 1-based

    friend bool operator<(const InvRef& x, const InvRef& y) {
        if (x.h->id() != y.h->id()) return x.h->id() < y.h->id();
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    }
    friend bool operator==(const InvRef& x, const InvRef& y) {
        return x.h->id() == y.h->id() && x.a == y.a && x.b == y.b;
    }
};

/// coeff * product of inverse-metric entries; invs kept sorted.
struct FieldTerm {
    ExprId coeff;
    std::vector<InvRef> invs;
};

/// A point-evaluator: a polynomial in inverse-metric entries with Expr
/// coefficients, the closure of {Expr, g^{-1}} under +, *, conjugation and
/// Wirtinger derivatives (the inverse differentiates through
/// d(g^-1) = -g^-1 (dg) g^-1, keeping all derivatives exact).
class Field {
public:
    Field() = default;  // zero

    static Field from_expr(Expr e);
    static Field inverse_entry(HessianPtr h, int a, int b);

    bool is_zero() const { return terms_.empty(); }
    const std::vector<FieldTerm>& terms() const { return terms_; }

    Field operator+(const Field& o) const;
    Field operator-(const Field& o) const;
    Field operator-() const;
    Field operator*(const Field& o) const;
    Field operator*(Expr s) const;
    Field operator/(Expr s) const;

    Field& operator+=(const Field& o) { return *this = *this + o; }
    Field& operator-=(const Field& o) { return *this = *this - o; }

    Field derivative(Var v) const;
    Field conjugate() const;

    /// True when no term references an inverse-metric entry.
    bool is_pure_expr() const;
    /// The Expr content of a pure-expr field (zero field gives 0).
    Expr as_expr() const;

private:
    static Field from_terms(std::vector<FieldTerm> terms);
    std::vector<FieldTerm> terms_;
};

inline Field operator*(Expr s, const Field& f) { return f * s; }
inline Field d(const Field& f, Var v) { return f.derivative(v); }
inline Field d(const Field& f, VarKind k, int index) { return f.derivative({k, index}); }
inline Field conj(const Field& f) { return f.conjugate(); }

class NotPositiveDefiniteError : public std::runtime_error {
public:
    NotPositiveDefiniteError(double min_eigenvalue, const std::string& what)
        : std::runtime_error(what), min_eigenvalue(min_eigenvalue) {}
    double min_eigenvalue;
};

/// Per-point evaluation bundle: an expression evaluator plus the numeric
/// inverse of every metric Hessian touched at the current point. Confine one
/// context to one task; contexts over the same immutable fields are
/// independent.
class EvalContext {
public:
    void set_point(const EvalPoint& p);
    const EvalPoint& point() const { return ev_.point(); }

    Complex value(Expr e) { return ev_.value(e); }
    Complex value(ExprId e) { return ev_.value(e); }
    Complex value(const Field& f);

    /// g(p) as a dense matrix (row i, column jbar).
    Eigen::MatrixXcd metric_matrix(const MetricHessian& h);
    /// Numeric inverse; throws NotPositiveDefiniteError when the Hermitian
    /// eigenvalues dip below pd_tolerance * trace.
    const Eigen::MatrixXcd& inverse(const MetricHessian& h);
    /// Smallest eigenvalue of the Hermitian part of g(p) (diagnostic).
    double min_eigenvalue(const MetricHessian& h);

    double pd_tolerance = 1e-12;

private:
    ExprEvaluator ev_;
    std::map<uint32_t, Eigen::MatrixXcd> inverses_;
};

enum class Variance : uint8_t { Up, Down };
enum class BarType : uint8_t { Plain, Barred };

struct Slot {
    Variance variance;
    BarType bar;
    bool operator==(const Slot&) const = default;
};

/// Dense multi-index array of point-evaluators with an index signature.
/// Indices are 1-based, matching the classical notation.
class FieldTensor {
public:
    FieldTensor() = default;
    FieldTensor(int n, std::vector<Slot> slots);

    int n() const { return n_; }
    int rank() const { return int(slots_.size()); }
    const std::vector<Slot>& slots() const { return slots_; }

    Field& at(std::span<const int> idx);
    const Field& at(std::span<const int> idx) const;
    Field& at(std::initializer_list<int> idx) { return at(std::span<const int>(idx.begin(), idx.size())); }
    const Field& at(std::initializer_list<int> idx) const {
        return at(std::span<const int>(idx.begin(), idx.size()));
    }

    const std::vector<Field>& entries() const { return e_; }
    std::vector<Field>& entries() { return e_; }

    /// Entrywise Wirtinger derivative (signature is the caller's business).
    FieldTensor derivative(Var v) const;
    /// Conjugate tensor: every bar flag flips, entries conjugate.
    FieldTensor conjugate() const;

    /// Contract an up slot against a down slot of the same bar type.
    FieldTensor trace(int slot_up, int slot_down) const;
    /// Contract one slot with eta (plain slots) or etabar (barred slots).
    FieldTensor contract_eta(int slot) const;

    /// Max |entry| at the context's point.
    double max_abs(EvalContext& ctx) const;

private:
    size_t flat(std::span<const int> idx) const;
    int n_ = 0;
    std::vector<Slot> slots_;
    std::vector<Field> e_;
};

}  // namespace cfin

#endif
