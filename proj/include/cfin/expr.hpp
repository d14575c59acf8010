#ifndef CFIN_EXPR_HPP
#define CFIN_EXPR_HPP

#include <complex>
#include <cstdint>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace cfin {

using Complex = std::complex<double>;

/// Thrown when constant folding hits a singular literal (e.g. "1/0").
class ExprError : public std::runtime_error {
public:
    explicit ExprError(const std::string& what) : std::runtime_error(what) {}
};

/// The four independent Wirtinger symbols: z^k, zbar^k, eta^k, etabar^k.
/// Barred and unbarred variables are algebraically independent; the link
/// zbar = conj(z) is imposed only at evaluation time.
enum class VarKind : uint8_t { Z = 0, ZBar = 1, Eta = 2, EtaBar = 3 };

/// Bitmask bits used to track which variable kinds occur in a subtree.
inline uint8_t var_kind_bit(VarKind k) { return uint8_t(1u << uint8_t(k)); }

struct Var {
    VarKind kind;
    int index;  // 1-based, 1..n

    bool operator==(const Var&) const = default;
};

Var conj_var(Var v);

enum class NodeKind : uint8_t {
    Constant,
    Variable,
    Sum,       // n-ary
    Product,   // n-ary
    Quotient,  // binary
    IntPow,    // integer exponent
    RealPow,   // real exponent (principal branch)
    Exp,
    Log,
    Neg,  // only transient: smart constructors rewrite it as (-1)*x
};

using ExprId = uint32_t;
inline constexpr ExprId kInvalidExpr = ~ExprId(0);

/// Hash-consed store of immutable expression trees. Structurally identical
/// subtrees share one id, so id equality is structural equality. All
/// construction goes through the smart constructors below, which run the
/// conservative simplifier (constant folding, 0/1 identities, flattening,
/// like-term and like-factor collection with deterministic child ordering).
///
/// The pool is a process-wide singleton guarded by a mutex; ids are stable
/// for the lifetime of the process and safe to share across threads.
class ExprPool {
public:
    struct Node {
        NodeKind kind;
        VarKind vkind;        // Variable
        int16_t vindex;       // Variable
        int32_t ipow;         // IntPow
        double rpow;          // RealPow
        Complex cval;         // Constant
        uint32_t child_begin; // into children_
        uint32_t child_count;
        uint8_t varmask;      // union of VarKind bits in the subtree
    };

    static ExprPool& instance();

    ExprId constant(Complex c);
    ExprId variable(VarKind k, int index);
    ExprId sum(std::span<const ExprId> kids);
    ExprId product(std::span<const ExprId> kids);
    ExprId quotient(ExprId num, ExprId den);
    ExprId int_pow(ExprId base, int32_t exponent);
    ExprId real_pow(ExprId base, double exponent);
    ExprId exp_of(ExprId a);
    ExprId log_of(ExprId a);
    ExprId negate(ExprId a);

    /// Exact symbolic Wirtinger derivative; memoized per (expr, var).
    ExprId derivative(ExprId e, Var v);
    /// Swaps Z<->ZBar, Eta<->EtaBar and conjugates constants. Involution.
    ExprId conjugate(ExprId e);

    const Node& node(ExprId id) const { return nodes_[id]; }
    std::span<const ExprId> children(ExprId id) const {
        const Node& nd = nodes_[id];
        return {children_.data() + nd.child_begin, nd.child_count};
    }
    size_t size() const;

    ExprId zero() const { return zero_; }
    ExprId one() const { return one_; }

private:
    ExprPool();
    ExprId intern(Node nd, std::span<const ExprId> kids);
    ExprId make_term(Complex coeff, ExprId rest);
    ExprId derivative_uncached(ExprId e, Var v);

    mutable std::mutex mu_;
    std::vector<Node> nodes_;
    std::vector<ExprId> children_;
    std::unordered_map<std::string, ExprId> intern_;
    std::unordered_map<uint64_t, ExprId> deriv_cache_;
    std::unordered_map<ExprId, ExprId> conj_cache_;
    ExprId zero_ = 0, one_ = 0;
};

/// Thin value wrapper over an ExprId with arithmetic operators, so formulas
/// read like formulas. Id equality is structural equality.
class Expr {
public:
    Expr() : id_(kInvalidExpr) {}
    explicit Expr(ExprId id) : id_(id) {}

    static Expr constant(Complex c) { return Expr(ExprPool::instance().constant(c)); }
    static Expr constant(double x) { return constant(Complex(x, 0.0)); }
    static Expr variable(Var v) { return Expr(ExprPool::instance().variable(v.kind, v.index)); }
    static Expr z(int k) { return variable({VarKind::Z, k}); }
    static Expr zbar(int k) { return variable({VarKind::ZBar, k}); }
    static Expr eta(int k) { return variable({VarKind::Eta, k}); }
    static Expr etabar(int k) { return variable({VarKind::EtaBar, k}); }
    static Expr zero() { return Expr(ExprPool::instance().zero()); }
    static Expr one() { return Expr(ExprPool::instance().one()); }

    ExprId id() const { return id_; }
    bool valid() const { return id_ != kInvalidExpr; }
    bool is_zero() const { return id_ == ExprPool::instance().zero(); }

    /// True when the subtree uses only the given variable kinds.
    bool uses_only(uint8_t kindmask) const {
        return (ExprPool::instance().node(id_).varmask & ~kindmask) == 0;
    }

    bool operator==(const Expr& o) const { return id_ == o.id_; }

private:
    ExprId id_;
};

inline Expr operator+(Expr a, Expr b) {
    ExprId kids[2] = {a.id(), b.id()};
    return Expr(ExprPool::instance().sum(kids));
}
inline Expr operator-(Expr a) { return Expr(ExprPool::instance().negate(a.id())); }
inline Expr operator-(Expr a, Expr b) { return a + (-b); }
inline Expr operator*(Expr a, Expr b) {
    ExprId kids[2] = {a.id(), b.id()};
    return Expr(ExprPool::instance().product(kids));
}
inline Expr operator/(Expr a, Expr b) { return Expr(ExprPool::instance().quotient(a.id(), b.id())); }
inline Expr operator*(Complex c, Expr a) { return Expr::constant(c) * a; }
inline Expr operator*(double c, Expr a) { return Expr::constant(c) * a; }

inline Expr pow(Expr a, int k) { return Expr(ExprPool::instance().int_pow(a.id(), k)); }
inline Expr pow(Expr a, double r) { return Expr(ExprPool::instance().real_pow(a.id(), r)); }
inline Expr exp(Expr a) { return Expr(ExprPool::instance().exp_of(a.id())); }
inline Expr log(Expr a) { return Expr(ExprPool::instance().log_of(a.id())); }
inline Expr sqrt(Expr a) { return pow(a, 0.5); }
inline Expr conj(Expr a) { return Expr(ExprPool::instance().conjugate(a.id())); }

/// d e / d v, exact and simplified.
inline Expr d(Expr e, Var v) { return Expr(ExprPool::instance().derivative(e.id(), v)); }
inline Expr d(Expr e, VarKind k, int index) { return d(e, Var{k, index}); }

/// Sum of a list of expressions (empty list gives 0).
Expr sum_of(std::span<const Expr> terms);

/// Rebuilds the expression bottom-up through the smart constructors. Since
/// every interned expression is already in simplified form this is the
/// identity on ids; kept as the public simplify entry point.
Expr simplify(Expr e);

}  // namespace cfin

#endif
