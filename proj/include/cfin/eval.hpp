#ifndef CFIN_EVAL_HPP
#define CFIN_EVAL_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "cfin/expr.hpp"

namespace cfin {

/// A concrete (z, eta) in C^n x (C^n \ {0}). Barred variables evaluate to
/// the conjugates of the stored components.
struct EvalPoint {
    std::vector<Complex> z;
    std::vector<Complex> eta;

    EvalPoint() = default;
    EvalPoint(std::vector<Complex> z_, std::vector<Complex> eta_);
    int n() const { return int(z.size()); }
};

/// Evaluation hit a singular operation (division by zero, log 0, ...).
/// Carries the offending subtree.
class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& what, ExprId offending)
        : std::runtime_error(what), offending(offending) {}
    ExprId offending;
};

/// Evaluates interned expressions at one point at a time. Values of shared
/// subtrees are memoized per point (stamp-validated dense cache), so a tensor
/// of expressions with common subexpressions evaluates each subtree once.
/// One evaluator per task; not for concurrent use by several threads.
class ExprEvaluator {
public:
    ExprEvaluator() = default;

    void set_point(const EvalPoint& p);
    const EvalPoint& point() const { return pt_; }

    Complex value(ExprId e);
    Complex value(Expr e) { return value(e.id()); }

private:
    EvalPoint pt_;
    uint64_t stamp_ = 0;
    std::vector<uint64_t> seen_;
    std::vector<Complex> memo_;
};

/// Deterministic splitmix64 stream; identical across platforms and runs.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}
    uint64_t next_u64();
    double next_unit();                       // [0, 1)
    double next_range(double lo, double hi);  // [lo, hi)

private:
    uint64_t state_;
};

struct SamplingConfig {
    int count = 32;
    uint64_t seed = 1;
    double z_radius = 0.7;   // bound on the Euclidean norm of z
    double eta_floor = 0.05; // per-component lower bound on |eta^k|
};

/// Sampled points: z uniform in the Euclidean ball of the given radius
/// (norm bound keeps e.g. ball metrics well defined for n >= 2), eta with
/// per-component modulus in [eta_floor, 1] and uniform phases.
std::vector<EvalPoint> sample_points(int n, const SamplingConfig& cfg);

/// Central-difference Wirtinger derivative with the conjugate variable
/// co-varied (zbar stays conj(z) throughout the stencil):
///   d/dz   f = ((f(z+h)-f(z-h)) - i (f(z+ih)-f(z-ih))) / (4h)
///   d/dzbar f = ((f(z+h)-f(z-h)) + i (f(z+ih)-f(z-ih))) / (4h)
/// and the same for eta. Independent of the symbolic differentiation path.
Complex fd_wirtinger(Expr e, Var v, const EvalPoint& p, double h);

}  // namespace cfin

#endif
