#ifndef CFIN_SPRAY_HPP
#define CFIN_SPRAY_HPP

#include <map>
#include <mutex>

#include "cfin/connections.hpp"

namespace cfin {

/// The projective-geometry substrate: spray coefficients G^i and the
/// geodesic defect theta^{*i}, with memoized vertical jets. Real metrics
/// provide one through their connection bundle; synthetic projective
/// changes produce modified copies (G + P eta, theta + Q eta). Everything
/// Douglas/Weyl is assembled from this data alone.
class SprayData {
public:
    SprayData(int n, std::vector<Field> spray, std::vector<Field> theta);
    static SprayData of_metric(const ConnectionBundle& conn);

    int n() const { return n_; }
    const Field& spray(int i) const { return spray_[i - 1]; }
    const Field& theta(int i) const { return theta_[i - 1]; }

    /// Mixed vertical jet of G^i by the given variables (eta/etabar kinds
    /// only; order does not matter).
    Field spray_jet(int i, std::span<const Var> vars) const;
    Field theta_jet(int i, std::span<const Var> vars) const;

    /// sum_l of the jet of G^l by (vars + eta^l): the trace-jets
    /// G^l_{l...} that feed the Ricci tensors of Douglas type.
    Field spray_trace_jet(std::span<const Var> vars) const;
    /// sum_l theta^{*l}_{l ...}
    Field theta_trace_jet(std::span<const Var> vars) const;

    /// canonical nonlinear connection N^i_j = d G^i / d eta^j
    Field canonical_n(int i, int j) const;
    /// N^l_l
    Field trace_n() const;

    /// canonical-frame horizontal derivatives built from this spray
    Field delta_can(const Field& f, int k) const;
    Field delta_can_bar(const Field& f, int k) const;

private:
    Field jet(const std::vector<Field>& base, int which, int i, std::span<const Var> vars) const;

    int n_;
    std::vector<Field> spray_, theta_;
    mutable std::mutex mu_;
    mutable std::map<std::string, Field> jets_;
};

}  // namespace cfin

#endif
