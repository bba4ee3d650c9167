#pragma once

#include <random>

#include "drinfeld/module.hpp"

namespace drinfeld {

/// The fractional-ideal bounds entering the explicit formulas, as exact
/// rationals (q the base residue size, e = e(L|K), dD = mu(D(L|K))):
///   x_L1        = -1/(q-1) - 1/e - dD
///   x_n         = n m0 - max{n m0 / q, 1/(q-1)} + x_L1
///   alpha_bound = max{n m0 / q, 1/(q-1)} + 1/(q-1) + 1/e
struct Thresholds {
    RationalVal x_L1;
    RationalVal x_n;
    RationalVal alpha_bound;
    RationalVal gamma_val; ///< max{n m0/q, 1/(q-1)}
    static Thresholds compute(const TowerField& L, int n, std::uint32_t m0);
};

/// Evaluation context for the derivation Dbar_{L,v_n} on L = E^m: the chosen
/// uniformizer pi (default the module's level-m generator) together with the
/// known value Dbar(pi). For the normalized case and pi = v_m that value is
/// 1/eta^m; an arbitrary externally-known value can be injected instead.
/// Representing series are taken with respect to pi: when pi is not the
/// tower's series variable they are obtained by composing with the reverted
/// uniformizer series.
class DerivationContext {
  public:
    DerivationContext(ModulePtr mod, int m, int n);
    DerivationContext(ModulePtr mod, int m, int n, FieldElement pi, FieldElement dbar_pi);

    const ModulePtr& module() const { return mod_; }
    const TowerPtr& L() const { return L_; }
    int m() const { return m_; }
    int n() const { return n_; }
    const Thresholds& thresholds() const { return th_; }
    const FieldElement& pi() const { return *pi_; }
    const FieldElement& dbar_pi() const { return *dbar_; }

    /// The series g over the residue field with g(pi) = x.
    PrecSeries represent(const FieldElement& x) const;
    /// g(pi) for a residue-coefficient series g.
    FieldElement eval_repr(const PrecSeries& g) const;
    /// Dbar(x) = g'(pi) Dbar(pi) for integral x; a class mod x_n.
    FieldElement derivation(const FieldElement& x) const;
    /// dlog(beta) = Dbar(u)/u + k Dbar(pi)/pi for beta = u pi^k; a class mod
    /// x_n - 1/e.
    FieldElement dlog(const FieldElement& beta) const;
    /// (alpha, beta)_{L,n} = T_{L|K}(lambda(alpha) dlog(beta)) as a torsion
    /// class; requires mu(alpha) > alpha_bound.
    TorsionClass pairing(const FieldElement& alpha, const FieldElement& beta) const;

  private:
    void init();

    ModulePtr mod_;
    int m_, n_;
    TowerPtr L_;
    std::optional<FieldElement> pi_, dbar_;
    bool canonical_{false};
    PrecSeries inv_pi_series_ = PrecSeries::exact_zero(FqContext::get(2, 1));
    Thresholds th_;
};

/// chi_{L,m,n}(u) = (N_{L|K}(u^{-1}) - 1)/eta^m mod p^{n m0} for a unit u.
/// L must contain E^m as a sub-tower (E^m itself or an unramified extension).
ResidueClass chi_via_norm(const DrinfeldModule& mod, const TowerPtr& L, int m, int n,
                          const FieldElement& u);

/// chi through the trace formula
///   chi(u) = T_{L|K}( (1-u)/u (1 - g'(pi) pi / u) c ) mod p^{n m0},
/// with g the representing series of u and c defaulting to Dbar(pi).
ResidueClass chi_via_conguniq(const DerivationContext& ctx, const FieldElement& u,
                              std::optional<FieldElement> candidate = std::nullopt);

/// (v, beta)_{L,n} for a torsion point v = rho_a(v_m) and a unit beta,
/// through the character: the class a chi(beta) mod p^{n m0}.
TorsionClass pairing_via_chi(const ModulePtr& mod, const TowerPtr& L, int m, int n,
                             const TorsionClass& point, const FieldElement& beta);

// ------------------------------------------------------------- verification

struct CheckRecord {
    std::string check;
    std::string module;
    std::uint32_t q{0}, m0{0};
    int n{0}, m{0};
    std::uint64_t seed{0};
    int sample{0};
    std::string digest;
    std::string lhs, rhs;
    bool pass{false};
    std::int64_t prec_t{0};
};
std::string checkrecord_json(const CheckRecord& r);

struct Report {
    std::string suite;
    bool passed{true};
    std::vector<CheckRecord> records;
    void add(CheckRecord r) {
        passed = passed && r.pass;
        records.push_back(std::move(r));
    }
};

/// N_{L|K}(u^{-1}) - 1 == T_{L|K}((1-u)/u (1 - g'(v_m) v_m / u)) mod
/// p^{(n+m)m0} on random admissible units.
Report verify_corollary(const ModulePtr& mod, int n, int m, int samples, std::uint64_t seed);
/// (x, r(x)) = 0 and, for the twisted module, (x, x)' = 0.
Report verify_steinberg(const ModulePtr& mod, int n, int m, int samples, std::uint64_t seed);
/// Bilinearity, O_K-linearity, level compatibility and trace/norm
/// functoriality between E^m and E^{mp}.
Report verify_functoriality(const ModulePtr& mod, int n, int m, int mp, int samples,
                            std::uint64_t seed);
/// chi computed for rho and for its twist by r agree (norm route and both
/// trace-formula presentations).
Report verify_chi_twist(const ModulePtr& mod, const TwistedSeries& r, int n, int m, int samples,
                        std::uint64_t seed);
/// 1/eta^m satisfies the determining congruence; perturbations outside x_n
/// fail within the sample budget.
Report verify_uniqueness(const ModulePtr& mod, int n, int m, int max_samples, std::uint64_t seed);
/// Sharpness of the x_L1 trace-integrality bound within 1/e.
Report verify_thresholds(const ModulePtr& mod, int m, int samples, std::uint64_t seed);

// ------------------------------------------------------------- sampling

/// Random element with mu strictly above `bound`: a pi-power series with
/// random residue coefficients from the first admissible exponent up to the
/// working precision (leading coefficient forced nonzero).
FieldElement sample_above(const TowerPtr& L, const RationalVal& bound, std::mt19937_64& rng);
/// 1 + sample_above(bound): a unit u with mu(1-u) > bound.
FieldElement sample_unit(const TowerPtr& L, const RationalVal& bound, std::mt19937_64& rng);
std::string element_digest(const FieldElement& x);

/// Minimum t-precision a verifier at levels (n, m) needs: the comparison
/// modulus (n+m)m0, the eta^m division, and guard digits for the logarithm
/// coefficient chain.
std::int64_t required_prec_t(int n, int m, std::uint32_t m0);

/// compute_r at the largest feasible tau-degree <= want (precision decides).
TwistedSeries compute_r_adaptive(const DrinfeldModule& mod, int n, std::int64_t want);

} // namespace drinfeld
