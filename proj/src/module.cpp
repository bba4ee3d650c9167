#include "drinfeld/module.hpp"

#include <algorithm>
#include <sstream>

namespace drinfeld {

// ---------------------------------------------------------------- ResidueClass

ResidueClass::ResidueClass(const FqContext& ctx, std::int64_t k, PrecSeries value)
    : ctx_(&ctx), k_(k), v_(std::move(value)) {
    if (k_ < 0) throw usage_error("ResidueClass: negative modulus exponent");
    if (v_.val_lower_bound() < 0) throw domain_error("ResidueClass: non-integral value");
    if (v_.prec() < k_) throw insufficient_precision("ResidueClass: value known below the modulus");
    if (!v_.is_exact() || v_.stored_high() > k_) {
        std::vector<Fq> c;
        c.reserve(static_cast<std::size_t>(k_));
        for (std::int64_t e = 0; e < k_; ++e) c.push_back(v_.coeff(e));
        v_ = PrecSeries::from_coeffs(ctx, 0, std::move(c));
    }
}

ResidueClass ResidueClass::from_series(std::int64_t k, const PrecSeries& s) {
    return ResidueClass(s.ctx(), k, s);
}

ResidueClass ResidueClass::lowered(std::int64_t k2) const {
    if (k2 > k_) throw usage_error("ResidueClass: cannot raise the modulus");
    return ResidueClass(*ctx_, k2, v_);
}

ResidueClass operator+(const ResidueClass& a, const ResidueClass& b) {
    if (a.k_ != b.k_) throw usage_error("ResidueClass: modulus mismatch");
    return ResidueClass(*a.ctx_, a.k_, a.v_ + b.v_);
}
ResidueClass operator-(const ResidueClass& a, const ResidueClass& b) {
    if (a.k_ != b.k_) throw usage_error("ResidueClass: modulus mismatch");
    return ResidueClass(*a.ctx_, a.k_, a.v_ - b.v_);
}
ResidueClass operator*(const ResidueClass& a, const ResidueClass& b) {
    if (a.k_ != b.k_) throw usage_error("ResidueClass: modulus mismatch");
    return ResidueClass(*a.ctx_, a.k_, a.v_ * b.v_);
}
bool operator==(const ResidueClass& a, const ResidueClass& b) {
    if (a.k_ != b.k_) throw usage_error("ResidueClass: modulus mismatch");
    return (a.v_ - b.v_).is_zero_to_prec();
}

// ---------------------------------------------------------------- TorsionClass

TorsionClass::TorsionClass(ModulePtr mod, int level, ResidueClass residue)
    : mod_(std::move(mod)), n_(level), r_(std::move(residue)) {
    if (r_.modulus_exp() != static_cast<std::int64_t>(level) * mod_->m0())
        throw usage_error("TorsionClass: residue modulus does not match the level");
}

TorsionClass TorsionClass::lowered(int n2) const {
    if (n2 > n_) throw usage_error("TorsionClass: cannot raise the level");
    return TorsionClass(mod_, n2, r_.lowered(static_cast<std::int64_t>(n2) * mod_->m0()));
}

TorsionClass TorsionClass::scaled(const ResidueClass& a) const {
    return TorsionClass(mod_, n_, r_ * a);
}

TorsionClass operator+(const TorsionClass& a, const TorsionClass& b) {
    if (a.mod_ != b.mod_ || a.n_ != b.n_) throw usage_error("TorsionClass: mismatch");
    return TorsionClass(a.mod_, a.n_, a.r_ + b.r_);
}
TorsionClass operator-(const TorsionClass& a, const TorsionClass& b) {
    if (a.mod_ != b.mod_ || a.n_ != b.n_) throw usage_error("TorsionClass: mismatch");
    return TorsionClass(a.mod_, a.n_, a.r_ - b.r_);
}
bool operator==(const TorsionClass& a, const TorsionClass& b) {
    if (a.n_ != b.n_) throw usage_error("TorsionClass: level mismatch");
    return a.r_ == b.r_;
}

FieldElement TorsionClass::point() const {
    mod_->build_tower(n_);
    TwistedSeries rho_a = mod_->rho_of(r_.value());
    return tw_evaluate(rho_a, mod_->generator(n_));
}

// ---------------------------------------------------------------- DrinfeldModule

ModulePtr DrinfeldModule::carlitz(std::uint32_t p, std::uint32_t s, std::int64_t prec_t) {
    TowerPtr K = TowerField::make_base(p, s, prec_t);
    const FqContext& R = K->residue_ctx();
    TwistedSeries rho_t(K, {K->uniformizer(), K->one()});
    std::ostringstream spec;
    spec << "carlitz(p=" << p << ",s=" << s << ")";
    return make(K, std::move(rho_t), 1, PrecSeries::monomial(R, R.one(), 1), spec.str());
}

ModulePtr DrinfeldModule::make(TowerPtr H, TwistedSeries rho_t, std::uint32_t m0, PrecSeries eta,
                               std::string spec_string) {
    if (m0 == 0) throw usage_error("m0 must be >= 1");
    if (H->degree() % m0 != 0) throw usage_error("m0 must divide [H:K]");
    if (!rho_t.field()->same_field(*H)) throw usage_error("rho_t must have coefficients in H");
    if (!rho_t.is_exact()) throw usage_error("rho_t must be an exact skew polynomial");
    if (!rho_t.is_integral()) throw domain_error("rho_t must be integral");
    if (!eta.is_exact() || eta.val_lower_bound() < 0)
        throw usage_error("eta must be an exact integral polynomial in t");
    if (eta.val_lower_bound() != m0)
        throw domain_error("eta must have valuation exactly m0");

    auto mod = std::shared_ptr<DrinfeldModule>(new DrinfeldModule());
    mod->H_ = H;
    {
        TowerPtr K = H;
        while (K->parent()) K = K->parent();
        mod->K_ = K;
    }
    mod->rho_t_ = std::move(rho_t);
    mod->m0_ = m0;
    mod->eta_ = std::move(eta);
    mod->spec_ = std::move(spec_string);
    mod->levels_ = {H};
    mod->gens_ = {H->zero()}; // v_0 = 0
    mod->rho_tpow_ = {TwistedSeries::one(H)};

    // rho_t must act as t in degree 0 (formal Drinfeld module over O_K).
    FieldElement t_in_H = embed(mod->K_->uniformizer(), H);
    if (!(mod->rho_t_->coeff(0) - t_in_H).is_zero_to_prec())
        throw domain_error("rho_t must have constant tau-coefficient t");

    // Stable-reduction normalization: rho_eta == tau^{m0} mod p_H, exactly.
    auto red = tw_reduce_mod_p(mod->rho_eta_pow(1));
    bool ok = red.size() == static_cast<std::size_t>(m0) + 1 && red.back() == H->residue_ctx().one();
    for (std::size_t i = 0; ok && i + 1 < red.size(); ++i) ok = red[i].is_zero();
    mod->normalized_ = ok;
    return mod;
}

TwistedSeries DrinfeldModule::rho_of(const PrecSeries& a, std::int64_t D) const {
    if (a.val_lower_bound() < 0) throw usage_error("rho_of: a must be integral");
    TwistedSeries acc = TwistedSeries::zero(H_);
    if (a.is_zero_to_prec()) return acc;
    // base-field constants lift through any unramified layers of H
    std::vector<const TowerField*> chain;
    for (const TowerField* cur = H_.get(); cur->parent(); cur = cur->parent().get())
        chain.push_back(cur);
    for (std::int64_t i = a.stored_low(); i < a.stored_high(); ++i) {
        Fq ai = a.coeff(i);
        if (ai.is_zero()) continue;
        while (static_cast<std::int64_t>(rho_tpow_.size()) <= i)
            rho_tpow_.push_back(tw_mul(*rho_t_, rho_tpow_.back()));
        Fq lifted = ai;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) lifted = (*it)->lift_coeff(lifted);
        acc = tw_add(acc, tw_scale(H_->from_constant(lifted), rho_tpow_[static_cast<std::size_t>(i)]));
    }
    if (D < kExactDeg) acc = acc.truncated(D);
    return acc;
}

TwistedSeries DrinfeldModule::rho_eta_pow(int n) const {
    PrecSeries en = series_pow(eta_, n);
    return rho_of(en);
}

TwistedSeries DrinfeldModule::logarithm(std::int64_t D) const {
    if (D > rho_t_->dmax())
        throw insufficient_precision("logarithm: rho_t truncated below the requested tau-degree");
    const FqContext& R = H_->residue_ctx();
    const std::uint32_t sbase = H_->base_s();
    FieldElement t = embed(K_->uniformizer(), H_);
    if (log_coeffs_.empty()) log_coeffs_.push_back(H_->one());
    const auto& rt = rho_t_->coeffs();
    while (static_cast<std::int64_t>(log_coeffs_.size()) <= D) {
        std::int64_t k = static_cast<std::int64_t>(log_coeffs_.size());
        FieldElement num = H_->zero();
        for (std::int64_t j = 1; j <= k && j < static_cast<std::int64_t>(rt.size()); ++j) {
            const FieldElement& aj = rt[static_cast<std::size_t>(j)];
            if (aj.repr().is_exact() && aj.is_zero_to_prec()) continue;
            num = num + log_coeffs_[static_cast<std::size_t>(k - j)] *
                            aj.frobenius_q(static_cast<std::uint32_t>(k - j));
        }
        // denominator t - t^{q^k}
        PrecSeries tqk = series_frobenius_power(PrecSeries::monomial(R, R.one(), 1),
                                                sbase * static_cast<std::uint32_t>(k));
        FieldElement den = t - H_->from_series(tqk);
        log_coeffs_.push_back(num / den);
    }
    std::vector<FieldElement> c(log_coeffs_.begin(), log_coeffs_.begin() + static_cast<std::ptrdiff_t>(D + 1));
    return TwistedSeries(H_, std::move(c), D);
}

void DrinfeldModule::build_tower(int m) const {
    for (int k = built_levels() + 1; k <= m; ++k) build_level(k);
}

namespace {
std::string polygon_diagnostic(const TwistedSeries& g) {
    std::ostringstream os;
    os << "Newton polygon points (q^i, mu(g_i)): ";
    for (std::int64_t i = 0; i <= g.tau_degree(); ++i) {
        auto v = g.coeff(i).valuation();
        os << "(" << i << ", " << (v ? v->str() : ">=prec") << ") ";
    }
    return os.str();
}
} // namespace

// One Eisenstein step of a torsion tower: adjoin the kernel factor of
// g(X) - target over `prev` (target = 0 adjoins ker(g) itself, dividing out
// the known root 0). g must have an Eisenstein factor after normalization.
static std::pair<TowerPtr, FieldElement> adjoin_kernel_factor(const TwistedSeries& g,
                                                              const TowerPtr& prev,
                                                              const FieldElement* target,
                                                              std::uint32_t q) {
    const std::int64_t dg = g.tau_degree();
    FieldElement glead = g.coeff(dg);
    FieldElement gli = embed(glead.inverse(), prev);
    std::int64_t qd = 1;
    for (std::int64_t i = 0; i < dg; ++i) qd *= q;
    std::vector<FieldElement> coeffs;
    if (!target) {
        // (g(X)/X) / glead: coefficient of X^{q^i - 1} is g_i/glead
        coeffs.assign(static_cast<std::size_t>(qd - 1), prev->zero());
        for (std::int64_t i = 0; i < dg; ++i) {
            std::int64_t qi = 1;
            for (std::int64_t j = 0; j < i; ++j) qi *= q;
            coeffs[static_cast<std::size_t>(qi - 1)] = embed(g.coeff(i), prev) * gli;
        }
    } else {
        // (g(X) - target) / glead
        coeffs.assign(static_cast<std::size_t>(qd), prev->zero());
        coeffs[0] = -(*target * gli);
        for (std::int64_t i = 0; i < dg; ++i) {
            std::int64_t qi = 1;
            for (std::int64_t j = 0; j < i; ++j) qi *= q;
            coeffs[static_cast<std::size_t>(qi)] = embed(g.coeff(i), prev) * gli;
        }
    }
    TowerPtr Ek = prev->extend_eisenstein(coeffs);
    return {Ek, Ek->uniformizer()};
}

void DrinfeldModule::build_level(int k) const {
    if (!normalized_)
        throw domain_error("torsion tower construction requires the normalized case "
                           "rho_eta == tau^{m0} mod p_H");
    TwistedSeries g = rho_eta_pow(1); // exact
    const std::int64_t dg = g.tau_degree();
    if (dg != static_cast<std::int64_t>(m0_))
        throw domain_error("torsion tower: deg_tau(rho_eta) = " + std::to_string(dg) +
                           " != m0 = " + std::to_string(m0_) +
                           "; kernel factor extraction beyond the Eisenstein case is unsupported. " +
                           polygon_diagnostic(g));
    {
        auto glv = g.coeff(dg).valuation();
        if (!glv || *glv != RationalVal(0))
            throw domain_error("torsion tower: leading coefficient of rho_eta is not a unit. " +
                               polygon_diagnostic(g));
    }
    const std::uint32_t q = this->q();
    const bool eta_is_monomial = eta_.coeffs().size() == 1;

    if (m0_ == 1 || !eta_is_monomial) {
        if (m0_ != 1)
            throw domain_error("torsion tower: m0 > 1 needs eta = t^{m0} (the level factors "
                               "are assembled from the fine t-power tower). " +
                               polygon_diagnostic(g));
        auto [Ek, vk] = k == 1 ? adjoin_kernel_factor(g, levels_.back(), nullptr, q)
                               : adjoin_kernel_factor(g, levels_.back(), &gens_.back(), q);
        levels_.push_back(Ek);
        gens_.push_back(vk);
    } else {
        // eta = t^{m0}: E^k is level k*m0 of the fine tower built from the
        // rho_t kernel factors (one Eisenstein slope per step); the coarse
        // generator chain rho_eta(v_k) = v_{k-1} is the fine chain composed.
        TwistedSeries gt = rho_of(PrecSeries::monomial(K_->residue_ctx(), K_->residue_ctx().one(), 1));
        if (fine_levels_.empty()) {
            fine_levels_ = {H_};
            fine_gens_ = {H_->zero()};
        }
        for (std::int64_t j = static_cast<std::int64_t>(fine_levels_.size()) - 1;
             j < static_cast<std::int64_t>(k) * m0_; ++j) {
            auto [Ej, wj] = j == 0 ? adjoin_kernel_factor(gt, fine_levels_.back(), nullptr, q)
                                   : adjoin_kernel_factor(gt, fine_levels_.back(),
                                                          &fine_gens_.back(), q);
            fine_levels_.push_back(Ej);
            fine_gens_.push_back(wj);
        }
        levels_.push_back(fine_levels_[static_cast<std::size_t>(k) * m0_]);
        gens_.push_back(fine_gens_[static_cast<std::size_t>(k) * m0_]);
    }

    // e(E^k|K) = q^{k m0 - 1}(q-1) over the unramified part
    std::int64_t expected_e = q - 1;
    for (std::int64_t i = 1; i < static_cast<std::int64_t>(k) * m0_; ++i) expected_e *= q;
    if (levels_.back()->e() != expected_e)
        throw internal_inconsistency("torsion tower: unexpected ramification index");
}

const TowerPtr& DrinfeldModule::level(int k) const {
    if (k < 0 || k > built_levels()) throw usage_error("tower level not built");
    return levels_[static_cast<std::size_t>(k)];
}

const FieldElement& DrinfeldModule::generator(int k) const {
    if (k < 1 || k > built_levels()) throw usage_error("tower level not built");
    return gens_[static_cast<std::size_t>(k)];
}

FieldElement DrinfeldModule::generator_in(int k, int m) const {
    if (k > m) throw usage_error("generator_in: k must be <= m");
    auto key = std::make_pair(k, m);
    auto it = gen_embed_.find(key);
    if (it == gen_embed_.end())
        it = gen_embed_.emplace(key, embed(generator(k), level(m))).first;
    return it->second;
}

PrecSeries DrinfeldModule::torsion_residue(int n, std::uint64_t idx) const {
    const FqContext& R = K_->residue_ctx();
    const std::uint32_t q = this->q();
    std::int64_t digits = static_cast<std::int64_t>(n) * m0_;
    std::vector<Fq> c;
    c.reserve(static_cast<std::size_t>(digits));
    for (std::int64_t j = 0; j < digits; ++j) {
        c.push_back(Fq(static_cast<std::uint32_t>(idx % q)));
        idx /= q;
    }
    return PrecSeries::from_coeffs(R, 0, std::move(c));
}

std::vector<FieldElement> DrinfeldModule::torsion_points(int n) const {
    build_tower(n);
    std::uint64_t count = 1;
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n) * m0_; ++i) count *= q();
    std::vector<FieldElement> pts;
    pts.reserve(count);
    const FieldElement& vn = generator(n);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        PrecSeries a = torsion_residue(n, idx);
        pts.push_back(tw_evaluate(rho_of(a), vn));
    }
    return pts;
}

TwistedSeries DrinfeldModule::kernel_product(int n) const {
    auto it = kernel_products_.find(n);
    if (it != kernel_products_.end()) return it->second;
    build_tower(n);
    const TowerPtr& En = level(n);
    const std::uint32_t q = this->q();
    const FieldElement& vn = generator(n);

    TwistedSeries P = TwistedSeries::one(En); // the additive polynomial X
    std::int64_t digits = static_cast<std::int64_t>(n) * m0_;
    for (std::int64_t j = 0; j < digits; ++j) {
        // extend the kernel by the basis vector rho_{t^j}(v_n)
        PrecSeries tj = PrecSeries::monomial(K_->residue_ctx(), K_->residue_ctx().one(), j);
        FieldElement w = tw_evaluate(rho_of(tj), vn);
        FieldElement z = tw_evaluate(P, w);
        if (z.is_zero_to_prec())
            throw insufficient_precision("kernel_product: partial product vanished on a basis point");
        TwistedSeries step(En, {-(z.pow(static_cast<std::int64_t>(q) - 1)), En->one()});
        P = tw_mul(step, P);
    }
    // Galois invariance: coefficients lie in O_H
    std::vector<FieldElement> down;
    down.reserve(P.coeffs().size());
    for (const auto& c : P.coeffs()) {
        FieldElement cd = descend_to(c, H_);
        if (cd.val_lower_bound() < RationalVal(0))
            throw internal_inconsistency("kernel_product: coefficient is not integral");
        down.push_back(cd);
    }
    TwistedSeries result(H_, std::move(down));
    kernel_products_.emplace(n, result);
    return result;
}

TwistedSeries DrinfeldModule::compute_r(int n, std::int64_t D) const {
    TwistedSeries P = kernel_product(n);
    TwistedSeries g = rho_eta_pow(n);
    TwistedSeries r = tw_left_divide(P, g, D);
    auto r0v = r.coeff(0).valuation();
    if (!r0v || *r0v != RationalVal(0))
        throw internal_inconsistency("compute_r: constant coefficient of r is not a unit");
    if (!r.is_integral())
        throw internal_inconsistency("compute_r: r is not integral to precision");
    return r;
}

ModulePtr DrinfeldModule::twist(const TwistedSeries& r, std::int64_t D) const {
    if (!r.field()->same_field(*H_)) throw usage_error("twist: r must live over H");
    if (!r.is_integral()) throw domain_error("twist: r must be integral");
    TwistedSeries rinv = tw_invert(r, D);
    TwistedSeries rho2 = tw_mul(tw_mul(r, *rho_t_), rinv).truncated(D);

    auto mod = std::shared_ptr<DrinfeldModule>(new DrinfeldModule());
    mod->H_ = H_;
    mod->K_ = K_;
    mod->rho_t_ = rho2;
    mod->m0_ = m0_;
    mod->eta_ = eta_;
    mod->spec_ = spec_ + "#twist";
    mod->twisted_ = true;
    mod->levels_ = {H_};
    mod->gens_ = {H_->zero()};
    mod->rho_tpow_ = {TwistedSeries::one(H_)};
    // reduction type is preserved by integral twists
    auto red = tw_reduce_mod_p(mod->rho_eta_pow(1));
    bool ok = red.size() == static_cast<std::size_t>(m0_) + 1 && red.back() == H_->residue_ctx().one();
    for (std::size_t i = 0; ok && i + 1 < red.size(); ++i) ok = red[i].is_zero();
    mod->normalized_ = ok;

    // Shared tower fields; generators move by v -> r(v) (r: W -> W' is an
    // O_K-module isomorphism).
    for (int k = 1; k <= built_levels(); ++k) {
        mod->levels_.push_back(levels_[static_cast<std::size_t>(k)]);
        FieldElement vk = tw_evaluate(r, gens_[static_cast<std::size_t>(k)]);
        auto v = vk.int_valuation();
        if (!v || *v != 1)
            throw internal_inconsistency("twist: mapped generator is not a uniformizer");
        mod->gens_.push_back(vk);
    }
    return mod;
}

void DrinfeldModule::adopt_tower(const std::vector<TowerPtr>& eisenstein_levels) const {
    if (built_levels() != 0) throw usage_error("adopt_tower: tower already built");
    for (const auto& Ek : eisenstein_levels) {
        if (Ek->kind() != TowerField::Kind::Eisenstein ||
            !levels_.back()->same_field(*Ek->parent()))
            throw usage_error("adopt_tower: levels do not chain over H");
        levels_.push_back(Ek);
        gens_.push_back(Ek->uniformizer());
    }
    // verify the generator chain rho_eta(v_k) = v_{k-1}
    for (int k = 1; k <= built_levels(); ++k) {
        FieldElement lhs = tw_evaluate(rho_eta_pow(1), gens_[static_cast<std::size_t>(k)]);
        FieldElement rhs = k == 1 ? levels_[1]->zero()
                                  : embed(gens_[static_cast<std::size_t>(k - 1)],
                                          levels_[static_cast<std::size_t>(k)]);
        if (!(lhs - rhs).is_zero_to_prec())
            throw domain_error("adopt_tower: generator chain fails rho_eta(v_k) = v_{k-1} "
                               "(corrupt cache?)");
    }
}

// ---------------------------------------------------------------- Galois oracle

namespace {
FieldElement galois_orbit_fold(const DrinfeldModule& mod, const FieldElement& x, int n, bool product) {
    if (mod.H()->kind() != TowerField::Kind::Base)
        throw usage_error("galois oracle: supported for H = K only");
    mod.build_tower(n);
    const TowerPtr& En = mod.level(n);
    if (!x.field()->same_field(*En)) throw usage_error("galois oracle: x must lie in E^n");
    const FieldElement& vn = mod.generator(n);
    std::uint64_t count = 1;
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n) * mod.m0(); ++i) count *= mod.q();

    FieldElement acc = product ? En->one() : En->zero();
    const PrecSeries& f = x.repr();
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        PrecSeries u = mod.torsion_residue(n, idx);
        if (u.is_zero_to_prec() || u.coeff(0).is_zero()) continue; // units only
        FieldElement conj_gen = tw_evaluate(mod.rho_of(u), vn);
        FieldElement cx = En->from_series(series_compose(f, conj_gen.repr(), En->prec()));
        acc = product ? acc * cx : acc + cx;
    }
    return descend_to(acc, mod.base());
}
} // namespace

FieldElement galois_trace_to_K(const DrinfeldModule& mod, const FieldElement& x, int n) {
    return galois_orbit_fold(mod, x, n, false);
}
FieldElement galois_norm_to_K(const DrinfeldModule& mod, const FieldElement& x, int n) {
    return galois_orbit_fold(mod, x, n, true);
}

} // namespace drinfeld
