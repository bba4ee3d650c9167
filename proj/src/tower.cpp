#include "drinfeld/tower.hpp"

#include <algorithm>
#include <sstream>

namespace drinfeld {

namespace {
void require_same_field(const FieldElement& a, const FieldElement& b) {
    if (!a.field()->same_field(*b.field()))
        throw usage_error("field element operation on mismatched fields");
}

std::int64_t floordiv(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}
std::int64_t ceildiv(std::int64_t a, std::int64_t b) { return -floordiv(-a, b); }
} // namespace

// ---------------------------------------------------------------- FieldElement

FieldElement::FieldElement(TowerPtr F, PrecSeries s) : F_(std::move(F)), s_(std::move(s)) {
    if (!s_.ctx().same_as(F_->residue_ctx()))
        throw usage_error("series coefficient field does not match the tower residue field");
    // Exact polynomials stay exact; finite precision is capped at the field's
    // working precision.
    if (!s_.is_exact() && s_.prec() > F_->prec()) s_ = s_.with_prec(F_->prec());
}

std::optional<RationalVal> FieldElement::valuation() const {
    auto v = s_.valuation();
    if (!v) return std::nullopt;
    return RationalVal(*v, F_->e());
}

RationalVal FieldElement::val_lower_bound() const {
    return RationalVal(s_.val_lower_bound(), F_->e());
}

Fq FieldElement::residue() const {
    if (s_.val_lower_bound() < 0) throw domain_error("residue of a non-integral element");
    if (s_.prec() < 1) throw insufficient_precision("residue: precision below 1");
    return s_.coeff(0);
}

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    require_same_field(a, b);
    return FieldElement(a.field(), a.repr() + b.repr());
}
FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    require_same_field(a, b);
    return FieldElement(a.field(), a.repr() - b.repr());
}
FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    require_same_field(a, b);
    return FieldElement(a.field(), a.repr() * b.repr());
}
FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    require_same_field(a, b);
    return a * b.inverse();
}

FieldElement FieldElement::inverse() const {
    std::optional<std::int64_t> target;
    if (s_.is_exact() && s_.coeffs().size() > 1) target = F_->prec();
    return FieldElement(F_, series_inv(s_, target));
}

FieldElement FieldElement::pow(std::int64_t k) const {
    if (k < 0) return inverse().pow(-k);
    if (k == 0) return F_->one();
    FieldElement r = *this;
    std::uint64_t eU = static_cast<std::uint64_t>(k) - 1;
    FieldElement sq = *this;
    while (eU) {
        if (eU & 1) r = r * sq;
        eU >>= 1;
        if (eU) sq = sq * sq;
    }
    return r;
}

FieldElement FieldElement::frobenius_q(std::uint32_t r) const {
    return FieldElement(F_, series_frobenius_power(s_, F_->base_s() * r));
}

std::string FieldElement::str() const { return s_.str("pi"); }

// ---------------------------------------------------------------- TowerField

TowerPtr TowerField::make_base(std::uint32_t p, std::uint32_t s, std::int64_t prec_t) {
    if (prec_t < 1) throw usage_error("base field precision must be >= 1");
    auto F = std::shared_ptr<TowerField>(new TowerField());
    F->kind_ = Kind::Base;
    F->ctx_ = &FqContext::get(p, s);
    F->p_ = p;
    F->s_ = s;
    F->prec_ = prec_t;
    F->prec_t_ = prec_t;
    return F;
}

TowerPtr TowerField::extend_unramified(std::uint32_t fext) const {
    if (fext == 0) throw usage_error("unramified extension degree must be >= 1");
    if (fext == 1) return shared_from_this();
    auto F = std::shared_ptr<TowerField>(new TowerField());
    F->kind_ = Kind::Unramified;
    F->parent_ = shared_from_this();
    F->p_ = p_;
    F->s_ = s_;
    F->ctx_ = &FqContext::get(p_, ctx_->s() * fext);
    F->e_ = e_;
    F->f_ = f_ * fext;
    F->prec_ = prec_;
    F->prec_t_ = prec_t_;
    F->diff_ = diff_; // unramified: trivial different contribution
    F->d_ = 1;
    F->embed_parent_ = PrecSeries::monomial(F->residue_ctx(), F->residue_ctx().one(), 1);

    // Residue embedding: send the parent generator to the least root of the
    // parent modulus in the bigger field; F_p embeds by value.
    const FqContext& big = F->residue_ctx();
    const FqContext& small = *ctx_;
    Fq gen_img = big.zero();
    if (small.s() == 1) {
        gen_img = big.one(); // unused; value-preserving path below
    } else {
        bool found = false;
        for (std::uint32_t cand = 0; cand < big.q() && !found; ++cand) {
            // evaluate modulus at cand
            Fq x(cand);
            Fq acc = big.pow(x, small.s());
            for (std::uint32_t i = 0; i < small.s(); ++i) {
                Fq ci = big.from_int(small.modulus()[i]);
                acc = big.add(acc, big.mul(ci, big.pow(x, i)));
            }
            if (acc.is_zero()) {
                gen_img = x;
                found = true;
            }
        }
        if (!found) throw internal_inconsistency("no root of the residue modulus in the extension");
    }
    F->lift_t_.assign(small.q(), big.zero());
    for (std::uint32_t a = 0; a < small.q(); ++a) {
        Fq img;
        if (small.s() == 1) {
            img = Fq(a); // prime-field values coincide
        } else {
            auto co = small.coords(Fq(a));
            img = big.zero();
            for (std::size_t i = 0; i < co.size(); ++i)
                img = big.add(img, big.mul(big.from_int(co[i]), big.pow(gen_img, static_cast<std::int64_t>(i))));
        }
        F->lift_t_[a] = img;
        F->to_parent_.emplace(img.value(), Fq(a));
    }
    return F;
}

Fq TowerField::lift_coeff(Fq parent_c) const {
    if (kind_ != Kind::Unramified) return parent_c; // same residue field
    return lift_t_.at(parent_c.value());
}

std::optional<Fq> TowerField::coeff_to_parent(Fq c) const {
    if (kind_ != Kind::Unramified) return c;
    auto it = to_parent_.find(c.value());
    if (it == to_parent_.end()) return std::nullopt;
    return it->second;
}

TowerPtr TowerField::extend_eisenstein(const std::vector<FieldElement>& lower_coeffs) const {
    if (lower_coeffs.empty()) throw usage_error("extend_eisenstein: empty coefficient list");
    const std::uint32_t d = static_cast<std::uint32_t>(lower_coeffs.size());
    for (const auto& c : lower_coeffs)
        if (!c.field()->same_field(*this))
            throw usage_error("extend_eisenstein: coefficients must lie in the field being extended");
    // Eisenstein: lower coefficients of positive valuation, constant term of
    // valuation exactly 1 in this field.
    auto v0 = lower_coeffs[0].int_valuation();
    if (!v0) throw insufficient_precision("extend_eisenstein: constant term indistinguishable from zero");
    if (*v0 != 1) throw domain_error("extend_eisenstein: constant term must have valuation exactly 1");
    for (std::uint32_t i = 1; i < d; ++i)
        if (lower_coeffs[i].repr().val_lower_bound() < 1)
            throw domain_error("extend_eisenstein: coefficient of X^" + std::to_string(i) +
                               " is not of positive valuation");

    auto F = std::shared_ptr<TowerField>(new TowerField());
    F->kind_ = Kind::Eisenstein;
    F->parent_ = shared_from_this();
    F->p_ = p_;
    F->s_ = s_;
    F->ctx_ = ctx_; // residue field unchanged
    F->e_ = e_ * d;
    F->f_ = f_;
    F->prec_ = prec_ * d;
    F->prec_t_ = prec_t_;
    F->d_ = d;
    F->minpoly_.reserve(d);
    for (const auto& c : lower_coeffs) F->minpoly_.push_back(c.repr());

    // Solve pi_parent = y(pi_new) from X^d + sum C_i(y) X^i = 0 by fixed-point
    // iteration on the valuation-1 part of C_0.
    const FqContext& R = *ctx_;
    const std::int64_t P = F->prec_;
    const PrecSeries& C0 = F->minpoly_[0];
    Fq a1 = C0.coeffs()[0];
    Fq a1inv = R.inv(a1);
    PrecSeries pid = PrecSeries::monomial(R, R.one(), d, P);
    PrecSeries y = pid.scaled(R.neg(a1inv));
    std::int64_t last_gain = -1;
    bool converged = false;
    for (std::int64_t iter = 0; iter < P + 8; ++iter) {
        PrecSeries rhs = pid;
        for (std::uint32_t i = 1; i < d; ++i) {
            const PrecSeries& Ci = F->minpoly_[i];
            if (Ci.is_zero_to_prec()) continue;
            rhs = rhs + series_compose(Ci, y, P) * PrecSeries::monomial(R, R.one(), i, P);
        }
        PrecSeries c0y = series_compose(C0, y, P);
        rhs = rhs + (c0y - y.scaled(a1));
        PrecSeries ynext = rhs.scaled(R.neg(a1inv)).with_prec(P);
        PrecSeries delta = ynext - y;
        if (delta.is_zero_to_prec()) {
            y = ynext;
            converged = true;
            break;
        }
        std::int64_t gain = delta.val_lower_bound();
        if (gain <= last_gain)
            throw domain_error("extend_eisenstein: fixed-point iteration failed to gain valuation "
                               "(malformed polynomial?)");
        last_gain = gain;
        y = ynext;
    }
    if (!converged)
        throw domain_error("extend_eisenstein: fixed-point iteration did not converge");
    F->embed_parent_ = y;

    // verify phi(pi_new) = 0 to the propagated precision
    {
        PrecSeries res = PrecSeries::monomial(R, R.one(), d, P);
        for (std::uint32_t i = 0; i < d; ++i) {
            if (F->minpoly_[i].is_zero_to_prec()) continue;
            res = res + series_compose(F->minpoly_[i], y, P) *
                            PrecSeries::monomial(R, R.one(), i, P);
        }
        if (!res.is_zero_to_prec())
            throw internal_inconsistency("extend_eisenstein: minimal polynomial does not vanish on "
                                         "the new uniformizer");
    }
    F->init_eisenstein_tail();
    return F;
}

TowerPtr TowerField::restore_eisenstein(TowerPtr parent, std::vector<PrecSeries> minpoly,
                                        PrecSeries embedding) {
    if (minpoly.empty()) throw usage_error("restore_eisenstein: empty minimal polynomial");
    auto F = std::shared_ptr<TowerField>(new TowerField());
    const std::uint32_t d = static_cast<std::uint32_t>(minpoly.size());
    F->kind_ = Kind::Eisenstein;
    F->parent_ = parent;
    F->p_ = parent->p_;
    F->s_ = parent->s_;
    F->ctx_ = parent->ctx_;
    F->e_ = parent->e_ * d;
    F->f_ = parent->f_;
    F->prec_ = parent->prec_ * d;
    F->prec_t_ = parent->prec_t_;
    F->d_ = d;
    F->minpoly_ = std::move(minpoly);
    F->embed_parent_ = std::move(embedding);
    const FqContext& R = *F->ctx_;
    PrecSeries res = PrecSeries::monomial(R, R.one(), d, F->prec_);
    for (std::uint32_t i = 0; i < d; ++i) {
        if (F->minpoly_[i].is_zero_to_prec()) continue;
        res = res + series_compose(F->minpoly_[i], F->embed_parent_, F->prec_) *
                        PrecSeries::monomial(R, R.one(), i, F->prec_);
    }
    if (!res.is_zero_to_prec())
        throw domain_error("restore_eisenstein: stored embedding is inconsistent with the minimal "
                           "polynomial (corrupt cache?)");
    F->init_eisenstein_tail();
    return F;
}

void TowerField::init_eisenstein_tail() {
    // Different through this layer: mu_K of phi'(pi_new).
    const FqContext& R = *ctx_;
    const std::int64_t P = prec_;
    PrecSeries dphi = PrecSeries::monomial(R, R.from_int(d_), d_ - 1, P);
    for (std::uint32_t i = 1; i < d_; ++i) {
        if (minpoly_[i].is_zero_to_prec()) continue;
        PrecSeries term = series_compose(minpoly_[i], embed_parent_, P).scaled(R.from_int(i)) *
                          PrecSeries::monomial(R, R.one(), i - 1, P);
        dphi = dphi + term;
    }
    auto v = dphi.valuation();
    if (!v) throw insufficient_precision("different: phi'(pi) indistinguishable from zero");
    diff_ = parent_->diff_ + RationalVal(*v, e_);
}

bool TowerField::is_prefix_of(const TowerField& M) const {
    const TowerField* cur = &M;
    while (cur) {
        if (cur == this) return true;
        cur = cur->parent_.get();
    }
    return false;
}

FieldElement TowerField::zero() const {
    return FieldElement(shared_from_this(), PrecSeries::zero(*ctx_, prec_));
}
FieldElement TowerField::one() const {
    return FieldElement(shared_from_this(), PrecSeries::one(*ctx_));
}
FieldElement TowerField::uniformizer() const {
    return FieldElement(shared_from_this(), PrecSeries::monomial(*ctx_, ctx_->one(), 1));
}
FieldElement TowerField::from_series(PrecSeries s) const {
    return FieldElement(shared_from_this(), std::move(s));
}
FieldElement TowerField::from_constant(Fq c) const {
    return FieldElement(shared_from_this(), PrecSeries::monomial(*ctx_, c, 0));
}
FieldElement TowerField::from_int(std::int64_t n) const {
    return from_constant(ctx_->from_int(n));
}

// ---------------------------------------------------------------- free functions

namespace {
PrecSeries lift_series_one_layer(const PrecSeries& s, const TowerField& child) {
    const FqContext& R = child.residue_ctx();
    switch (child.kind()) {
    case TowerField::Kind::Unramified: {
        if (s.is_zero_to_prec()) return PrecSeries::zero(R, s.prec());
        std::vector<Fq> c(s.coeffs().size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = child.lift_coeff(s.coeffs()[i]);
        return PrecSeries::from_coeffs(R, s.stored_low(), std::move(c), s.prec());
    }
    case TowerField::Kind::Eisenstein:
        return series_compose(s, child.parent_embedding(), child.prec());
    default:
        throw usage_error("cannot lift into a base field");
    }
}
} // namespace

FieldElement embed(const FieldElement& x, const TowerPtr& M) {
    if (x.field()->same_field(*M)) return x;
    if (!x.field()->is_prefix_of(*M))
        throw usage_error("embed: element's field is not a sub-tower of the target");
    std::vector<const TowerField*> chain;
    for (const TowerField* cur = M.get(); cur != x.field().get(); cur = cur->parent().get())
        chain.push_back(cur);
    PrecSeries s = x.repr();
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) s = lift_series_one_layer(s, **it);
    return FieldElement(M, std::move(s));
}

std::vector<FieldElement> digits_to_parent(const FieldElement& x) {
    const TowerField& L = *x.field();
    if (L.kind() != TowerField::Kind::Eisenstein)
        throw usage_error("digits_to_parent: top layer is not Eisenstein");
    const TowerPtr& par = L.parent();
    const FqContext& R = L.residue_ctx();
    const std::int64_t d = L.layer_degree();
    const PrecSeries& E = L.parent_embedding();
    Fq lead = E.coeffs()[0];

    // cached powers of E (and of its inverse for Laurent digits)
    std::vector<PrecSeries> pos = {PrecSeries::one(R)};
    std::vector<PrecSeries> neg; // neg[k] = E^{-(k+1)}
    auto Epow = [&](std::int64_t i) -> const PrecSeries& {
        if (i >= 0) {
            while (static_cast<std::int64_t>(pos.size()) <= i)
                pos.push_back((pos.back() * E).with_prec(L.prec() + d * (static_cast<std::int64_t>(pos.size()))));
            return pos[static_cast<std::size_t>(i)];
        }
        std::size_t k = static_cast<std::size_t>(-i) - 1;
        if (neg.empty()) neg.push_back(series_inv(E));
        while (neg.size() <= k) neg.push_back(neg.back() * neg.front());
        return neg[k];
    };

    const std::int64_t P = std::min(x.repr().prec(), L.prec());
    PrecSeries r = x.repr().with_prec(P);
    std::vector<std::vector<std::pair<std::int64_t, Fq>>> acc(static_cast<std::size_t>(d));
    std::int64_t guard = 0;
    const std::int64_t max_iters = P - r.val_lower_bound() + 16;
    std::int64_t last_k = r.val_lower_bound() - 1;
    while (!r.is_zero_to_prec()) {
        std::int64_t k = *r.valuation();
        if (++guard > max_iters || k <= last_k)
            throw internal_inconsistency("digits_to_parent: residual valuation stopped increasing");
        last_k = k;
        std::int64_t j = ((k % d) + d) % d;
        std::int64_t i = (k - j) / d;
        Fq c = R.div(r.coeff(k), R.pow(lead, i));
        acc[static_cast<std::size_t>(j)].emplace_back(i, c);
        PrecSeries sub = Epow(i).scaled(c).shifted(j).with_prec(P);
        r = r - sub;
    }
    // The eliminations can lower the residual's precision below P when the
    // element is Laurent (negative powers of the embedding carry less
    // precision); the digits are only known to the final residual precision.
    const std::int64_t Peff = r.prec();
    std::vector<FieldElement> out;
    out.reserve(static_cast<std::size_t>(d));
    for (std::int64_t j = 0; j < d; ++j) {
        const auto& terms = acc[static_cast<std::size_t>(j)];
        std::int64_t dprec = ceildiv(Peff - j, d);
        PrecSeries s = PrecSeries::zero(par->residue_ctx(), dprec);
        if (!terms.empty()) {
            std::int64_t lo = terms.front().first;
            std::int64_t hi = terms.back().first;
            std::vector<Fq> c(static_cast<std::size_t>(hi - lo + 1), R.zero());
            for (const auto& [i, v] : terms) c[static_cast<std::size_t>(i - lo)] = v;
            s = PrecSeries::from_coeffs(par->residue_ctx(), lo, std::move(c), dprec);
        }
        out.push_back(FieldElement(par, std::move(s)));
    }
    return out;
}

FieldElement from_digits(const TowerPtr& L, const std::vector<FieldElement>& digits) {
    if (L->kind() != TowerField::Kind::Eisenstein)
        throw usage_error("from_digits: top layer is not Eisenstein");
    FieldElement r = L->zero();
    const FqContext& R = L->residue_ctx();
    for (std::size_t j = 0; j < digits.size(); ++j) {
        PrecSeries lifted = lift_series_one_layer(digits[j].repr(), *L);
        r = r + L->from_series(lifted * PrecSeries::monomial(R, R.one(), static_cast<std::int64_t>(j)));
    }
    return r;
}

namespace {

FieldElement det_gauss(std::vector<std::vector<FieldElement>> M, const TowerPtr& F) {
    const std::size_t n = M.size();
    FieldElement result = F->one();
    bool flip = false;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = n;
        std::int64_t bestval = 0;
        for (std::size_t row = col; row < n; ++row) {
            auto v = M[row][col].int_valuation();
            if (v && (best == n || *v < bestval)) {
                best = row;
                bestval = *v;
            }
        }
        if (best == n) {
            bool all_exact_zero = true;
            for (std::size_t row = col; row < n; ++row)
                if (!(M[row][col].repr().is_exact() && M[row][col].is_zero_to_prec()))
                    all_exact_zero = false;
            if (all_exact_zero) return F->from_series(PrecSeries::exact_zero(F->residue_ctx()));
            throw insufficient_precision("determinant: no provably nonzero pivot");
        }
        if (best != col) {
            std::swap(M[best], M[col]);
            flip = !flip;
        }
        const FieldElement& pivot = M[col][col];
        result = result * pivot;
        FieldElement pinv = pivot.inverse();
        for (std::size_t row = col + 1; row < n; ++row) {
            if (M[row][col].is_zero_to_prec()) continue;
            FieldElement factor = M[row][col] * pinv;
            for (std::size_t cc = col; cc < n; ++cc)
                M[row][cc] = M[row][cc] - factor * M[col][cc];
        }
    }
    if (flip) result = -result;
    return result;
}

} // namespace

FieldElement trace_to_parent(const FieldElement& x) {
    const TowerField& L = *x.field();
    const TowerPtr& par = L.parent();
    if (!par) throw usage_error("trace_to_parent: base field has no parent");
    if (L.kind() == TowerField::Kind::Unramified) {
        const FqContext& R = L.residue_ctx();
        const FqContext& Rp = par->residue_ctx();
        std::uint32_t fext = R.s() / Rp.s();
        const PrecSeries& s = x.repr();
        if (s.is_zero_to_prec())
            return FieldElement(par, PrecSeries::zero(Rp, s.prec()));
        std::vector<Fq> c(s.coeffs().size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            Fq a = s.coeffs()[i];
            Fq tr = R.zero();
            Fq pw = a;
            for (std::uint32_t k = 0; k < fext; ++k) {
                tr = R.add(tr, pw);
                pw = R.frobenius_iter(pw, Rp.s());
            }
            auto down = L.coeff_to_parent(tr);
            if (!down) throw internal_inconsistency("residue trace escaped the subfield");
            c[i] = *down;
        }
        return FieldElement(par, PrecSeries::from_coeffs(Rp, s.stored_low(), std::move(c), s.prec()));
    }
    // Eisenstein: sum of the diagonal of the multiplication matrix.
    const std::int64_t d = L.layer_degree();
    FieldElement pi = L.uniformizer();
    FieldElement acc = par->zero();
    FieldElement xp = x;
    for (std::int64_t j = 0; j < d; ++j) {
        auto digs = digits_to_parent(xp);
        acc = acc + digs[static_cast<std::size_t>(j)];
        if (j + 1 < d) xp = xp * pi;
    }
    return acc;
}

FieldElement norm_to_parent(const FieldElement& x) {
    const TowerField& L = *x.field();
    const TowerPtr& par = L.parent();
    if (!par) throw usage_error("norm_to_parent: base field has no parent");
    if (L.kind() == TowerField::Kind::Unramified) {
        const FqContext& R = L.residue_ctx();
        const FqContext& Rp = par->residue_ctx();
        std::uint32_t fext = R.s() / Rp.s();
        PrecSeries prod = PrecSeries::one(R);
        PrecSeries conj = x.repr();
        for (std::uint32_t k = 0; k < fext; ++k) {
            prod = prod * conj;
            if (k + 1 < fext) {
                if (conj.is_zero_to_prec()) continue;
                std::vector<Fq> c(conj.coeffs().size());
                for (std::size_t i = 0; i < c.size(); ++i)
                    c[i] = R.frobenius_iter(conj.coeffs()[i], Rp.s());
                conj = PrecSeries::from_coeffs(R, conj.stored_low(), std::move(c), conj.prec());
            }
        }
        if (prod.is_zero_to_prec()) return FieldElement(par, PrecSeries::zero(Rp, prod.prec()));
        std::vector<Fq> c(prod.coeffs().size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            auto down = L.coeff_to_parent(prod.coeffs()[i]);
            if (!down) throw internal_inconsistency("residue norm escaped the subfield");
            c[i] = *down;
        }
        return FieldElement(par, PrecSeries::from_coeffs(Rp, prod.stored_low(), std::move(c), prod.prec()));
    }
    const std::int64_t d = L.layer_degree();
    if (x.repr().is_exact() && x.is_zero_to_prec())
        return FieldElement(par, PrecSeries::exact_zero(par->residue_ctx()));
    if (x.is_zero_to_prec())
        return FieldElement(par, PrecSeries::zero(par->residue_ctx(), x.repr().prec()));
    FieldElement pi = L.uniformizer();
    std::vector<std::vector<FieldElement>> M;
    FieldElement xp = x;
    for (std::int64_t j = 0; j < d; ++j) {
        M.push_back(digits_to_parent(xp));
        if (j + 1 < d) xp = xp * pi;
    }
    // columns were built as rows of M^T; determinant is transpose-invariant
    return det_gauss(std::move(M), par);
}

FieldElement trace_to(const FieldElement& x, const TowerField& target) {
    if (!target.is_prefix_of(*x.field()))
        throw usage_error("trace_to: target is not a sub-tower");
    FieldElement r = x;
    while (!r.field()->same_field(target)) r = trace_to_parent(r);
    return r;
}

FieldElement norm_to(const FieldElement& x, const TowerField& target) {
    if (!target.is_prefix_of(*x.field()))
        throw usage_error("norm_to: target is not a sub-tower");
    FieldElement r = x;
    while (!r.field()->same_field(target)) r = norm_to_parent(r);
    return r;
}

FieldElement descend_to(const FieldElement& x, const TowerPtr& target) {
    if (!target->is_prefix_of(*x.field()))
        throw usage_error("descend_to: target is not a sub-tower");
    FieldElement r = x;
    while (!r.field()->same_field(*target)) {
        const TowerField& L = *r.field();
        if (L.kind() == TowerField::Kind::Eisenstein) {
            auto digs = digits_to_parent(r);
            for (std::size_t j = 1; j < digs.size(); ++j)
                if (!digs[j].is_zero_to_prec())
                    throw domain_error("descend_to: element does not lie in the subfield "
                                       "(nonzero digit over the layer below)");
            r = digs[0];
        } else {
            const PrecSeries& s = r.repr();
            const TowerPtr& par = L.parent();
            const FqContext& Rp = par->residue_ctx();
            std::vector<Fq> c(s.coeffs().size());
            for (std::size_t i = 0; i < c.size(); ++i) {
                auto down = L.coeff_to_parent(s.coeffs()[i]);
                if (!down)
                    throw domain_error("descend_to: coefficient outside the residue subfield");
                c[i] = *down;
            }
            r = FieldElement(par, PrecSeries::from_coeffs(Rp, s.is_zero_to_prec() ? s.prec() : s.stored_low(), std::move(c), s.prec()));
        }
    }
    return r;
}

bool congruent_mod_val(const FieldElement& x, const FieldElement& y, const RationalVal& bound) {
    require_same_field(x, y);
    FieldElement d = x - y;
    RationalVal lb = d.val_lower_bound();
    if (lb >= bound) return true;
    if (d.is_zero_to_prec())
        throw insufficient_precision("congruence check: difference zero to a precision below the bound");
    return false;
}

} // namespace drinfeld
