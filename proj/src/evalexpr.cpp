#include "drinfeld/evalexpr.hpp"

#include <cctype>
#include <sstream>

namespace drinfeld {

namespace {

struct ExprParser {
    const std::string& s;
    std::size_t pos{0};
    const ModulePtr& mod;
    int m, n;
    TowerPtr L;

    ExprParser(const std::string& text, const ModulePtr& mod_, int m_, int n_)
        : s(text), mod(mod_), m(m_), n(n_) {
        mod->build_tower(m);
        L = mod->level(m);
    }

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw usage_error("expression parse error at position " + std::to_string(pos) + ": " + what);
    }

    std::string ident() {
        skip();
        std::size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        return s.substr(start, pos - start);
    }

    std::int64_t integer() {
        skip();
        bool neg = eat('-');
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (start == pos) fail("expected integer");
        std::int64_t v = std::stoll(s.substr(start, pos - start));
        return neg ? -v : v;
    }

    FieldElement sum() {
        skip();
        bool neg = false;
        if (eat('-')) neg = true;
        else eat('+');
        FieldElement r = term();
        if (neg) r = -r;
        while (true) {
            skip();
            if (eat('+')) r = r + term();
            else if (eat('-')) r = r - term();
            else break;
        }
        return r;
    }

    FieldElement term() {
        FieldElement r = factor();
        while (true) {
            skip();
            if (eat('*')) r = r * factor();
            else if (eat('/')) r = r / factor();
            else break;
        }
        return r;
    }

    FieldElement factor() {
        FieldElement base = atom();
        skip();
        if (eat('^')) return base.pow(integer());
        return base;
    }

    FieldElement atom() {
        skip();
        if (eat('(')) {
            FieldElement r = sum();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
            return L->from_int(integer());
        std::string id = ident();
        if (id.empty()) fail("expected value");
        skip();
        if (pos < s.size() && s[pos] == '(') return call(id);
        if (id == "t") return embed(mod->base()->uniformizer(), L);
        if (id.size() >= 2 && id[0] == 'v') {
            int k = std::stoi(id.substr(1));
            if (k < 1 || k > m) fail("torsion generator level out of range: " + id);
            return mod->generator_in(k, m);
        }
        fail("unknown identifier '" + id + "'");
    }

    FieldElement call(const std::string& fn) {
        if (!eat('(')) fail("expected '('");
        if (fn == "trace" || fn == "norm") {
            FieldElement x = sum();
            if (!eat(')')) fail("expected ')'");
            FieldElement r = fn == "trace" ? trace_to(x, *mod->base()) : norm_to(x, *mod->base());
            return embed(r, L);
        }
        if (fn == "lambda") {
            FieldElement x = sum();
            if (!eat(')')) fail("expected ')'");
            TwistedSeries lam = mod->logarithm(10);
            return tw_evaluate(lam, x);
        }
        if (fn == "rho") {
            // rho(a, x): a is a t-polynomial expression evaluated in K
            FieldElement a = sum();
            if (!eat(',')) fail("rho(a, x) expects two arguments");
            FieldElement x = sum();
            if (!eat(')')) fail("expected ')'");
            FieldElement aK = descend_to(a, mod->base());
            return tw_evaluate(mod->rho_of(aK.repr()), x);
        }
        if (fn == "r") {
            FieldElement x = sum();
            if (!eat(')')) fail("expected ')'");
            TwistedSeries r = compute_r_adaptive(*mod, n, 3);
            return tw_evaluate(r, x);
        }
        if (fn == "dlog") {
            FieldElement x = sum();
            if (!eat(')')) fail("expected ')'");
            DerivationContext ctx(mod, m, n);
            return ctx.dlog(x);
        }
        fail("unknown function '" + fn + "'");
    }

    // named-argument forms returning classes
    EvalResult top() {
        skip();
        if (s.compare(pos, 5, "pair(") == 0) {
            pos += 5;
            std::optional<FieldElement> alpha, beta;
            int level = n;
            while (true) {
                std::string key = ident();
                if (!eat('=')) fail("pair(...) expects name=value");
                if (key == "alpha") alpha = sum();
                else if (key == "beta") beta = sum();
                else if (key == "n") level = static_cast<int>(integer());
                else fail("unknown pair argument '" + key + "'");
                if (eat(')')) break;
                if (!eat(',')) fail("expected ',' or ')'");
            }
            if (!alpha || !beta) fail("pair needs alpha= and beta=");
            DerivationContext ctx(mod, m, level);
            EvalResult r;
            r.kind = EvalResult::Kind::Torsion;
            r.torsion = ctx.pairing(*alpha, *beta);
            return r;
        }
        if (s.compare(pos, 4, "chi(") == 0) {
            pos += 4;
            FieldElement u = sum();
            if (!eat(')')) fail("expected ')'");
            EvalResult r;
            r.kind = EvalResult::Kind::Residue;
            r.residue = chi_via_norm(*mod, L, m, n, u);
            return r;
        }
        EvalResult r;
        r.kind = EvalResult::Kind::Element;
        FieldElement x = sum();
        skip();
        if (pos != s.size()) fail("trailing input");
        // present base-field values in t when possible
        try {
            x = descend_to(x, mod->base());
        } catch (const domain_error&) {
        }
        r.element = x;
        return r;
    }
};

} // namespace

std::string EvalResult::describe() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::Element: {
        const FieldElement& x = *element;
        // elements of K print in t; deeper fields in pi
        bool in_K = x.field()->kind() == TowerField::Kind::Base;
        os << "value = " << x.repr().str(in_K ? "t" : "pi") << "\n";
        auto v = x.valuation();
        os << "mu = " << (v ? v->str() : (">= " + x.val_lower_bound().str() + " (zero to precision)"))
           << "\n";
        if (x.repr().is_exact())
            os << "precision: exact\n";
        else
            os << "precision: O(pi^" << x.repr().prec() << "), e = " << x.field()->e() << "\n";
        break;
    }
    case Kind::Torsion:
        os << "torsion class (level " << torsion->level() << "): residue = " << torsion->str()
           << "  [point rho_a(v_n) with a the residue]\n";
        break;
    case Kind::Residue:
        os << "residue class mod t^" << residue->modulus_exp() << ": " << residue->str() << "\n";
        break;
    }
    return os.str();
}

EvalResult eval_expression(const std::string& text, const ModulePtr& mod, int m, int n) {
    ExprParser p(text, mod, m, n);
    EvalResult r = p.top();
    return r;
}

} // namespace drinfeld
