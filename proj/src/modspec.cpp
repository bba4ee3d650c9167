#include "drinfeld/modspec.hpp"

#include <cctype>
#include <map>
#include <sstream>

namespace drinfeld {

namespace {

// Tiny recursive-descent parser for the rho_t grammar: sums/products/powers
// of integers, t and tau, with tau commuting formally (the grammar writes
// sum_i c_i(t) tau^i). A value is a map tau-degree -> t-polynomial over Z.
struct TPoly {
    std::vector<std::int64_t> c; // c[i] = coefficient of t^i
    static TPoly constant(std::int64_t v) { return TPoly{{v}}; }
    bool is_zero() const {
        for (auto x : c)
            if (x) return false;
        return true;
    }
};

TPoly add(const TPoly& a, const TPoly& b) {
    TPoly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), 0);
    for (std::size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
    return r;
}

TPoly mul(const TPoly& a, const TPoly& b) {
    TPoly r;
    if (a.c.empty() || b.c.empty()) return r;
    r.c.resize(a.c.size() + b.c.size() - 1, 0);
    for (std::size_t i = 0; i < a.c.size(); ++i)
        for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

using TauPoly = std::map<std::int64_t, TPoly>;

TauPoly tp_add(const TauPoly& a, const TauPoly& b) {
    TauPoly r = a;
    for (const auto& [k, v] : b) {
        auto it = r.find(k);
        if (it == r.end())
            r.emplace(k, v);
        else
            it->second = add(it->second, v);
    }
    return r;
}

TauPoly tp_mul(const TauPoly& a, const TauPoly& b) {
    TauPoly r;
    for (const auto& [ka, va] : a)
        for (const auto& [kb, vb] : b) {
            TPoly prod = mul(va, vb);
            auto it = r.find(ka + kb);
            if (it == r.end())
                r.emplace(ka + kb, prod);
            else
                it->second = add(it->second, prod);
        }
    return r;
}

TauPoly tp_neg(const TauPoly& a) {
    TauPoly r = a;
    for (auto& [k, v] : r)
        for (auto& x : v.c) x = -x;
    return r;
}

struct RhoParser {
    const std::string& s;
    std::size_t pos{0};

    explicit RhoParser(const std::string& text) : s(text) {}

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
        throw usage_error("rho_t parse error at position " + std::to_string(pos) + ": " + what);
    }

    TauPoly parse() {
        TauPoly r = sum();
        skip();
        if (pos != s.size()) fail("trailing input");
        return r;
    }

    TauPoly sum() {
        skip();
        bool neg = false;
        if (eat('-')) neg = true;
        else eat('+');
        TauPoly r = term();
        if (neg) r = tp_neg(r);
        while (true) {
            skip();
            if (eat('+')) r = tp_add(r, term());
            else if (eat('-')) r = tp_add(r, tp_neg(term()));
            else break;
        }
        return r;
    }

    TauPoly term() {
        TauPoly r = factor();
        while (true) {
            skip();
            if (eat('*')) {
                r = tp_mul(r, factor());
            } else if (pos < s.size() && (s[pos] == '(' || std::isalnum(static_cast<unsigned char>(s[pos])))) {
                r = tp_mul(r, factor()); // juxtaposition
            } else {
                break;
            }
        }
        return r;
    }

    TauPoly factor() {
        TauPoly base = atom();
        skip();
        if (eat('^')) {
            skip();
            std::int64_t e = integer();
            if (e < 0) fail("negative exponent");
            TauPoly r{{0, TPoly::constant(1)}};
            for (std::int64_t i = 0; i < e; ++i) r = tp_mul(r, base);
            return r;
        }
        return base;
    }

    std::int64_t integer() {
        skip();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (start == pos) fail("expected integer");
        return std::stoll(s.substr(start, pos - start));
    }

    TauPoly atom() {
        skip();
        if (eat('(')) {
            TauPoly r = sum();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
            return TauPoly{{0, TPoly::constant(integer())}};
        if (s.compare(pos, 3, "tau") == 0) {
            pos += 3;
            return TauPoly{{1, TPoly::constant(1)}};
        }
        if (pos < s.size() && s[pos] == 't') {
            ++pos;
            return TauPoly{{0, TPoly{{0, 1}}}};
        }
        fail("expected number, 't', 'tau' or '('");
    }
};

std::map<std::string, std::string> parse_kv(const std::string& inner) {
    std::map<std::string, std::string> kv;
    std::size_t i = 0;
    while (i < inner.size()) {
        while (i < inner.size() && (std::isspace(static_cast<unsigned char>(inner[i])) || inner[i] == ','))
            ++i;
        if (i >= inner.size()) break;
        std::size_t eq = inner.find('=', i);
        if (eq == std::string::npos) throw usage_error("module spec: expected key=value");
        std::string key = inner.substr(i, eq - i);
        while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
        i = eq + 1;
        while (i < inner.size() && std::isspace(static_cast<unsigned char>(inner[i]))) ++i;
        std::string val;
        if (i < inner.size() && inner[i] == '"') {
            std::size_t close = inner.find('"', i + 1);
            if (close == std::string::npos) throw usage_error("module spec: unterminated string");
            val = inner.substr(i + 1, close - i - 1);
            i = close + 1;
        } else {
            std::size_t j = i;
            while (j < inner.size() && inner[j] != ',') ++j;
            val = inner.substr(i, j - i);
            while (!val.empty() && std::isspace(static_cast<unsigned char>(val.back()))) val.pop_back();
            i = j;
        }
        kv[key] = val;
    }
    return kv;
}

} // namespace

ModuleSpec parse_module_spec(const std::string& text) {
    ModuleSpec spec;
    std::size_t open = text.find('(');
    std::string name = open == std::string::npos ? text : text.substr(0, open);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
    std::map<std::string, std::string> kv;
    if (open != std::string::npos) {
        std::size_t close = text.rfind(')');
        if (close == std::string::npos || close < open)
            throw usage_error("module spec: unbalanced parentheses");
        kv = parse_kv(text.substr(open + 1, close - open - 1));
    }
    if (name == "carlitz") {
        spec.kind = "carlitz";
    } else if (name == "custom") {
        spec.kind = "custom";
        auto it = kv.find("rho_t");
        if (it == kv.end()) throw usage_error("custom module spec needs rho_t=\"...\"");
        spec.rho_t_text = it->second;
        TauPoly tp = RhoParser(spec.rho_t_text).parse();
        std::int64_t top = tp.empty() ? -1 : tp.rbegin()->first;
        if (top < 0) throw usage_error("custom module: empty rho_t");
        spec.rho_t_coeffs.assign(static_cast<std::size_t>(top) + 1, {});
        for (const auto& [k, v] : tp) {
            if (k < 0) throw usage_error("custom module: negative tau power");
            spec.rho_t_coeffs[static_cast<std::size_t>(k)] = v.c;
        }
    } else {
        throw usage_error("unknown module kind '" + name + "' (expected carlitz or custom)");
    }
    if (auto it = kv.find("p"); it != kv.end()) spec.p = static_cast<std::uint32_t>(std::stoul(it->second));
    if (auto it = kv.find("s"); it != kv.end()) spec.s = static_cast<std::uint32_t>(std::stoul(it->second));
    return spec;
}

std::string ModuleSpec::canonical(std::uint32_t p_eff, std::uint32_t s_eff) const {
    std::ostringstream os;
    if (kind == "carlitz") {
        os << "carlitz(p=" << p_eff << ",s=" << s_eff << ")";
    } else {
        os << "custom(rho_t=\"" << rho_t_text << "\",p=" << p_eff << ",s=" << s_eff << ")";
    }
    return os.str();
}

ModulePtr instantiate_module(const ModuleSpec& spec, std::uint32_t p, std::uint32_t s,
                             std::uint32_t m0, std::int64_t prec_t) {
    if (spec.p && p && spec.p != p)
        throw usage_error("module spec p disagrees with the --p flag");
    if (spec.s && s && spec.s != s)
        throw usage_error("module spec s disagrees with the --s flag");
    std::uint32_t pe = spec.p ? spec.p : p;
    std::uint32_t se = spec.s ? spec.s : (s ? s : 1);
    if (!pe) throw usage_error("module spec: p is required (flag or spec argument)");

    TowerPtr K = TowerField::make_base(pe, se, prec_t);
    const FqContext& R = K->residue_ctx();
    // the smallest unramified base with m0 | [H:K]
    TowerPtr H = m0 > 1 ? K->extend_unramified(m0) : K;
    PrecSeries eta = PrecSeries::monomial(R, R.one(), m0);

    if (spec.kind == "carlitz") {
        TwistedSeries rho_t(H, {embed(K->uniformizer(), H), H->one()});
        return DrinfeldModule::make(H, std::move(rho_t), m0, std::move(eta),
                                    spec.canonical(pe, se));
    }
    std::vector<FieldElement> coeffs;
    for (const auto& poly : spec.rho_t_coeffs) {
        std::vector<Fq> c;
        for (auto v : poly) c.push_back(R.from_int(v));
        coeffs.push_back(embed(K->from_series(PrecSeries::from_coeffs(R, 0, std::move(c))), H));
    }
    TwistedSeries rho_t(H, std::move(coeffs));
    return DrinfeldModule::make(H, std::move(rho_t), m0, std::move(eta),
                                spec.canonical(pe, se));
}

} // namespace drinfeld
