#include "drinfeld/cache.hpp"

#include <cstdlib>
#include <json.hpp>

namespace drinfeld {

namespace {

constexpr const char* kMagic = "drinfeld-tower-cache";
constexpr int kVersion = 1;

nlohmann::json series_to_json(const PrecSeries& s) {
    nlohmann::json j;
    j["val"] = s.is_zero_to_prec() ? 0 : s.stored_low();
    if (s.is_exact())
        j["prec"] = "exact";
    else
        j["prec"] = s.prec();
    std::vector<std::uint32_t> c;
    for (const auto& x : s.coeffs()) c.push_back(x.value());
    j["coeffs"] = c;
    return j;
}

PrecSeries series_from_json(const FqContext& ctx, const nlohmann::json& j) {
    std::int64_t prec = kExactPrec;
    if (!(j.at("prec").is_string() && j.at("prec").get<std::string>() == "exact"))
        prec = j.at("prec").get<std::int64_t>();
    std::vector<Fq> c;
    for (auto v : j.at("coeffs").get<std::vector<std::uint32_t>>()) c.push_back(ctx.from_value(v));
    return PrecSeries::from_coeffs(ctx, j.at("val").get<std::int64_t>(), std::move(c), prec);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

std::string CacheKey::filename() const {
    std::ostringstream os;
    os << "tower_p" << p << "_s" << s << "_m0" << m0 << "_m" << m << "_prec" << prec_t << "_"
       << std::hex << fnv1a(module) << ".json";
    return os.str();
}

std::string cache_serialize(const ModulePtr& mod, const CacheKey& key, std::int64_t log_degree,
                            int r_level, std::int64_t r_degree) {
    nlohmann::json j;
    j["magic"] = kMagic;
    j["version"] = kVersion;
    j["key"] = {{"p", key.p},   {"s", key.s},           {"m0", key.m0},
                {"module", key.module}, {"m", key.m},   {"prec_t", key.prec_t}};
    nlohmann::json levels = nlohmann::json::array();
    for (int k = 1; k <= key.m; ++k) {
        const TowerPtr& Ek = mod->level(k);
        nlohmann::json layer;
        nlohmann::json mp = nlohmann::json::array();
        for (const auto& c : Ek->minpoly()) mp.push_back(series_to_json(c));
        layer["minpoly"] = mp;
        layer["embedding"] = series_to_json(Ek->parent_embedding());
        layer["e"] = Ek->e();
        layer["different"] = Ek->different_valuation().str();
        levels.push_back(layer);
    }
    j["levels"] = levels;
    if (log_degree >= 0) {
        TwistedSeries lam = mod->logarithm(log_degree);
        nlohmann::json lc = nlohmann::json::array();
        for (const auto& c : lam.coeffs()) lc.push_back(series_to_json(c.repr()));
        j["logarithm"] = {{"D", log_degree}, {"coeffs", lc}};
    }
    if (r_level >= 1) {
        TwistedSeries r = mod->compute_r(r_level, r_degree);
        nlohmann::json rc = nlohmann::json::array();
        for (const auto& c : r.coeffs()) rc.push_back(series_to_json(c.repr()));
        j["r"] = {{"n", r_level}, {"D", r_degree}, {"coeffs", rc}};
    }
    return j.dump(2) + "\n";
}

void cache_restore(const ModulePtr& mod, const CacheKey& key, const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw usage_error(std::string("cache: malformed JSON (") + e.what() + ")");
    }
    try {
        if (!j.contains("magic") || j["magic"] != kMagic)
            throw usage_error("cache: bad magic (not a tower cache file)");
        if (!j.contains("version") || j["version"] != kVersion)
            throw usage_error("cache: version mismatch; delete the cache (clean) and rebuild");
        const auto& jk = j.at("key");
        if (jk.at("p") != key.p || jk.at("s") != key.s || jk.at("m0") != key.m0 ||
            jk.at("module") != key.module || jk.at("m") != key.m || jk.at("prec_t") != key.prec_t)
            throw usage_error("cache: key mismatch");
        std::vector<TowerPtr> levels;
        TowerPtr parent = mod->H();
        for (const auto& layer : j.at("levels")) {
            const FqContext& ctx = parent->residue_ctx();
            std::vector<PrecSeries> mp;
            for (const auto& c : layer.at("minpoly")) mp.push_back(series_from_json(ctx, c));
            PrecSeries emb = series_from_json(ctx, layer.at("embedding"));
            TowerPtr Ek = TowerField::restore_eisenstein(parent, std::move(mp), std::move(emb));
            levels.push_back(Ek);
            parent = Ek;
        }
        mod->adopt_tower(levels);
    } catch (const nlohmann::json::exception& e) {
        throw usage_error(std::string("cache: missing or mistyped field (") + e.what() + ")");
    }
}

std::filesystem::path cache_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("DRINFELD_CACHE_DIR"); env && *env) return env;
    return ".drinfeld_cache";
}

} // namespace drinfeld
