// Command-line driver: tower/module cache management, verification campaigns
// over the reciprocity identities, and ad-hoc evaluation.
//
// Exit codes: 0 success, 1 check failure, 2 usage/parse/cache error,
// 3 insufficient precision, 4 internal error.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>

#include "drinfeld/cache.hpp"
#include "drinfeld/evalexpr.hpp"
#include "drinfeld/reciprocity.hpp"

using namespace drinfeld;

namespace {

struct Config {
    std::uint32_t p{0}, s{1}, m0{1};
    std::string module{"carlitz"};
    int n{1}, m{1};
    std::int64_t prec{0}; // 0 = derive from (n, m)
    int samples{20};
    std::uint64_t seed{1};
    std::string out;
    std::string cache_dir_flag;
    std::string suite{"all"};
};

void add_common(CLI::App* cmd, Config& cfg) {
    cmd->add_option("--p", cfg.p, "characteristic p (prime)");
    cmd->add_option("--s", cfg.s, "residue degree s (q = p^s)");
    cmd->add_option("--module", cfg.module, "module spec: carlitz | custom(rho_t=\"...\")");
    cmd->add_option("--m0", cfg.m0, "m0 (eta = t^{m0})");
    cmd->add_option("--n", cfg.n, "pairing level n");
    cmd->add_option("--m", cfg.m, "tower depth m (L = E^m)");
    cmd->add_option("--prec", cfg.prec, "t-precision override");
    cmd->add_option("--samples", cfg.samples, "samples per check");
    cmd->add_option("--seed", cfg.seed, "campaign seed");
    cmd->add_option("--out", cfg.out, "JSONL report path");
    cmd->add_option("--cache-dir", cfg.cache_dir_flag, "cache directory (or DRINFELD_CACHE_DIR)");
}

std::int64_t effective_prec(const Config& cfg) {
    if (cfg.prec > 0) return cfg.prec;
    return std::max<std::int64_t>(24, required_prec_t(cfg.n, cfg.m, cfg.m0) + 10);
}

void validate(const Config& cfg, std::int64_t prec) {
    if (cfg.n < 1 || cfg.m < cfg.n) throw usage_error("need 1 <= n <= m");
    if (cfg.samples < 1) throw usage_error("samples must be >= 1");
    // desk-scale budget: q^{m m0} * prec bounded
    double q = 1;
    for (std::uint32_t i = 0; i < cfg.s; ++i) q *= cfg.p;
    double cost = std::pow(q, static_cast<double>(cfg.m) * cfg.m0) * static_cast<double>(prec);
    if (cost > 5e6)
        throw insufficient_precision("configuration exceeds the desk-scale budget "
                                     "(q^{m m0} * prec too large)");
}

ModulePtr build_module(const Config& cfg, std::int64_t prec) {
    ModuleSpec spec = parse_module_spec(cfg.module);
    return instantiate_module(spec, cfg.p, cfg.s, cfg.m0, prec);
}

CacheKey make_key(const Config& cfg, const ModulePtr& mod, std::int64_t prec) {
    CacheKey key;
    key.p = mod->H()->base_p();
    key.s = mod->H()->base_s();
    key.m0 = cfg.m0;
    key.module = mod->spec_string();
    key.m = cfg.m;
    key.prec_t = prec;
    return key;
}

/// Build the tower, reloading from the cache when a matching file exists.
ModulePtr load_or_build(const Config& cfg, std::int64_t prec, bool write_cache) {
    ModulePtr mod = build_module(cfg, prec);
    CacheKey key = make_key(cfg, mod, prec);
    auto dir = cache_dir(cfg.cache_dir_flag);
    auto path = dir / key.filename();
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        cache_restore(mod, key, text);
        return mod;
    }
    mod->build_tower(cfg.m);
    if (write_cache) {
        std::filesystem::create_directories(dir);
        std::ofstream out(path, std::ios::binary);
        out << cache_serialize(mod, key, 8, cfg.n, 1);
    }
    return mod;
}

int cmd_build(const Config& cfg) {
    std::int64_t prec = effective_prec(cfg);
    validate(cfg, prec);
    ModulePtr mod = load_or_build(cfg, prec, true);
    std::cout << "module: " << mod->spec_string() << "  (q = " << mod->q() << ", m0 = " << mod->m0()
              << ", prec_t = " << prec << ")\n";
    for (int k = 1; k <= cfg.m; ++k) {
        const TowerPtr& Ek = mod->level(k);
        Thresholds th = Thresholds::compute(*Ek, cfg.n, mod->m0());
        std::cout << "e(E^" << k << "|K) = " << Ek->e()
                  << ", [E^" << k << ":K] = " << Ek->degree()
                  << ", mu(D) = " << Ek->different_valuation().str()
                  << ", X_L1 = " << th.x_L1.str() << ", X^(n) = " << th.x_n.str()
                  << ", alpha_bound = " << th.alpha_bound.str() << "\n";
    }
    auto dir = cache_dir(cfg.cache_dir_flag);
    std::cout << "cache: " << (dir / make_key(cfg, mod, prec).filename()).string() << "\n";
    return 0;
}

void write_report(const Config& cfg, const std::vector<Report>& reports) {
    if (cfg.out.empty()) return;
    std::ofstream out(cfg.out, std::ios::binary);
    for (const auto& rep : reports)
        for (const auto& rec : rep.records) out << checkrecord_json(rec) << "\n";
}

int cmd_verify(const Config& cfg) {
    std::int64_t prec = effective_prec(cfg);
    validate(cfg, prec);
    ModulePtr mod = load_or_build(cfg, prec, true);
    std::vector<Report> reports;
    auto want = [&](const std::string& name) { return cfg.suite == "all" || cfg.suite == name; };
    if (want("corollary"))
        reports.push_back(verify_corollary(mod, cfg.n, cfg.m, cfg.samples, cfg.seed));
    if (want("steinberg"))
        reports.push_back(verify_steinberg(mod, cfg.n, cfg.m, cfg.samples, cfg.seed));
    if (want("functorial")) {
        Config c2 = cfg;
        c2.m = cfg.m + 1; // functoriality needs a strictly larger field
        validate(c2, prec);
        reports.push_back(verify_functoriality(mod, cfg.n, cfg.m, cfg.m + 1, cfg.samples, cfg.seed));
    }
    if (want("chi-twist")) {
        const TowerPtr& H = mod->H();
        TwistedSeries rtw(H, {H->one(), embed(mod->base()->uniformizer(), H)}); // 1 + t tau
        reports.push_back(verify_chi_twist(mod, rtw, cfg.n, cfg.m, cfg.samples, cfg.seed));
    }
    if (want("uniqueness"))
        reports.push_back(verify_uniqueness(mod, cfg.n, cfg.m, std::max(cfg.samples, 50), cfg.seed));
    if (want("thresholds"))
        reports.push_back(verify_thresholds(mod, cfg.m, cfg.samples, cfg.seed));
    if (reports.empty())
        throw usage_error("unknown suite '" + cfg.suite +
                          "' (corollary|steinberg|functorial|chi-twist|uniqueness|thresholds|all)");
    write_report(cfg, reports);
    bool all = true;
    for (const auto& rep : reports) {
        std::size_t passc = 0;
        for (const auto& r : rep.records) passc += r.pass ? 1 : 0;
        std::cout << "suite " << rep.suite << ": " << passc << "/" << rep.records.size()
                  << (rep.passed ? " pass" : " FAIL") << "\n";
        all = all && rep.passed;
    }
    return all ? 0 : 1;
}

int cmd_eval(const Config& cfg, const std::string& expr) {
    std::int64_t prec = effective_prec(cfg);
    validate(cfg, prec);
    ModulePtr mod = build_module(cfg, prec);
    EvalResult r = eval_expression(expr, mod, cfg.m, cfg.n);
    std::cout << r.describe();
    return 0;
}

int cmd_clean(const Config& cfg) {
    auto dir = cache_dir(cfg.cache_dir_flag);
    if (!std::filesystem::exists(dir)) return 0;
    int removed = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("tower_", 0) == 0 && entry.path().extension() == ".json") {
            std::filesystem::remove(entry.path());
            ++removed;
        }
    }
    std::cout << "removed " << removed << " cache file(s) from " << dir.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact Drinfeld-module arithmetic and reciprocity-law verification"};
    app.require_subcommand(1);
    app.fallthrough();
    Config cfg;
    // global options so they can come from the command line or a plain
    // key=value config file (flags take precedence over the file)
    add_common(&app, cfg);
    app.set_config("--config", "", "key=value configuration file");

    CLI::App* b = app.add_subcommand("build", "build towers and write the cache");
    CLI::App* v = app.add_subcommand("verify", "run a verification campaign");
    v->add_option("--suite", cfg.suite,
                  "corollary|steinberg|functorial|chi-twist|uniqueness|thresholds|all");
    CLI::App* e = app.add_subcommand("eval", "evaluate an expression in E^m");
    std::string expr;
    e->add_option("expr", expr, "expression")->required();
    CLI::App* c = app.add_subcommand("clean", "remove cache files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        return app.exit(ex) ? 2 : 0;
    }

    try {
        if (b->parsed()) return cmd_build(cfg);
        if (v->parsed()) return cmd_verify(cfg);
        if (e->parsed()) return cmd_eval(cfg, expr);
        if (c->parsed()) return cmd_clean(cfg);
    } catch (const insufficient_precision& ex) {
        std::cerr << "insufficient precision: " << ex.what() << "\n";
        return 3;
    } catch (const usage_error& ex) {
        std::cerr << "usage error: " << ex.what() << "\n";
        return 2;
    } catch (const domain_error& ex) {
        std::cerr << "domain error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "internal error: " << ex.what() << "\n";
        return 4;
    }
    return 2;
}
