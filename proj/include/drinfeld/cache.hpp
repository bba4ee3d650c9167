#pragma once

#include <filesystem>

#include "drinfeld/modspec.hpp"

namespace drinfeld {

/// Versioned tower cache: layer descriptions, embedding series, minimal
/// polynomials, logarithm coefficients and r_n, keyed by
/// (p, s, module spec, m0, m, prec_t). Reload is bit-exact: the stored
/// embedding series are installed verbatim (after consistency checks), so a
/// rebuilt cache file is byte-identical.
struct CacheKey {
    std::uint32_t p{0}, s{1}, m0{1};
    std::string module; // canonical spec string
    int m{0};
    std::int64_t prec_t{0};
    std::string filename() const; // deterministic name under the cache dir
};

/// Serialize the module's built tower (levels 1..m), logarithm to the given
/// tau-degree, and optionally r_n. Returns the JSON text (callers write it).
std::string cache_serialize(const ModulePtr& mod, const CacheKey& key, std::int64_t log_degree,
                            int r_level, std::int64_t r_degree);

/// Parse + verify a cache file's content and install the tower into `mod`
/// (which must be freshly built from the same key). Throws usage_error on
/// magic/version mismatch or corruption.
void cache_restore(const ModulePtr& mod, const CacheKey& key, const std::string& json_text);

/// Resolve the cache directory: --cache-dir flag value if nonempty, else
/// DRINFELD_CACHE_DIR, else ".drinfeld_cache".
std::filesystem::path cache_dir(const std::string& flag_value);

} // namespace drinfeld
