#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blockscope/classifier.hpp"
#include "blockscope/probe.hpp"

namespace blockscope {

enum class Method { WebDnsPlusHostHeader, CoralCdn, SearchCache };
enum class CacheEngine { GoogleCache, Bing, InternetArchive };
enum class Outcome { Accessible, Blocked, Inconclusive };

std::string_view to_string(Method) noexcept;
std::string_view to_string(CacheEngine) noexcept;
std::string_view to_string(Outcome) noexcept;
Method parse_method(std::string_view);
CacheEngine parse_cache_engine(std::string_view);
Outcome parse_outcome(std::string_view);

inline constexpr std::string_view kCoralSuffix = ".nyud.net";

/// Appends the CoralCDN suffix to the host; nothing else changes.
TargetUrl coralize(const TargetUrl& target);

/// Inverse of coralize; nullopt when the host carries no CDN suffix.
std::optional<TargetUrl> strip_coral(const TargetUrl& target);

/// URL templates with a single "{URL}" placeholder, per engine. The defaults
/// are present-day shapes of each provider's cache URL.
struct CacheTemplates {
    std::map<CacheEngine, std::string> templates = {
        {CacheEngine::GoogleCache, "http://webcache.googleusercontent.com/search?q=cache:{URL}"},
        {CacheEngine::Bing, "http://cc.bingj.com/cache.aspx?url={URL}"},
        {CacheEngine::InternetArchive, "http://web.archive.org/web/{URL}"},
    };

    /// Throws ConfigInvalid unless every template has exactly one placeholder.
    void validate() const;
    bool operator==(const CacheTemplates&) const = default;
};

TargetUrl cache_url(const TargetUrl& target, CacheEngine engine, const CacheTemplates& templates = {});

/// Recovers the embedded target from a cache URL built by cache_url.
std::optional<TargetUrl> extract_cached(const TargetUrl& cached, CacheEngine engine,
                                        const CacheTemplates& templates = {});

/// A single GET to `address` with a chosen Host, recorded like the probe's HTTP step.
HttpStepResult host_header_fetch(Ipv4Address address, const std::string& host, const std::string& uri,
                                 const ProbeConfig& config);

struct CircumventConfig {
    std::vector<Method> methods = {Method::WebDnsPlusHostHeader, Method::CoralCdn, Method::SearchCache};
    CacheTemplates cache_templates;
    CacheEngine cache_engine = CacheEngine::GoogleCache;
    /// Out-of-band name lookups (a web DNS service's answers).
    std::map<std::string, Ipv4Address> host_ip_table;

    void validate() const;
};

struct CircumventionMatrix {
    std::vector<TargetUrl> targets;
    /// Keyed by TargetUrl::render(); every target has every enabled method.
    std::map<std::string, std::map<Method, Outcome>> cells;

    std::size_t count(Method m, Outcome o) const;
    bool operator==(const CircumventionMatrix&) const = default;
};

/// Tries every enabled method for every target through `censored`.
/// `clean_path`, when given, supplies reference lookups and digests.
CircumventionMatrix evaluate_matrix(const std::vector<TargetUrl>& targets, const CircumventConfig& config,
                                    const ProbeConfig& censored, const FingerprintSet& fingerprints,
                                    const ProbeConfig* clean_path = nullptr);

}  // namespace blockscope
