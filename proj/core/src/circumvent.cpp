#include "blockscope/circumvent.hpp"

#include "blockscope/error.hpp"
#include "blockscope/worker_pool.hpp"

namespace blockscope {
namespace {

constexpr std::string_view kPlaceholder = "{URL}";

std::pair<std::string_view, std::string_view> split_template(std::string_view tpl) {
    const auto pos = tpl.find(kPlaceholder);
    return {tpl.substr(0, pos), tpl.substr(pos + kPlaceholder.size())};
}

const std::string& template_for(const CacheTemplates& templates, CacheEngine engine) {
    auto it = templates.templates.find(engine);
    if (it == templates.templates.end())
        throw ConfigInvalid("no cache template for " + std::string(to_string(engine)));
    return it->second;
}

struct Fetched {
    std::optional<HttpObservation> observation;
    bool dns_blocked = false;
};

// Resolves `host` through the censored path, falling back to nothing; the
// clean path's answer (if any) decides whether an NXDOMAIN is tampering.
std::optional<Ipv4Address> resolve_censored(const std::string& host, const ProbeConfig& censored,
                                            const ProbeConfig* clean_path, bool& blocked) {
    const DnsObservation obs = query_resolver(censored.resolvers.front(), host, censored);
    std::optional<std::vector<Ipv4Address>> reference;
    if (clean_path) {
        const DnsObservation ref = query_resolver(clean_path->resolvers.front(), host, *clean_path);
        reference = genuine_addresses(std::span(&ref, 1), *clean_path);
    }
    if (classify_dns(obs, censored.resolvers, reference)) {
        blocked = true;
        return std::nullopt;
    }
    const auto addrs = genuine_addresses(std::span(&obs, 1), censored);
    if (addrs.empty()) return std::nullopt;
    return addrs.front();
}

std::optional<std::string> reference_digest(const TargetUrl& t, std::optional<Ipv4Address> address,
                                            const ProbeConfig* clean_path) {
    if (!clean_path) return std::nullopt;
    if (!address) {
        const DnsObservation ref = query_resolver(clean_path->resolvers.front(), t.host, *clean_path);
        const auto addrs = genuine_addresses(std::span(&ref, 1), *clean_path);
        if (addrs.empty()) return std::nullopt;
        address = addrs.front();
    }
    auto res = http_step(t, *address, *clean_path);
    if (!res.observation) return std::nullopt;
    return res.observation->body_digest;
}

Outcome judge(const HttpStepResult& fetched, const FingerprintSet& fingerprints,
              const std::optional<std::string>& reference) {
    if (!fetched.observation) return Outcome::Inconclusive;
    try {
        return classify_http(*fetched.observation, fingerprints, reference) ? Outcome::Blocked : Outcome::Accessible;
    } catch (const AmbiguousEvidence&) {
        return Outcome::Inconclusive;
    }
}

Outcome via_transformed_url(const TargetUrl& url, const ProbeConfig& censored, const FingerprintSet& fingerprints,
                            const ProbeConfig* clean_path) {
    bool blocked = false;
    const auto address = resolve_censored(url.host, censored, clean_path, blocked);
    if (blocked) return Outcome::Blocked;
    if (!address) return Outcome::Inconclusive;
    return judge(http_step(url, *address, censored), fingerprints, reference_digest(url, std::nullopt, clean_path));
}

}  // namespace

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::WebDnsPlusHostHeader: return "WebDnsPlusHostHeader";
        case Method::CoralCdn: return "CoralCdn";
        case Method::SearchCache: return "SearchCache";
    }
    return "?";
}

std::string_view to_string(CacheEngine e) noexcept {
    switch (e) {
        case CacheEngine::GoogleCache: return "GoogleCache";
        case CacheEngine::Bing: return "Bing";
        case CacheEngine::InternetArchive: return "InternetArchive";
    }
    return "?";
}

std::string_view to_string(Outcome o) noexcept {
    switch (o) {
        case Outcome::Accessible: return "Accessible";
        case Outcome::Blocked: return "Blocked";
        case Outcome::Inconclusive: return "Inconclusive";
    }
    return "?";
}

Method parse_method(std::string_view text) {
    for (auto m : {Method::WebDnsPlusHostHeader, Method::CoralCdn, Method::SearchCache})
        if (to_string(m) == text) return m;
    throw FormatError("unknown method '" + std::string(text) + "'");
}

CacheEngine parse_cache_engine(std::string_view text) {
    for (auto e : {CacheEngine::GoogleCache, CacheEngine::Bing, CacheEngine::InternetArchive})
        if (to_string(e) == text) return e;
    throw FormatError("unknown cache engine '" + std::string(text) + "'");
}

Outcome parse_outcome(std::string_view text) {
    for (auto o : {Outcome::Accessible, Outcome::Blocked, Outcome::Inconclusive})
        if (to_string(o) == text) return o;
    throw FormatError("unknown outcome '" + std::string(text) + "'");
}

TargetUrl coralize(const TargetUrl& target) {
    TargetUrl out = target;
    out.host += kCoralSuffix;
    out.raw = out.render();
    return out;
}

std::optional<TargetUrl> strip_coral(const TargetUrl& target) {
    if (target.host.size() <= kCoralSuffix.size() || !target.host.ends_with(kCoralSuffix)) return std::nullopt;
    TargetUrl out = target;
    out.host.resize(out.host.size() - kCoralSuffix.size());
    out.raw = out.render();
    return out;
}

void CacheTemplates::validate() const {
    for (const auto& [engine, tpl] : templates) {
        const auto first = tpl.find(kPlaceholder);
        if (first == std::string::npos || tpl.find(kPlaceholder, first + 1) != std::string::npos)
            throw ConfigInvalid("cache template for " + std::string(to_string(engine)) +
                                " must contain exactly one {URL}");
        try {
            parse_target(std::string(tpl.substr(0, first)) + "http://example.com/" + tpl.substr(first + kPlaceholder.size()));
        } catch (const MalformedUrl&) {
            throw ConfigInvalid("cache template for " + std::string(to_string(engine)) + " does not form a URL");
        }
    }
}

TargetUrl cache_url(const TargetUrl& target, CacheEngine engine, const CacheTemplates& templates) {
    const auto [prefix, suffix] = split_template(template_for(templates, engine));
    return parse_target(std::string(prefix) + target.render() + std::string(suffix));
}

std::optional<TargetUrl> extract_cached(const TargetUrl& cached, CacheEngine engine, const CacheTemplates& templates) {
    const auto [prefix, suffix] = split_template(template_for(templates, engine));
    const std::string text = cached.render();
    if (text.size() < prefix.size() + suffix.size() || !std::string_view(text).starts_with(prefix) ||
        !std::string_view(text).ends_with(suffix))
        return std::nullopt;
    try {
        return parse_target(std::string_view(text).substr(prefix.size(), text.size() - prefix.size() - suffix.size()));
    } catch (const MalformedUrl&) {
        return std::nullopt;
    }
}

HttpStepResult host_header_fetch(Ipv4Address address, const std::string& host, const std::string& uri,
                                 const ProbeConfig& config) {
    return fetch_with_host(address, host, uri, config);
}

void CircumventConfig::validate() const {
    cache_templates.validate();
    if (!cache_templates.templates.contains(cache_engine))
        throw ConfigInvalid("no cache template for " + std::string(to_string(cache_engine)));
}

std::size_t CircumventionMatrix::count(Method m, Outcome o) const {
    std::size_t n = 0;
    for (const auto& [_, row] : cells) {
        auto it = row.find(m);
        if (it != row.end() && it->second == o) ++n;
    }
    return n;
}

CircumventionMatrix evaluate_matrix(const std::vector<TargetUrl>& targets, const CircumventConfig& config,
                                    const ProbeConfig& censored, const FingerprintSet& fingerprints,
                                    const ProbeConfig* clean_path) {
    config.validate();
    censored.validate();
    if (clean_path) clean_path->validate();

    auto rows = parallel_map<std::map<Method, Outcome>>(targets.size(), censored.workers, [&](std::size_t i) {
        const TargetUrl& t = targets[i];
        std::map<Method, Outcome> row;
        for (Method m : config.methods) {
            Outcome outcome = Outcome::Inconclusive;
            switch (m) {
                case Method::WebDnsPlusHostHeader: {
                    auto it = config.host_ip_table.find(t.host);
                    if (it == config.host_ip_table.end()) break;
                    const std::string host = t.port ? t.host + ":" + std::to_string(*t.port) : t.host;
                    outcome = judge(host_header_fetch(it->second, host, t.request_uri(), censored), fingerprints,
                                    reference_digest(t, it->second, clean_path));
                    break;
                }
                case Method::CoralCdn:
                    outcome = via_transformed_url(coralize(t), censored, fingerprints, clean_path);
                    break;
                case Method::SearchCache:
                    outcome = via_transformed_url(cache_url(t, config.cache_engine, config.cache_templates), censored,
                                                  fingerprints, clean_path);
                    break;
            }
            row[m] = outcome;
        }
        return row;
    });

    CircumventionMatrix out;
    out.targets = targets;
    for (std::size_t i = 0; i < targets.size(); ++i) out.cells[targets[i].render()] = std::move(rows[i]);
    return out;
}

}  // namespace blockscope
