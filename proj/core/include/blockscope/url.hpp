#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace blockscope {

enum class Scheme { Http, Https };

std::string_view to_string(Scheme s) noexcept;

/// A normalized test-list entry.
///
/// The host is lowercased, the path always starts with '/', fragments are
/// dropped. `raw` keeps the text the entry was parsed from and takes no part
/// in equality.
struct TargetUrl {
    std::string raw;
    Scheme scheme = Scheme::Http;
    std::string host;
    std::optional<std::uint16_t> port;
    std::string path = "/";
    std::optional<std::string> query;

    /// Canonical text form: scheme://host[:port]path[?query]
    std::string render() const;

    /// Request-target as sent on the wire (path plus query).
    std::string request_uri() const;

    bool operator==(const TargetUrl& other) const noexcept;
};

/// Throws MalformedUrl when no host can be extracted. Missing scheme means
/// http, missing path means "/".
TargetUrl parse_target(std::string_view raw);

/// Lowercase, trailing-dot-free, syntactically valid DNS name (or IPv4 literal).
bool is_valid_hostname(std::string_view host) noexcept;

/// Host pattern used by blocklists and collapse sets: exact name, or
/// "*.suffix" matching strict subdomains of suffix.
bool host_matches_pattern(std::string_view host, std::string_view pattern) noexcept;

/// True when host equals domain or is a subdomain of it.
bool host_within_domain(std::string_view host, std::string_view domain) noexcept;

std::string to_lower(std::string_view s);

}  // namespace blockscope
