#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blockscope/model.hpp"
#include "blockscope/net.hpp"

namespace blockscope {

/// Which censor generation the emulator plays.
enum class Generation {
    PassThrough,  // forwards everything untouched
    Isp302,       // ISP-level: 302 to a warning host on a private address
    Ixp200,       // exchange-level: injected 200 carrying the warning page
};

std::string_view to_string(Generation) noexcept;
Generation parse_generation(std::string_view);

struct HostUriRule {
    std::string host_pattern;
    std::string uri_substring;

    bool operator==(const HostUriRule&) const = default;
};

std::string default_warning_body();

/// A local resolver at 10.0.0.53 plus the public five.
std::vector<ResolverSpec> default_resolver_map();

struct CensorPolicy {
    Generation generation = Generation::PassThrough;
    std::vector<std::string> dns_rules;
    std::vector<std::string> http_host_rules;
    std::vector<HostUriRule> http_host_uri_rules;
    std::vector<ResolverSpec> resolver_map = default_resolver_map();
    Ipv4Address redirect_host{10, 16, 6, 41};
    std::string warning_body = default_warning_body();
    std::string warning_last_modified = "Fri, 19 Apr 2013 00:00:00 GMT";
    bool keyword_portal_interception = false;
    std::string keyword_portal_host = "www.google.com";
    std::string pop_label = "Isb-Dhok-P2";
    std::string rule_id = "124";

    /// Throws PolicyInvalid naming the offending field.
    void validate() const;

    bool operator==(const CensorPolicy&) const = default;
};

/// Exact name, or "*." followed by a name.
bool is_valid_host_pattern(std::string_view pattern) noexcept;

/// True when every name matched by `inner` is also matched by `outer`.
bool pattern_covers(std::string_view outer, std::string_view inner) noexcept;

enum class OriginBehavior {
    Serve,      // 200 with per-host, per-path content
    Portal,     // 200 on "/", 404 elsewhere (a search portal)
    Blackhole,  // accepts, never answers
    Redirect,   // legitimate 301 to the https version of the same URL
};

struct OriginHost {
    std::string pattern;
    Ipv4Address address;
    OriginBehavior behavior = OriginBehavior::Serve;
    std::optional<std::string> body;  // default: derived from host and path

    bool operator==(const OriginHost&) const = default;
};

/// The uncensored world behind the censor: which names exist, where they
/// live and what they serve.
struct OriginZone {
    std::vector<OriginHost> hosts;
    std::optional<net::Endpoint> upstream_dns;  // consulted for names outside the zone

    /// First host whose pattern matches.
    const OriginHost* find(std::string_view host) const noexcept;

    /// Portal, CDN (*.nyud.net) and search-cache hosts used by circumvention tests.
    static OriginZone with_defaults();
    void add_defaults();

    bool operator==(const OriginZone&) const = default;
};

struct EmulatorSetup {
    CensorPolicy policy;
    OriginZone zone;
};

/// Parses policy JSON. Relative warning_body_file paths resolve against base_dir.
/// Throws PolicyInvalid.
EmulatorSetup load_policy(std::string_view json_text, const std::filesystem::path& base_dir = {});
EmulatorSetup load_policy_file(const std::filesystem::path& path);

}  // namespace blockscope
