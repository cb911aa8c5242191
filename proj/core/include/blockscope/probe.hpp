#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blockscope/dataset.hpp"
#include "blockscope/model.hpp"
#include "blockscope/net.hpp"

namespace blockscope {

struct ProbeTimeouts {
    net::Millis dns{5000};
    net::Millis tcp{5000};
    net::Millis http{10000};

    bool operator==(const ProbeTimeouts&) const = default;
};

struct ProbeConfig {
    /// Local resolver first, then the public ones.
    std::vector<ResolverSpec> resolvers;
    TargetUrl keyword_portal = parse_target("http://www.google.com");
    ProbeTimeouts timeouts;
    int retries = 2;
    std::size_t workers = 8;
    /// True addresses for hosts whose lookups are tampered with.
    std::map<std::string, Ipv4Address> host_overrides;
    /// Where logical destinations are actually dialled (emulator, lab network).
    net::EndpointMap endpoints;
    std::uint16_t http_port = 80;

    /// Throws ConfigInvalid.
    void validate() const;
};

/// `local` followed by the five public resolvers.
std::vector<ResolverSpec> default_resolvers(Ipv4Address local);

/// First nameserver listed in a resolv.conf-style file, if any.
std::optional<Ipv4Address> system_resolver(const std::string& resolv_conf = "/etc/resolv.conf");

struct ErrorRecord {
    std::string step;    // "dns", "keyword", "http"
    std::string detail;

    bool operator==(const ErrorRecord&) const = default;
};

struct TargetProbeResult {
    TargetUrl target;
    std::vector<DnsObservation> dns;
    std::vector<TcpObservation> tcp;
    std::optional<HttpObservation> keyword;  // absent: step inconclusive
    std::optional<HttpObservation> http;
    std::vector<ErrorRecord> errors;

    bool reportable() const noexcept { return errors.empty(); }
    bool operator==(const TargetProbeResult&) const = default;
};

struct HttpStepResult {
    std::optional<HttpObservation> observation;
    std::optional<ErrorRecord> error;
};

/// One A lookup of `qname` against `resolver`, retried on timeout.
DnsObservation query_resolver(const ResolverSpec& resolver, const std::string& qname, const ProbeConfig& config);

/// One observation per configured resolver, in resolver order.
std::vector<DnsObservation> dns_step(const TargetUrl& target, const ProbeConfig& config);

/// One observation per address; connections are closed right after the handshake.
std::vector<TcpObservation> tcp_step(std::span<const Ipv4Address> addresses, const ProbeConfig& config,
                                     std::uint16_t port = 80);

/// GET "/" + target URL on the keyword portal. `portal_address` skips the portal lookup.
HttpStepResult keyword_step(const TargetUrl& target, const ProbeConfig& config,
                            std::optional<Ipv4Address> portal_address = std::nullopt);

/// GET target path from `resolved` with Host: target host. Redirects are recorded, not followed.
HttpStepResult http_step(const TargetUrl& target, Ipv4Address resolved, const ProbeConfig& config);

/// Same request shape as http_step with an arbitrary Host and URI.
HttpStepResult fetch_with_host(Ipv4Address address, const std::string& host, const std::string& uri,
                               const ProbeConfig& config);

/// Answers from successful lookups, minus any known NXDOMAIN-redirector address, deduplicated in order.
std::vector<Ipv4Address> genuine_addresses(std::span<const DnsObservation> dns, const ProbeConfig& config);

/// Portal address from host_overrides or the first genuine lookup.
std::optional<Ipv4Address> resolve_portal(const ProbeConfig& config);

TargetProbeResult run_target(const TargetUrl& target, const ProbeConfig& config,
                             std::optional<Ipv4Address> portal_address = std::nullopt);

struct CampaignSummary {
    std::size_t targets = 0;
    std::size_t reportable = 0;
    std::size_t error_logged = 0;

    bool operator==(const CampaignSummary&) const = default;
};

struct CampaignResult {
    std::vector<TargetProbeResult> results;  // input order
    CampaignSummary summary;
};

/// One pass over `targets`. Throws ConfigInvalid only.
CampaignResult run_campaign(const std::vector<TargetUrl>& targets, const ProbeConfig& config);

/// What an uncensored channel sees for one target.
struct ReferenceEntry {
    std::vector<Ipv4Address> addresses;
    std::optional<std::string> body_digest;

    bool operator==(const ReferenceEntry&) const = default;
};

/// Keyed by TargetUrl::render().
using Reference = std::map<std::string, ReferenceEntry>;

/// Resolves and fetches every target through `clean_path` (a config whose
/// resolvers and endpoints reach an uncensored network).
Reference collect_reference(const std::vector<TargetUrl>& targets, const ProbeConfig& clean_path);

/// Liveness fetch function over a clean-path probe config.
CleanFetch make_clean_fetch(const ProbeConfig& clean_path);

}  // namespace blockscope
