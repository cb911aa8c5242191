#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "blockscope/model.hpp"
#include "blockscope/net.hpp"
#include "blockscope/probe.hpp"

namespace blockscope {

/// Signals that identify a censor's warning page.
struct FingerprintSet {
    std::set<std::string> warning_page_digests;      // hex SHA-256 of full bodies
    std::vector<std::string> warning_excerpt_patterns;  // substrings of body excerpt or Location
    std::vector<std::string> injected_last_modified = {"Fri, 19 Apr 2013"};  // prefixes

    /// Throws ConfigInvalid when no signal is configured.
    void validate() const;
    bool operator==(const FingerprintSet&) const = default;
};

enum class TriggerVerdict { HostOnly, HostAndUri, NotTriggered };

std::string_view to_string(TriggerVerdict) noexcept;

/// DnsInjection when the answer is the resolver's NXDOMAIN redirector, when
/// NXDOMAIN comes back for a name the reference channel resolves, or when a
/// redirecting resolver returns a raw NXDOMAIN.
std::optional<Mechanism> classify_dns(const DnsObservation& obs, const std::vector<ResolverSpec>& known,
                                      const std::optional<std::vector<Ipv4Address>>& reference);

/// Throws AmbiguousEvidence for a 200 that matches no fingerprint when no reference digest is known.
std::optional<Mechanism> classify_http(const HttpObservation& obs, const FingerprintSet& fingerprints,
                                       const std::optional<std::string>& reference_digest);

/// Settings for crafted-header probes against a decoy.
struct TriggerProbe {
    Ipv4Address decoy;
    std::uint16_t port = 80;
    std::string benign_host = "example.com";
    FingerprintSet fingerprints;
    net::EndpointMap endpoints;
    net::Millis timeout{10000};
};

/// Sends (host, "/"), (host, uri), (benign host, uri) to the decoy, stopping
/// as soon as the answer is known. Throws DecoyUnreachable.
TriggerVerdict determine_trigger(const std::string& host, const std::string& uri, const TriggerProbe& probe);

/// Whether a single crafted request to the decoy comes back censored.
bool decoy_request_censored(const std::string& host, const std::string& uri, const TriggerProbe& probe);

/// Union of per-observation findings. Requires result.errors to be empty.
Verdict classify_target(const TargetProbeResult& result, const FingerprintSet& fingerprints,
                        const std::vector<ResolverSpec>& known, const ReferenceEntry* reference = nullptr);

struct ClassifiedCampaign {
    std::vector<Verdict> verdicts;  // reportable targets only, input order
    std::size_t total = 0;          // reportable targets
    std::size_t error_logged = 0;
    std::size_t inconclusive = 0;
};

/// Drops error-logged results and classifies the rest.
ClassifiedCampaign classify_campaign(const std::vector<TargetProbeResult>& results, const FingerprintSet& fingerprints,
                                     const std::vector<ResolverSpec>& known, const Reference& reference = {});

}  // namespace blockscope
