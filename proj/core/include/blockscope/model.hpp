#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "blockscope/ip.hpp"
#include "blockscope/url.hpp"

namespace blockscope {

/// A DNS resolver and, for services that rewrite NXDOMAIN, the landing address they return instead.
struct ResolverSpec {
    std::string name;
    Ipv4Address address;
    std::optional<Ipv4Address> nxdomain_redirector;

    /// Throws ConfigInvalid when address is not unicast or equals the redirector.
    void validate() const;

    bool operator==(const ResolverSpec&) const = default;
};

/// The five public resolvers probed alongside the local one, with their known redirectors.
std::vector<ResolverSpec> public_resolvers();

/// Finds a resolver by address.
const ResolverSpec* find_resolver(const std::vector<ResolverSpec>& known, Ipv4Address address) noexcept;

enum class DnsOutcome { Answers, NxDomain, Timeout, ServFail };

struct DnsObservation {
    ResolverSpec resolver;
    std::string qname;
    DnsOutcome outcome = DnsOutcome::Timeout;
    std::vector<Ipv4Address> answers;
    std::chrono::milliseconds rtt{0};

    void validate() const;
    bool operator==(const DnsObservation&) const = default;
};

enum class TcpResult { Connected, Refused, TimedOut, Unreachable };

struct TcpObservation {
    Ipv4Address address;
    int port = 80;
    TcpResult result = TcpResult::TimedOut;

    void validate() const;
    bool operator==(const TcpObservation&) const = default;
};

inline constexpr std::size_t kBodyExcerptBytes = 4096;

struct HttpObservation {
    std::string request_host;
    std::string request_uri;
    int status = 0;
    std::optional<std::string> location;
    std::optional<std::string> last_modified;
    std::string body_digest;   // lowercase hex SHA-256
    std::string body_excerpt;  // first kBodyExcerptBytes of the body, raw bytes

    void validate() const;
    bool operator==(const HttpObservation&) const = default;
};

/// Builds an observation from a received response, applying the
/// location-only-on-redirect and excerpt-length rules.
HttpObservation make_http_observation(std::string request_host, std::string request_uri, int status,
                                      std::optional<std::string> location,
                                      std::optional<std::string> last_modified,
                                      std::string_view body);

enum class Mechanism { DnsInjection, IpBlock, UrlKeyword, Http302Redirect, Http200Injection };

inline constexpr std::array<Mechanism, 5> kAllMechanisms = {
    Mechanism::DnsInjection, Mechanism::IpBlock, Mechanism::UrlKeyword,
    Mechanism::Http302Redirect, Mechanism::Http200Injection};

using MechanismSet = std::set<Mechanism>;

struct Verdict {
    TargetUrl target;
    MechanismSet mechanisms;
    std::vector<std::string> evidence;  // observation ids: "dns[0]", "tcp[1]", "keyword", "http"
    bool clean = true;
    bool inconclusive = false;          // some HTTP evidence could not be decided

    void validate() const;
    bool operator==(const Verdict&) const = default;
};

std::string_view to_string(DnsOutcome) noexcept;
std::string_view to_string(TcpResult) noexcept;
std::string_view to_string(Mechanism) noexcept;

DnsOutcome parse_dns_outcome(std::string_view);
TcpResult parse_tcp_result(std::string_view);
Mechanism parse_mechanism(std::string_view);

}  // namespace blockscope
