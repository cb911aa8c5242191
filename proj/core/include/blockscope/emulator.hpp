#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "blockscope/dns_wire.hpp"
#include "blockscope/http_wire.hpp"
#include "blockscope/net.hpp"
#include "blockscope/policy.hpp"

namespace blockscope {

/// Serves the uncensored web described by an OriginZone and counts what it was asked for.
class OriginStub {
public:
    explicit OriginStub(OriginZone zone) : zone_(std::move(zone)) {}

    /// nullopt means the host is a black hole: hold the connection, never answer.
    std::optional<http::Response> respond(const http::Request& request);

    std::size_t requests_for(const std::string& host) const;
    std::size_t total_requests() const;
    void reset_counters();

    const OriginZone& zone() const noexcept { return zone_; }

    /// Body served for host+uri when the zone sets none.
    static std::string default_body(std::string_view host, std::string_view uri);

private:
    OriginZone zone_;
    mutable std::mutex mu_;
    std::map<std::string, std::size_t> counts_;
};

/// Upstream used for names outside the zone. Receives and returns raw wire messages.
using DnsForwarder = std::function<std::optional<std::vector<std::uint8_t>>(std::span<const std::uint8_t>)>;

/// Answers one DNS query the way the censored path would for a client using
/// `resolver`. Blocked names get the resolver's redirector (if it has one) or
/// NXDOMAIN; other names come from the zone or `upstream` untouched.
/// Malformed queries get FORMERR; queries too short to carry an id get nothing.
std::optional<std::vector<std::uint8_t>> handle_dns(const CensorPolicy& policy, const OriginZone& zone,
                                                    std::span<const std::uint8_t> query,
                                                    const ResolverSpec& resolver,
                                                    const DnsForwarder& upstream = {});

/// True if the censor's DNS rules match the name under this policy.
bool dns_blocked(const CensorPolicy& policy, std::string_view qname) noexcept;

enum class HttpAction { Forwarded, Redirected, Injected, WarningSite, Blackholed, BadRequest };

std::string_view to_string(HttpAction) noexcept;

struct HttpDecision {
    HttpAction action = HttpAction::Forwarded;
    std::optional<http::Response> response;  // absent only for Blackholed
};

/// Whether (host, uri) triggers an HTTP rule; host+uri rules are checked before host rules.
bool http_rule_matches(const CensorPolicy& policy, std::string_view host, std::string_view uri) noexcept;

/// Censor decision for one request. Matching requests never reach the origin.
HttpDecision handle_http(const CensorPolicy& policy, const http::Request& request, Ipv4Address client,
                         OriginStub& origin);

/// The ISP warning host: /redirect.php serves the warning page, everything else 404.
http::Response serve_warning_site(const CensorPolicy& policy, const http::Request& request);

/// Location of the ISP-generation redirect for a given client.
std::string redirect_location(const CensorPolicy& policy, Ipv4Address client);

struct TranscriptEntry {
    std::string direction;  // "client->server" or "server->client"
    std::string payload;    // request line or response summary

    bool operator==(const TranscriptEntry&) const = default;
};

struct SessionTranscript {
    std::uint64_t connection = 0;  // accept order, from 1
    std::string host;              // Host header of the request, if any
    std::vector<TranscriptEntry> entries;

    bool operator==(const SessionTranscript&) const = default;
};

struct EmulatorOptions {
    Ipv4Address bind{127, 0, 0, 1};
    std::uint16_t http_port = 0;      // 0: ephemeral
    std::uint16_t dns_base_port = 0;  // resolver i listens on base+i; 0: ephemeral
    net::Millis io_timeout{5000};
};

/// DNS listeners (one UDP socket per resolver identity) and one HTTP
/// listener, applying a CensorPolicy in front of an OriginStub.
class Emulator {
public:
    Emulator(CensorPolicy policy, OriginZone zone, EmulatorOptions options = {});
    ~Emulator();
    Emulator(const Emulator&) = delete;
    Emulator& operator=(const Emulator&) = delete;

    void start();
    void stop();

    const CensorPolicy& policy() const noexcept { return policy_; }

    net::Endpoint http_endpoint() const;
    /// Listening socket standing in for the resolver with this address.
    net::Endpoint dns_endpoint(Ipv4Address resolver) const;
    /// Resolver address:53 to DNS sockets, "*:80" to the HTTP listener.
    net::EndpointMap endpoint_map() const;

    std::vector<SessionTranscript> transcripts() const;
    void clear_transcripts();

    std::size_t origin_requests(const std::string& host) const { return origin_.requests_for(host); }
    std::size_t origin_requests_total() const { return origin_.total_requests(); }

private:
    void event_loop();
    void serve_connection(net::Socket conn, std::uint64_t id);
    void answer_dns(std::size_t resolver_index);
    void reap(bool all);

    CensorPolicy policy_;
    OriginStub origin_;
    EmulatorOptions options_;

    std::vector<net::Socket> dns_sockets_;  // parallel to policy_.resolver_map
    std::vector<std::uint16_t> dns_ports_;
    net::Socket http_listener_;
    std::uint16_t http_port_ = 0;

    std::atomic<bool> running_{false};
    std::thread loop_;

    struct Worker {
        std::thread thread;
        std::shared_ptr<std::atomic<bool>> done;
    };
    std::mutex workers_mu_;
    std::vector<Worker> workers_;
    std::uint64_t next_connection_ = 0;

    mutable std::mutex transcript_mu_;
    std::vector<SessionTranscript> transcripts_;
};

}  // namespace blockscope
