#include "blockscope/emulator.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>

#include <algorithm>

#include "blockscope/error.hpp"
#include "blockscope/url.hpp"

namespace blockscope {
namespace {

constexpr std::uint32_t kBlockedTtl = 60;
constexpr std::uint32_t kZoneTtl = 300;
constexpr std::size_t kMaxRequestHead = 64 * 1024;
constexpr net::Millis kPollInterval{50};

std::string request_host(const http::Request& request) {
    auto host = request.header("Host");
    if (!host) return {};
    std::string h = to_lower(*host);
    if (auto colon = h.rfind(':'); colon != std::string::npos) h.resize(colon);
    if (h.ends_with('.')) h.pop_back();
    return h;
}

std::string_view path_of(std::string_view target) {
    return target.substr(0, target.find('?'));
}

http::Response bad_request() {
    return http::make_response(400, "text/html", "<html><body><h1>400 Bad Request</h1></body></html>");
}

}  // namespace

// --- origin ---

std::string OriginStub::default_body(std::string_view host, std::string_view uri) {
    return "<html><body>origin " + std::string(host) + std::string(uri) + "</body></html>";
}

std::optional<http::Response> OriginStub::respond(const http::Request& request) {
    const std::string host = request_host(request);
    {
        std::lock_guard lock(mu_);
        ++counts_[host];
    }
    const OriginHost* h = zone_.find(host);
    if (!h) return http::make_response(502, "text/html", "<html><body>unknown host</body></html>");
    switch (h->behavior) {
        case OriginBehavior::Blackhole:
            return std::nullopt;
        case OriginBehavior::Portal:
            if (path_of(request.target) == "/")
                return http::make_response(200, "text/html", h->body.value_or("<html><body>portal</body></html>"));
            return http::make_response(404, "text/html", "<html><body><h1>404 Not Found</h1></body></html>");
        case OriginBehavior::Redirect:
            return http::make_response(301, "text/html", "<html><body>moved</body></html>",
                                       {{"Location", "https://" + host + request.target}});
        case OriginBehavior::Serve:
            break;
    }
    return http::make_response(200, "text/html", h->body.value_or(default_body(host, request.target)));
}

std::size_t OriginStub::requests_for(const std::string& host) const {
    std::lock_guard lock(mu_);
    auto it = counts_.find(host);
    return it == counts_.end() ? 0 : it->second;
}

std::size_t OriginStub::total_requests() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& [_, c] : counts_) n += c;
    return n;
}

void OriginStub::reset_counters() {
    std::lock_guard lock(mu_);
    counts_.clear();
}

// --- DNS ---

bool dns_blocked(const CensorPolicy& policy, std::string_view qname) noexcept {
    if (policy.generation == Generation::PassThrough) return false;
    return std::any_of(policy.dns_rules.begin(), policy.dns_rules.end(),
                       [&](const std::string& p) { return host_matches_pattern(qname, p); });
}

std::optional<std::vector<std::uint8_t>> handle_dns(const CensorPolicy& policy, const OriginZone& zone,
                                                    std::span<const std::uint8_t> query,
                                                    const ResolverSpec& resolver, const DnsForwarder& upstream) {
    const auto id = dns::peek_id(query);
    if (!id) return std::nullopt;
    dns::Message q;
    try {
        q = dns::decode(query);
    } catch (const dns::ParseError&) {
        return dns::encode_formerr(*id);
    }
    if (q.response || q.opcode != 0 || q.questions.size() != 1) return dns::encode_formerr(*id);

    const dns::Question& question = q.questions.front();
    dns::Message resp;
    resp.id = q.id;
    resp.response = true;
    resp.recursion_desired = q.recursion_desired;
    resp.recursion_available = true;
    resp.questions = q.questions;
    const bool want_a = question.qtype == dns::kTypeA && question.qclass == dns::kClassIn;

    // Censored or nonexistent names look the same to the client: the
    // resolver's redirector where it has one, NXDOMAIN otherwise.
    auto negative = [&] {
        if (resolver.nxdomain_redirector) {
            if (want_a) resp.answers.push_back({question.name, kBlockedTtl, *resolver.nxdomain_redirector});
        } else {
            resp.rcode = dns::Rcode::NxDomain;
        }
        return dns::encode(resp);
    };

    if (dns_blocked(policy, question.name)) return negative();

    if (const OriginHost* h = zone.find(question.name)) {
        if (want_a) resp.answers.push_back({question.name, kZoneTtl, h->address});
        return dns::encode(resp);
    }
    if (upstream) {
        if (auto reply = upstream(query)) return reply;
        resp.rcode = dns::Rcode::ServFail;
        return dns::encode(resp);
    }
    return negative();
}

// --- HTTP ---

std::string_view to_string(HttpAction a) noexcept {
    switch (a) {
        case HttpAction::Forwarded: return "Forwarded";
        case HttpAction::Redirected: return "Redirected";
        case HttpAction::Injected: return "Injected";
        case HttpAction::WarningSite: return "WarningSite";
        case HttpAction::Blackholed: return "Blackholed";
        case HttpAction::BadRequest: return "BadRequest";
    }
    return "?";
}

bool http_rule_matches(const CensorPolicy& policy, std::string_view host, std::string_view uri) noexcept {
    for (const auto& rule : policy.http_host_uri_rules)
        if (host_matches_pattern(host, rule.host_pattern) && uri.find(rule.uri_substring) != std::string_view::npos)
            return true;
    return std::any_of(policy.http_host_rules.begin(), policy.http_host_rules.end(),
                       [&](const std::string& p) { return host_matches_pattern(host, p); });
}

std::string redirect_location(const CensorPolicy& policy, Ipv4Address client) {
    return "http://" + policy.redirect_host.to_string() + "/redirect.php?n=" + client.to_string() + "@" +
           policy.pop_label + "&s=" + policy.rule_id;
}

http::Response serve_warning_site(const CensorPolicy& policy, const http::Request& request) {
    if (path_of(request.target) == "/redirect.php") return http::make_response(200, "text/html", policy.warning_body);
    return http::make_response(404, "text/html", "<html><body><h1>404 Not Found</h1></body></html>");
}

HttpDecision handle_http(const CensorPolicy& policy, const http::Request& request, Ipv4Address client,
                         OriginStub& origin) {
    const std::string host = request_host(request);
    if (host.empty()) return {HttpAction::BadRequest, bad_request()};

    if (policy.generation == Generation::Isp302 && host == policy.redirect_host.to_string())
        return {HttpAction::WarningSite, serve_warning_site(policy, request)};

    if (policy.generation != Generation::PassThrough) {
        bool matched = http_rule_matches(policy, host, request.target);
        if (!matched && policy.keyword_portal_interception && host == policy.keyword_portal_host &&
            request.target.size() > 1) {
            try {
                const TargetUrl embedded = parse_target(std::string_view(request.target).substr(1));
                matched = http_rule_matches(policy, embedded.host, embedded.request_uri());
            } catch (const MalformedUrl&) {
            }
        }
        if (matched) {
            if (policy.generation == Generation::Isp302) {
                return {HttpAction::Redirected,
                        http::make_response(302, "text/html", "<html><body>302 Found</body></html>",
                                            {{"Location", redirect_location(policy, client)}})};
            }
            return {HttpAction::Injected,
                    http::make_response(200, "text/html", policy.warning_body,
                                        {{"Last-Modified", policy.warning_last_modified}})};
        }
    }

    auto response = origin.respond(request);
    if (!response) return {HttpAction::Blackholed, std::nullopt};
    return {HttpAction::Forwarded, std::move(*response)};
}

// --- listeners ---

Emulator::Emulator(CensorPolicy policy, OriginZone zone, EmulatorOptions options)
    : policy_(std::move(policy)), origin_(std::move(zone)), options_(options) {
    policy_.validate();
}

Emulator::~Emulator() { stop(); }

void Emulator::start() {
    if (running_) return;
    dns_sockets_.clear();
    dns_ports_.clear();
    for (std::size_t i = 0; i < policy_.resolver_map.size(); ++i) {
        const std::uint16_t port =
            options_.dns_base_port ? static_cast<std::uint16_t>(options_.dns_base_port + i) : std::uint16_t{0};
        dns_sockets_.push_back(net::bind_udp({options_.bind, port}));
        dns_ports_.push_back(net::local_port(dns_sockets_.back()));
    }
    http_listener_ = net::listen_tcp({options_.bind, options_.http_port});
    http_port_ = net::local_port(http_listener_);
    running_ = true;
    loop_ = std::thread([this] { event_loop(); });
}

void Emulator::stop() {
    if (!running_.exchange(false)) return;
    if (loop_.joinable()) loop_.join();
    reap(true);
    http_listener_.close();
    dns_sockets_.clear();
}

net::Endpoint Emulator::http_endpoint() const {
    return {options_.bind, http_port_};
}

net::Endpoint Emulator::dns_endpoint(Ipv4Address resolver) const {
    for (std::size_t i = 0; i < policy_.resolver_map.size() && i < dns_ports_.size(); ++i)
        if (policy_.resolver_map[i].address == resolver) return {options_.bind, dns_ports_[i]};
    throw ConfigInvalid("emulator has no resolver " + resolver.to_string());
}

net::EndpointMap Emulator::endpoint_map() const {
    net::EndpointMap map;
    for (std::size_t i = 0; i < policy_.resolver_map.size() && i < dns_ports_.size(); ++i)
        map.add(net::Endpoint{policy_.resolver_map[i].address, 53}, net::Endpoint{options_.bind, dns_ports_[i]});
    map.add_port_wildcard(80, http_endpoint());
    return map;
}

std::vector<SessionTranscript> Emulator::transcripts() const {
    std::lock_guard lock(transcript_mu_);
    auto out = transcripts_;
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.connection < b.connection; });
    return out;
}

void Emulator::clear_transcripts() {
    std::lock_guard lock(transcript_mu_);
    transcripts_.clear();
}

void Emulator::event_loop() {
    while (running_) {
        std::vector<pollfd> fds;
        for (const auto& s : dns_sockets_) fds.push_back({s.fd(), POLLIN, 0});
        fds.push_back({http_listener_.fd(), POLLIN, 0});
        const int rc = ::poll(fds.data(), fds.size(), static_cast<int>(kPollInterval.count()));
        if (rc > 0) {
            for (std::size_t i = 0; i < dns_sockets_.size(); ++i)
                if (fds[i].revents & POLLIN) answer_dns(i);
            if (fds.back().revents & POLLIN) {
                net::Socket conn(::accept4(http_listener_.fd(), nullptr, nullptr, SOCK_CLOEXEC));
                if (conn.valid()) {
                    auto done = std::make_shared<std::atomic<bool>>(false);
                    const std::uint64_t id = ++next_connection_;
                    std::lock_guard lock(workers_mu_);
                    workers_.push_back({std::thread([this, c = std::move(conn), id, done]() mutable {
                                            serve_connection(std::move(c), id);
                                            *done = true;
                                        }),
                                        done});
                }
            }
        }
        reap(false);
    }
}

void Emulator::answer_dns(std::size_t index) {
    std::vector<std::uint8_t> buf(65535);
    sockaddr_in from{};
    socklen_t len = sizeof from;
    const ssize_t n = ::recvfrom(dns_sockets_[index].fd(), buf.data(), buf.size(), MSG_DONTWAIT,
                                 reinterpret_cast<sockaddr*>(&from), &len);
    if (n <= 0) return;
    DnsForwarder forward;
    if (origin_.zone().upstream_dns) {
        const net::Endpoint up = *origin_.zone().upstream_dns;
        const auto timeout = options_.io_timeout;
        forward = [up, timeout](std::span<const std::uint8_t> q) { return net::udp_exchange(up, q, timeout); };
    }
    const auto reply = handle_dns(policy_, origin_.zone(), std::span(buf.data(), static_cast<std::size_t>(n)),
                                  policy_.resolver_map[index], forward);
    if (!reply) return;
    ::sendto(dns_sockets_[index].fd(), reply->data(), reply->size(), 0, reinterpret_cast<const sockaddr*>(&from),
             len);
}

void Emulator::serve_connection(net::Socket conn, std::uint64_t id) {
    SessionTranscript transcript;
    transcript.connection = id;
    std::string buffer;
    const auto end = net::read_until(conn, buffer, options_.io_timeout, kMaxRequestHead,
                                     [](std::string_view b) { return http::header_end(b).has_value(); });

    std::optional<http::Request> request;
    if (end == net::ReadEnd::Complete) request = http::parse_request(buffer.substr(0, *http::header_end(buffer)));

    HttpDecision decision;
    if (request) {
        transcript.host = request_host(*request);
        transcript.entries.push_back({"client->server", request->request_line()});
        decision = handle_http(policy_, *request, net::peer_address(conn), origin_);
    } else {
        std::string first_line = buffer.substr(0, buffer.find("\r\n"));
        transcript.entries.push_back({"client->server", first_line.empty() ? "(no request)" : first_line});
        decision = {HttpAction::BadRequest, bad_request()};
    }

    if (decision.response) {
        transcript.entries.push_back({"server->client", decision.response->summary()});
        net::send_all(conn, decision.response->serialize(), options_.io_timeout);
        ::shutdown(conn.fd(), SHUT_WR);
    } else {
        transcript.entries.push_back({"server->client", "(no response)"});
        // Hold the connection open until the client gives up or we stop.
        while (running_) {
            if (!net::wait_readable(conn, kPollInterval)) continue;
            char c[512];
            if (::recv(conn.fd(), c, sizeof c, 0) <= 0) break;
        }
    }
    std::lock_guard lock(transcript_mu_);
    transcripts_.push_back(std::move(transcript));
}

void Emulator::reap(bool all) {
    std::vector<Worker> finished;
    {
        std::lock_guard lock(workers_mu_);
        auto it = std::partition(workers_.begin(), workers_.end(), [&](const Worker& w) { return !(all || *w.done); });
        std::move(it, workers_.end(), std::back_inserter(finished));
        workers_.erase(it, workers_.end());
    }
    for (auto& w : finished)
        if (w.thread.joinable()) w.thread.join();
}

}  // namespace blockscope
