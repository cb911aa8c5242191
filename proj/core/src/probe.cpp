#include "blockscope/probe.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "blockscope/dns_wire.hpp"
#include "blockscope/error.hpp"
#include "blockscope/http_wire.hpp"
#include "blockscope/worker_pool.hpp"

namespace blockscope {
namespace {

using Clock = std::chrono::steady_clock;

std::uint16_t next_query_id() {
    thread_local std::mt19937 rng{std::random_device{}()};
    return static_cast<std::uint16_t>(std::uniform_int_distribution<unsigned>(0, 0xffff)(rng));
}

std::string host_header(const TargetUrl& t) {
    return t.port ? t.host + ":" + std::to_string(*t.port) : t.host;
}

bool is_known_redirector(Ipv4Address addr, const ProbeConfig& config) {
    auto matches = [&](const ResolverSpec& r) { return r.nxdomain_redirector == addr; };
    if (std::any_of(config.resolvers.begin(), config.resolvers.end(), matches)) return true;
    const auto pub = public_resolvers();
    return std::any_of(pub.begin(), pub.end(), matches);
}

HttpStepResult fetch(net::Endpoint logical, const std::string& host, const std::string& uri,
                     const ProbeConfig& config, const char* step) {
    HttpStepResult out;
    const net::Endpoint dial = config.endpoints.resolve(logical);
    std::string last_error;
    for (int attempt = 0; attempt <= std::max(0, config.retries); ++attempt) {
        auto res = http::get(dial, host, uri, config.timeouts.http);
        if (res.response) {
            if (res.response->status < 100 || res.response->status > 599) {
                last_error = "status out of range: " + std::to_string(res.response->status);
                continue;
            }
            out.observation = http::to_observation(host, uri, *res.response);
            return out;
        }
        last_error = res.error;
    }
    out.error = ErrorRecord{step, host + uri + " via " + logical.to_string() + ": " + last_error};
    return out;
}

}  // namespace

void ProbeConfig::validate() const {
    if (resolvers.empty()) throw ConfigInvalid("resolvers must not be empty");
    for (const auto& r : resolvers) r.validate();
    if (timeouts.dns.count() <= 0 || timeouts.tcp.count() <= 0 || timeouts.http.count() <= 0)
        throw ConfigInvalid("timeouts must be strictly positive");
    if (retries < 0) throw ConfigInvalid("retries must be non-negative");
    if (workers == 0) throw ConfigInvalid("workers must be at least 1");
    if (http_port == 0) throw ConfigInvalid("http_port must be in [1, 65535]");
}

std::vector<ResolverSpec> default_resolvers(Ipv4Address local) {
    std::vector<ResolverSpec> out{{"local", local, std::nullopt}};
    for (auto& r : public_resolvers()) out.push_back(std::move(r));
    return out;
}

std::optional<Ipv4Address> system_resolver(const std::string& resolv_conf) {
    std::ifstream in(resolv_conf);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string key, value;
        if (fields >> key >> value && key == "nameserver") {
            if (auto addr = Ipv4Address::try_parse(value)) return addr;
        }
    }
    return std::nullopt;
}

DnsObservation query_resolver(const ResolverSpec& resolver, const std::string& qname, const ProbeConfig& config) {
    DnsObservation obs;
    obs.resolver = resolver;
    obs.qname = qname;
    if (auto literal = Ipv4Address::try_parse(qname)) {
        obs.outcome = DnsOutcome::Answers;
        obs.answers = {*literal};
        return obs;
    }
    const net::Endpoint dial = config.endpoints.resolve({resolver.address, 53});
    const auto started = Clock::now();
    for (int attempt = 0; attempt <= std::max(0, config.retries); ++attempt) {
        const auto query = dns::encode_query(next_query_id(), qname);
        auto reply = net::udp_exchange(dial, query, config.timeouts.dns);
        if (!reply) continue;
        dns::Message msg;
        try {
            msg = dns::decode(*reply);
        } catch (const dns::ParseError&) {
            continue;
        }
        if (!msg.response || msg.questions.empty() || msg.questions.front().name != to_lower(qname)) continue;
        obs.rtt = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
        switch (msg.rcode) {
            case dns::Rcode::NoError:
                for (const auto& a : msg.answers) obs.answers.push_back(a.address);
                obs.outcome = obs.answers.empty() ? DnsOutcome::NxDomain : DnsOutcome::Answers;
                break;
            case dns::Rcode::NxDomain:
                obs.outcome = DnsOutcome::NxDomain;
                break;
            default:
                obs.outcome = DnsOutcome::ServFail;
                break;
        }
        return obs;
    }
    obs.outcome = DnsOutcome::Timeout;
    obs.rtt = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
    return obs;
}

std::vector<DnsObservation> dns_step(const TargetUrl& target, const ProbeConfig& config) {
    std::vector<DnsObservation> out;
    out.reserve(config.resolvers.size());
    for (const auto& r : config.resolvers) out.push_back(query_resolver(r, target.host, config));
    return out;
}

std::vector<TcpObservation> tcp_step(std::span<const Ipv4Address> addresses, const ProbeConfig& config,
                                     std::uint16_t port) {
    std::vector<TcpObservation> out;
    out.reserve(addresses.size());
    for (auto addr : addresses) {
        auto conn = net::connect_tcp(config.endpoints.resolve({addr, port}), config.timeouts.tcp);
        out.push_back({addr, port, conn.result});
    }
    return out;
}

std::vector<Ipv4Address> genuine_addresses(std::span<const DnsObservation> dns, const ProbeConfig& config) {
    std::vector<Ipv4Address> out;
    for (const auto& obs : dns) {
        if (obs.outcome != DnsOutcome::Answers) continue;
        for (auto a : obs.answers) {
            if (obs.resolver.nxdomain_redirector == a || is_known_redirector(a, config)) continue;
            if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
        }
    }
    return out;
}

std::optional<Ipv4Address> resolve_portal(const ProbeConfig& config) {
    const auto& host = config.keyword_portal.host;
    if (auto it = config.host_overrides.find(host); it != config.host_overrides.end()) return it->second;
    for (const auto& r : config.resolvers) {
        const DnsObservation obs = query_resolver(r, host, config);
        const auto addrs = genuine_addresses(std::span(&obs, 1), config);
        if (!addrs.empty()) return addrs.front();
    }
    return std::nullopt;
}

HttpStepResult fetch_with_host(Ipv4Address address, const std::string& host, const std::string& uri,
                               const ProbeConfig& config) {
    return fetch({address, config.http_port}, host, uri, config, "http");
}

HttpStepResult keyword_step(const TargetUrl& target, const ProbeConfig& config,
                            std::optional<Ipv4Address> portal_address) {
    if (!portal_address) portal_address = resolve_portal(config);
    if (!portal_address) {
        HttpStepResult out;
        out.error = ErrorRecord{"keyword", "cannot resolve keyword portal " + config.keyword_portal.host};
        return out;
    }
    const auto& portal = config.keyword_portal;
    return fetch({*portal_address, portal.port.value_or(config.http_port)}, host_header(portal),
                 "/" + target.render(), config, "keyword");
}

HttpStepResult http_step(const TargetUrl& target, Ipv4Address resolved, const ProbeConfig& config) {
    return fetch({resolved, target.port.value_or(config.http_port)}, host_header(target), target.request_uri(),
                 config, "http");
}

TargetProbeResult run_target(const TargetUrl& target, const ProbeConfig& config,
                             std::optional<Ipv4Address> portal_address) {
    TargetProbeResult out;
    out.target = target;
    try {
        out.dns = dns_step(target, config);
        for (const auto& obs : out.dns) {
            if (obs.outcome == DnsOutcome::Timeout)
                out.errors.push_back({"dns", "timeout from resolver " + obs.resolver.name + " for " + obs.qname});
        }

        auto addresses = genuine_addresses(out.dns, config);
        if (addresses.empty()) {
            if (auto it = config.host_overrides.find(target.host); it != config.host_overrides.end())
                addresses.push_back(it->second);
        }
        const std::uint16_t port = target.port.value_or(config.http_port);
        if (!addresses.empty()) out.tcp = tcp_step(addresses, config, port);

        auto keyword = keyword_step(target, config, portal_address);
        out.keyword = std::move(keyword.observation);
        if (keyword.error) out.errors.push_back(std::move(*keyword.error));

        if (!addresses.empty()) {
            Ipv4Address chosen = addresses.front();
            for (const auto& t : out.tcp) {
                if (t.result == TcpResult::Connected) {
                    chosen = t.address;
                    break;
                }
            }
            auto http = http_step(target, chosen, config);
            out.http = std::move(http.observation);
            if (http.error) out.errors.push_back(std::move(*http.error));
        }
    } catch (const std::exception& e) {
        out.errors.push_back({"probe", e.what()});
    }
    return out;
}

CampaignResult run_campaign(const std::vector<TargetUrl>& targets, const ProbeConfig& config) {
    config.validate();
    CampaignResult out;
    if (targets.empty()) return out;
    const auto portal = resolve_portal(config);
    out.results = parallel_map<TargetProbeResult>(targets.size(), config.workers,
                                                  [&](std::size_t i) { return run_target(targets[i], config, portal); });
    out.summary.targets = out.results.size();
    for (const auto& r : out.results) {
        if (r.reportable()) ++out.summary.reportable;
        else ++out.summary.error_logged;
    }
    return out;
}

Reference collect_reference(const std::vector<TargetUrl>& targets, const ProbeConfig& clean_path) {
    clean_path.validate();
    auto entries = parallel_map<ReferenceEntry>(targets.size(), clean_path.workers, [&](std::size_t i) {
        const TargetUrl& t = targets[i];
        ReferenceEntry entry;
        const DnsObservation obs = query_resolver(clean_path.resolvers.front(), t.host, clean_path);
        entry.addresses = genuine_addresses(std::span(&obs, 1), clean_path);
        std::optional<Ipv4Address> fetch_from;
        if (auto it = clean_path.host_overrides.find(t.host); it != clean_path.host_overrides.end())
            fetch_from = it->second;
        else if (!entry.addresses.empty())
            fetch_from = entry.addresses.front();
        if (fetch_from) {
            auto http = http_step(t, *fetch_from, clean_path);
            if (http.observation) entry.body_digest = http.observation->body_digest;
        }
        return entry;
    });
    Reference out;
    for (std::size_t i = 0; i < targets.size(); ++i) out[targets[i].render()] = std::move(entries[i]);
    return out;
}

CleanFetch make_clean_fetch(const ProbeConfig& clean_path) {
    clean_path.validate();
    return [config = clean_path](const TargetUrl& t) -> CleanFetchResult {
        std::optional<Ipv4Address> address;
        if (auto it = config.host_overrides.find(t.host); it != config.host_overrides.end()) {
            address = it->second;
        } else {
            const DnsObservation obs = query_resolver(config.resolvers.front(), t.host, config);
            const auto addrs = genuine_addresses(std::span(&obs, 1), config);
            if (!addrs.empty()) address = addrs.front();
        }
        if (!address) return {FetchStatus::DnsFailure, 0};
        ProbeConfig single = config;
        single.retries = 0;
        auto http = http_step(t, *address, single);
        if (!http.observation) return {FetchStatus::ConnectFailure, 0};
        return {FetchStatus::Ok, http.observation->status};
    };
}

}  // namespace blockscope
