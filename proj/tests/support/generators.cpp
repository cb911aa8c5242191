#include "generators.hpp"

#include <blockscope/digest.hpp>

namespace gen {

using namespace blockscope;

namespace {

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string token(Rng& rng, std::size_t min_len, std::size_t max_len, const std::string& alphabet) {
    const auto n = std::uniform_int_distribution<std::size_t>(min_len, max_len)(rng);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    return out;
}

}  // namespace

std::string label(Rng& rng, std::size_t min_len, std::size_t max_len) {
    static const std::string alnum = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::string l = token(rng, min_len, max_len, alnum);
    if (l.size() > 2 && chance(rng, 0.2)) l[l.size() / 2] = '-';
    return l;
}

std::string hostname(Rng& rng) {
    static const std::vector<std::string> tlds = {"com", "net", "org", "pk", "test", "info"};
    std::string h;
    const int parts = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int i = 0; i < parts; ++i) h += label(rng) + ".";
    return h + pick(rng, tlds);
}

std::string url_text(Rng& rng) {
    static const std::string path_chars = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-._~%!$&'()*+,;=:@";
    static const std::string query_chars = "abcdefghijklmnopqrstuvwxyz0123456789=&-._~%/?:@";
    std::string u = chance(rng, 0.8) ? "http://" : "https://";
    u += hostname(rng);
    if (chance(rng, 0.15)) u += ":" + std::to_string(std::uniform_int_distribution<int>(1, 65535)(rng));
    const int segments = std::uniform_int_distribution<int>(0, 4)(rng);
    for (int i = 0; i < segments; ++i) u += "/" + token(rng, 0, 10, path_chars);
    if (chance(rng, 0.4)) u += "?" + token(rng, 0, 16, query_chars);
    return u;
}

TargetUrl target(Rng& rng) {
    return parse_target(url_text(rng));
}

Scenario scenario(Rng& rng, Generation generation, std::size_t count) {
    Scenario s;
    s.policy.generation = generation;
    s.policy.keyword_portal_interception = chance(rng, 0.5);
    s.zone = OriginZone::with_defaults();

    std::uint32_t next_addr = (198u << 24) | (18u << 16) | 1u;  // 198.18.0.1 onwards
    for (std::size_t i = 0; i < count; ++i) {
        // Unique per index so zone entries never collide.
        const std::string base = "h" + std::to_string(i) + "-" + label(rng, 3, 8) + ".corpus.test";
        const bool wildcard = chance(rng, 0.2);
        const std::string host = wildcard ? "www." + base : base;
        const std::string rule = wildcard ? "*." + base : base;
        s.zone.hosts.push_back({host, Ipv4Address(next_addr++), OriginBehavior::Serve, std::nullopt});

        std::string path = "/";
        if (chance(rng, 0.5)) path += label(rng, 2, 8);
        if (chance(rng, 0.3)) path += "/" + label(rng, 2, 8);
        std::string query;
        if (chance(rng, 0.3)) query = "?v=" + label(rng, 4, 10);

        switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
            case 0:
            case 1:
                break;  // untouched
            case 2:
                s.policy.http_host_rules.push_back(rule);
                break;
            case 3: {
                const std::string video = std::to_string(std::uniform_int_distribution<int>(10000000, 99999999)(rng));
                s.policy.http_host_uri_rules.push_back({rule, video});
                if (chance(rng, 0.6)) path = "/" + video;  // otherwise the rule misses this target
                break;
            }
            case 4:
                s.policy.http_host_rules.push_back(rule);
                s.policy.dns_rules.push_back(rule);
                break;
        }
        s.targets.push_back(parse_target("http://" + host + path + query));
    }
    return s;
}

Ipv4Address unicast(Rng& rng) {
    return Ipv4Address(static_cast<std::uint8_t>(1 + rng() % 223), rng() & 0xff, rng() & 0xff, 1 + rng() % 254);
}

namespace {

std::string bytes(Rng& rng, std::size_t n) {
    std::string s(n, '\0');
    for (auto& c : s) c = static_cast<char>(rng() & 0xff);
    return s;
}

}  // namespace

HttpObservation http_observation(Rng& rng) {
    HttpObservation o;
    o.request_host = hostname(rng);
    o.request_uri = "/" + label(rng);
    o.status = std::uniform_int_distribution<int>(100, 599)(rng);
    if (rng() % 2) {
        o.status = rng() % 2 ? 301 : 302;
        o.location = "http://" + hostname(rng) + "/";
    }
    if (rng() % 2) o.last_modified = "Fri, 19 Apr 2013 00:00:00 GMT";
    o.body_excerpt = bytes(rng, rng() % 200);
    o.body_digest = sha256_hex(o.body_excerpt);
    return o;
}

TargetProbeResult probe_result(Rng& rng) {
    TargetProbeResult r;
    r.target = target(rng);
    for (const auto& spec : public_resolvers()) {
        DnsObservation d;
        d.resolver = spec;
        d.qname = r.target.host;
        d.outcome = static_cast<DnsOutcome>(rng() % 4);
        if (d.outcome == DnsOutcome::Answers) d.answers = {unicast(rng), unicast(rng)};
        d.rtt = std::chrono::milliseconds(rng() % 900);
        r.dns.push_back(d);
    }
    r.tcp.push_back({unicast(rng), 80, static_cast<TcpResult>(rng() % 4)});
    if (rng() % 2) r.keyword = http_observation(rng);
    if (rng() % 2) r.http = http_observation(rng);
    if (rng() % 5 == 0) r.errors.push_back({"http", "timed out"});
    return r;
}

Verdict verdict(Rng& rng) {
    Verdict v;
    v.target = target(rng);
    for (Mechanism m : kAllMechanisms)
        if (rng() % 3 == 0) v.mechanisms.insert(m);
    v.clean = v.mechanisms.empty();
    v.inconclusive = v.clean && rng() % 4 == 0;
    if (!v.clean) v.evidence = {"dns[0]", "http"};
    return v;
}

}  // namespace gen
