#include "blockscope/model.hpp"

#include <algorithm>

#include "blockscope/digest.hpp"
#include "blockscope/error.hpp"

namespace blockscope {

void ResolverSpec::validate() const {
    if (name.empty()) throw ConfigInvalid("resolver name is empty");
    if (!address.is_unicast())
        throw ConfigInvalid("resolver " + name + ": " + address.to_string() + " is not a unicast address");
    if (nxdomain_redirector && *nxdomain_redirector == address)
        throw ConfigInvalid("resolver " + name + ": redirector equals resolver address");
}

std::vector<ResolverSpec> public_resolvers() {
    return {
        {"google", Ipv4Address(8, 8, 8, 8), std::nullopt},
        {"comodo", Ipv4Address(8, 26, 56, 26), Ipv4Address(92, 242, 144, 50)},
        {"opendns", Ipv4Address(208, 67, 222, 222), Ipv4Address(67, 215, 65, 132)},
        {"level3", Ipv4Address(209, 244, 0, 3), std::nullopt},
        {"norton", Ipv4Address(198, 153, 192, 40), Ipv4Address(198, 153, 192, 3)},
    };
}

const ResolverSpec* find_resolver(const std::vector<ResolverSpec>& known, Ipv4Address address) noexcept {
    auto it = std::find_if(known.begin(), known.end(),
                           [&](const ResolverSpec& r) { return r.address == address; });
    return it == known.end() ? nullptr : &*it;
}

void DnsObservation::validate() const {
    if (outcome == DnsOutcome::Answers && answers.empty())
        throw FormatError("dns observation for " + qname + ": Answers outcome without addresses");
    if (outcome != DnsOutcome::Answers && !answers.empty())
        throw FormatError("dns observation for " + qname + ": addresses present on a failed lookup");
}

void TcpObservation::validate() const {
    if (port < 1 || port > 65535)
        throw FormatError("tcp observation port out of range: " + std::to_string(port));
}

void HttpObservation::validate() const {
    if (status < 100 || status > 599)
        throw FormatError("http status out of range: " + std::to_string(status));
    if (location && status != 301 && status != 302)
        throw FormatError("location recorded on non-redirect status " + std::to_string(status));
    if (body_excerpt.size() > kBodyExcerptBytes) throw FormatError("body excerpt exceeds limit");
}

HttpObservation make_http_observation(std::string request_host, std::string request_uri, int status,
                                      std::optional<std::string> location,
                                      std::optional<std::string> last_modified,
                                      std::string_view body) {
    HttpObservation obs;
    obs.request_host = std::move(request_host);
    obs.request_uri = std::move(request_uri);
    obs.status = status;
    if (status == 301 || status == 302) obs.location = std::move(location);
    obs.last_modified = std::move(last_modified);
    obs.body_digest = sha256_hex(body);
    obs.body_excerpt = std::string(body.substr(0, kBodyExcerptBytes));
    return obs;
}

void Verdict::validate() const {
    if (clean != mechanisms.empty()) throw FormatError("verdict clean flag disagrees with mechanisms");
}

std::string_view to_string(DnsOutcome o) noexcept {
    switch (o) {
        case DnsOutcome::Answers: return "Answers";
        case DnsOutcome::NxDomain: return "NxDomain";
        case DnsOutcome::Timeout: return "Timeout";
        case DnsOutcome::ServFail: return "ServFail";
    }
    return "?";
}

std::string_view to_string(TcpResult r) noexcept {
    switch (r) {
        case TcpResult::Connected: return "Connected";
        case TcpResult::Refused: return "Refused";
        case TcpResult::TimedOut: return "TimedOut";
        case TcpResult::Unreachable: return "Unreachable";
    }
    return "?";
}

std::string_view to_string(Mechanism m) noexcept {
    switch (m) {
        case Mechanism::DnsInjection: return "DnsInjection";
        case Mechanism::IpBlock: return "IpBlock";
        case Mechanism::UrlKeyword: return "UrlKeyword";
        case Mechanism::Http302Redirect: return "Http302Redirect";
        case Mechanism::Http200Injection: return "Http200Injection";
    }
    return "?";
}

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const Enum (&values)[N], const char* what) {
    for (Enum v : values)
        if (to_string(v) == text) return v;
    throw FormatError(std::string("unknown ") + what + ": '" + std::string(text) + "'");
}

}  // namespace

DnsOutcome parse_dns_outcome(std::string_view text) {
    static constexpr DnsOutcome values[] = {DnsOutcome::Answers, DnsOutcome::NxDomain,
                                            DnsOutcome::Timeout, DnsOutcome::ServFail};
    return parse_enum(text, values, "dns outcome");
}

TcpResult parse_tcp_result(std::string_view text) {
    static constexpr TcpResult values[] = {TcpResult::Connected, TcpResult::Refused,
                                           TcpResult::TimedOut, TcpResult::Unreachable};
    return parse_enum(text, values, "tcp result");
}

Mechanism parse_mechanism(std::string_view text) {
    static constexpr Mechanism values[] = {Mechanism::DnsInjection, Mechanism::IpBlock,
                                           Mechanism::UrlKeyword, Mechanism::Http302Redirect,
                                           Mechanism::Http200Injection};
    return parse_enum(text, values, "mechanism");
}

}  // namespace blockscope
