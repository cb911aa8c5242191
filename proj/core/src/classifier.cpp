#include "blockscope/classifier.hpp"

#include <algorithm>

#include "blockscope/error.hpp"
#include "blockscope/http_wire.hpp"

namespace blockscope {
namespace {

const ResolverSpec& resolve_spec(const DnsObservation& obs, const std::vector<ResolverSpec>& known) {
    if (const auto* spec = find_resolver(known, obs.resolver.address)) return *spec;
    return obs.resolver;
}

bool matches_pattern(std::string_view text, const std::vector<std::string>& patterns) {
    return std::any_of(patterns.begin(), patterns.end(),
                       [&](const std::string& p) { return !p.empty() && text.find(p) != std::string_view::npos; });
}

std::optional<Ipv4Address> location_ip(const std::string& location) {
    try {
        return Ipv4Address::try_parse(parse_target(location).host);
    } catch (const MalformedUrl&) {
        return std::nullopt;
    }
}

}  // namespace

void FingerprintSet::validate() const {
    const bool any = !warning_page_digests.empty() ||
                     std::any_of(warning_excerpt_patterns.begin(), warning_excerpt_patterns.end(),
                                 [](const std::string& p) { return !p.empty(); }) ||
                     std::any_of(injected_last_modified.begin(), injected_last_modified.end(),
                                 [](const std::string& p) { return !p.empty(); });
    if (!any) throw ConfigInvalid("fingerprint set has no detection signal");
}

std::string_view to_string(TriggerVerdict v) noexcept {
    switch (v) {
        case TriggerVerdict::HostOnly: return "HostOnly";
        case TriggerVerdict::HostAndUri: return "HostAndUri";
        case TriggerVerdict::NotTriggered: return "NotTriggered";
    }
    return "?";
}

std::optional<Mechanism> classify_dns(const DnsObservation& obs, const std::vector<ResolverSpec>& known,
                                      const std::optional<std::vector<Ipv4Address>>& reference) {
    const ResolverSpec& spec = resolve_spec(obs, known);
    if (obs.outcome == DnsOutcome::Answers && spec.nxdomain_redirector &&
        std::find(obs.answers.begin(), obs.answers.end(), *spec.nxdomain_redirector) != obs.answers.end())
        return Mechanism::DnsInjection;
    if (obs.outcome == DnsOutcome::NxDomain) {
        if (reference && !reference->empty()) return Mechanism::DnsInjection;
        // Redirecting resolvers never hand out a plain NXDOMAIN.
        if (spec.nxdomain_redirector) return Mechanism::DnsInjection;
    }
    return std::nullopt;
}

std::optional<Mechanism> classify_http(const HttpObservation& obs, const FingerprintSet& fingerprints,
                                       const std::optional<std::string>& reference_digest) {
    if (obs.status == 302) {
        if (!obs.location) return std::nullopt;
        if (auto ip = location_ip(*obs.location); ip && is_private_ip(*ip)) return Mechanism::Http302Redirect;
        if (matches_pattern(*obs.location, fingerprints.warning_excerpt_patterns)) return Mechanism::Http302Redirect;
        return std::nullopt;
    }
    if (obs.status != 200) return std::nullopt;

    if (fingerprints.warning_page_digests.contains(obs.body_digest)) return Mechanism::Http200Injection;
    if (matches_pattern(obs.body_excerpt, fingerprints.warning_excerpt_patterns)) return Mechanism::Http200Injection;
    if (obs.last_modified) {
        for (const auto& value : fingerprints.injected_last_modified)
            if (!value.empty() && obs.last_modified->starts_with(value)) return Mechanism::Http200Injection;
    }
    if (!reference_digest) throw AmbiguousEvidence();
    if (*reference_digest != obs.body_digest) return Mechanism::Http200Injection;
    return std::nullopt;
}

bool decoy_request_censored(const std::string& host, const std::string& uri, const TriggerProbe& probe) {
    const auto dial = probe.endpoints.resolve({probe.decoy, probe.port});
    auto res = http::get(dial, host, uri, probe.timeout);
    if (!res.response)
        throw DecoyUnreachable("decoy " + probe.decoy.to_string() + " did not answer: " + res.error);
    const auto obs = http::to_observation(host, uri, *res.response);
    try {
        return classify_http(obs, probe.fingerprints, std::nullopt).has_value();
    } catch (const AmbiguousEvidence&) {
        return false;  // an unmarked decoy response is the decoy's own page
    }
}

TriggerVerdict determine_trigger(const std::string& host, const std::string& uri, const TriggerProbe& probe) {
    if (decoy_request_censored(host, "/", probe)) return TriggerVerdict::HostOnly;
    if (!decoy_request_censored(host, uri, probe)) return TriggerVerdict::NotTriggered;
    // The pair is censored; a censored benign-host request would mean the URI alone
    // triggers, which the verdict set cannot express, so it still reports the pair.
    decoy_request_censored(probe.benign_host, uri, probe);
    return TriggerVerdict::HostAndUri;
}

Verdict classify_target(const TargetProbeResult& result, const FingerprintSet& fingerprints,
                        const std::vector<ResolverSpec>& known, const ReferenceEntry* reference) {
    if (!result.errors.empty())
        throw Error("cannot classify " + result.target.render() + ": result has error-log entries");
    Verdict v;
    v.target = result.target;
    auto add = [&](Mechanism m, std::string evidence) {
        v.mechanisms.insert(m);
        v.evidence.push_back(std::move(evidence));
    };

    std::optional<std::vector<Ipv4Address>> reference_addrs;
    if (reference) reference_addrs = reference->addresses;

    bool genuine_dns = false;
    for (std::size_t i = 0; i < result.dns.size(); ++i) {
        const auto& obs = result.dns[i];
        if (auto m = classify_dns(obs, known, reference_addrs)) {
            add(*m, "dns[" + std::to_string(i) + "]");
        } else if (obs.outcome == DnsOutcome::Answers) {
            genuine_dns = true;
        }
    }

    if (genuine_dns && !result.tcp.empty() &&
        std::none_of(result.tcp.begin(), result.tcp.end(),
                     [](const TcpObservation& t) { return t.result == TcpResult::Connected; })) {
        for (std::size_t i = 0; i < result.tcp.size(); ++i) add(Mechanism::IpBlock, "tcp[" + std::to_string(i) + "]");
    }

    if (result.keyword && result.keyword->status != 404) add(Mechanism::UrlKeyword, "keyword");

    if (result.http) {
        std::optional<std::string> digest;
        if (reference) digest = reference->body_digest;
        try {
            if (auto m = classify_http(*result.http, fingerprints, digest)) add(*m, "http");
        } catch (const AmbiguousEvidence&) {
            v.inconclusive = true;
        }
    }
    v.clean = v.mechanisms.empty();
    return v;
}

ClassifiedCampaign classify_campaign(const std::vector<TargetProbeResult>& results, const FingerprintSet& fingerprints,
                                     const std::vector<ResolverSpec>& known, const Reference& reference) {
    ClassifiedCampaign out;
    for (const auto& r : results) {
        if (!r.reportable()) {
            ++out.error_logged;
            continue;
        }
        const auto it = reference.find(r.target.render());
        out.verdicts.push_back(classify_target(r, fingerprints, known, it == reference.end() ? nullptr : &it->second));
        if (out.verdicts.back().inconclusive) ++out.inconclusive;
    }
    out.total = out.verdicts.size();
    return out;
}

}  // namespace blockscope
