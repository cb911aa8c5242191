#include "blockscope/serialize.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "blockscope/digest.hpp"
#include "blockscope/error.hpp"

namespace blockscope {

using nlohmann::json;

namespace {

Ipv4Address address_from(const json& j) {
    return Ipv4Address::parse(j.get<std::string>());
}

template <typename T>
json optional_to(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

}  // namespace

// ADL hooks for nlohmann::json; private to this translation unit's users.

void to_json(json& j, const Ipv4Address& a) { j = a.to_string(); }
void from_json(const json& j, Ipv4Address& a) { a = address_from(j); }

void to_json(json& j, const TargetUrl& t) { j = t.render(); }
void from_json(const json& j, TargetUrl& t) { t = parse_target(j.get<std::string>()); }

void to_json(json& j, const ResolverSpec& r) {
    j = {{"name", r.name}, {"address", r.address}, {"nxdomain_redirector", nullptr}};
    if (r.nxdomain_redirector) j["nxdomain_redirector"] = *r.nxdomain_redirector;
}
void from_json(const json& j, ResolverSpec& r) {
    r.name = j.at("name").get<std::string>();
    r.address = j.at("address").get<Ipv4Address>();
    r.nxdomain_redirector.reset();
    if (auto it = j.find("nxdomain_redirector"); it != j.end() && !it->is_null()) r.nxdomain_redirector = it->get<Ipv4Address>();
    r.validate();
}

void to_json(json& j, const DnsObservation& o) {
    j = {{"resolver", o.resolver}, {"qname", o.qname}, {"outcome", to_string(o.outcome)},
         {"answers", o.answers}, {"rtt_ms", o.rtt.count()}};
}
void from_json(const json& j, DnsObservation& o) {
    o.resolver = j.at("resolver").get<ResolverSpec>();
    o.qname = j.at("qname").get<std::string>();
    o.outcome = parse_dns_outcome(j.at("outcome").get<std::string>());
    o.answers = j.at("answers").get<std::vector<Ipv4Address>>();
    o.rtt = std::chrono::milliseconds(j.at("rtt_ms").get<std::int64_t>());
    o.validate();
}

void to_json(json& j, const TcpObservation& o) {
    j = {{"address", o.address}, {"port", o.port}, {"result", to_string(o.result)}};
}
void from_json(const json& j, TcpObservation& o) {
    o.address = j.at("address").get<Ipv4Address>();
    o.port = j.at("port").get<int>();
    o.result = parse_tcp_result(j.at("result").get<std::string>());
    o.validate();
}

void to_json(json& j, const HttpObservation& o) {
    j = {{"request_host", o.request_host},
         {"request_uri", o.request_uri},
         {"status", o.status},
         {"location", optional_to(o.location)},
         {"last_modified", optional_to(o.last_modified)},
         {"body_digest", o.body_digest},
         {"body_excerpt_base64", base64_encode(o.body_excerpt)}};
}
void from_json(const json& j, HttpObservation& o) {
    o.request_host = j.at("request_host").get<std::string>();
    o.request_uri = j.at("request_uri").get<std::string>();
    o.status = j.at("status").get<int>();
    o.location = optional_string(j, "location");
    o.last_modified = optional_string(j, "last_modified");
    o.body_digest = j.at("body_digest").get<std::string>();
    o.body_excerpt = base64_decode(j.at("body_excerpt_base64").get<std::string>());
    o.validate();
}

void to_json(json& j, const ErrorRecord& e) { j = {{"step", e.step}, {"detail", e.detail}}; }
void from_json(const json& j, ErrorRecord& e) {
    e.step = j.at("step").get<std::string>();
    e.detail = j.at("detail").get<std::string>();
}

void to_json(json& j, const TargetProbeResult& r) {
    j = {{"target", r.target}, {"dns", r.dns}, {"tcp", r.tcp}, {"keyword", nullptr}, {"http", nullptr},
         {"errors", r.errors}};
    if (r.keyword) j["keyword"] = *r.keyword;
    if (r.http) j["http"] = *r.http;
}
void from_json(const json& j, TargetProbeResult& r) {
    r.target = j.at("target").get<TargetUrl>();
    r.dns = j.at("dns").get<std::vector<DnsObservation>>();
    r.tcp = j.at("tcp").get<std::vector<TcpObservation>>();
    r.keyword.reset();
    r.http.reset();
    if (!j.at("keyword").is_null()) r.keyword = j.at("keyword").get<HttpObservation>();
    if (!j.at("http").is_null()) r.http = j.at("http").get<HttpObservation>();
    r.errors = j.at("errors").get<std::vector<ErrorRecord>>();
}

void to_json(json& j, const Verdict& v) {
    std::vector<std::string> mechs;
    for (Mechanism m : v.mechanisms) mechs.emplace_back(to_string(m));
    j = {{"target", v.target}, {"mechanisms", mechs}, {"evidence", v.evidence}, {"clean", v.clean},
         {"inconclusive", v.inconclusive}};
}
void from_json(const json& j, Verdict& v) {
    v.target = j.at("target").get<TargetUrl>();
    v.mechanisms.clear();
    for (const auto& m : j.at("mechanisms")) v.mechanisms.insert(parse_mechanism(m.get<std::string>()));
    v.evidence = j.at("evidence").get<std::vector<std::string>>();
    v.clean = j.at("clean").get<bool>();
    v.inconclusive = j.at("inconclusive").get<bool>();
    v.validate();
}

void to_json(json& j, const Removal& r) { j = {{"target", r.target}, {"reason", to_string(r.reason)}}; }
void from_json(const json& j, Removal& r) {
    r.target = j.at("target").get<TargetUrl>();
    r.reason = parse_removal_reason(j.at("reason").get<std::string>());
}

void to_json(json& j, const CleaningReport& c) {
    j = {{"initial_count", c.initial_count}, {"after_collapse", c.after_collapse},
         {"after_dedupe", c.after_dedupe},   {"after_liveness", c.after_liveness},
         {"removed", c.removed}};
}
void from_json(const json& j, CleaningReport& c) {
    c.initial_count = j.at("initial_count").get<std::size_t>();
    c.after_collapse = j.at("after_collapse").get<std::size_t>();
    c.after_dedupe = j.at("after_dedupe").get<std::size_t>();
    c.after_liveness = j.at("after_liveness").get<std::size_t>();
    c.removed = j.at("removed").get<std::vector<Removal>>();
    c.validate();
}

void to_json(json& j, const RunReport& r) {
    json counts = json::object();
    json percents = json::object();
    for (const auto& [m, c] : r.counts) counts[std::string(to_string(m))] = c;
    for (const auto& [m, p] : r.percents) percents[std::string(to_string(m))] = p.to_string();
    j = {{"total", r.total},
         {"counts", counts},
         {"percents", percents},
         {"blocked_total", r.blocked_total},
         {"blocked_percent", r.blocked_percent.to_string()},
         {"inconclusive", r.inconclusive},
         {"error_logged", r.error_logged}};
}
void from_json(const json& j, RunReport& r) {
    r.total = j.at("total").get<std::size_t>();
    r.counts.clear();
    r.percents.clear();
    for (const auto& [k, v] : j.at("counts").items()) r.counts[parse_mechanism(k)] = v.get<std::size_t>();
    for (const auto& [k, v] : j.at("percents").items())
        r.percents[parse_mechanism(k)] = Percent::parse(v.get<std::string>());
    r.blocked_total = j.at("blocked_total").get<std::size_t>();
    r.blocked_percent = Percent::parse(j.at("blocked_percent").get<std::string>());
    r.inconclusive = j.at("inconclusive").get<std::size_t>();
    r.error_logged = j.at("error_logged").get<std::size_t>();
    r.validate();
}

void to_json(json& j, const TranscriptEntry& e) { j = {{"direction", e.direction}, {"payload", e.payload}}; }
void from_json(const json& j, TranscriptEntry& e) {
    e.direction = j.at("direction").get<std::string>();
    e.payload = j.at("payload").get<std::string>();
}

void to_json(json& j, const SessionTranscript& s) {
    j = {{"connection", s.connection}, {"host", s.host}, {"entries", s.entries}};
}
void from_json(const json& j, SessionTranscript& s) {
    s.connection = j.at("connection").get<std::uint64_t>();
    s.host = j.at("host").get<std::string>();
    s.entries = j.at("entries").get<std::vector<TranscriptEntry>>();
    if (s.entries.empty()) throw FormatError("session transcript without entries");
}

void to_json(json& j, const FingerprintSet& f) {
    j = {{"digests", f.warning_page_digests},
         {"patterns", f.warning_excerpt_patterns},
         {"last_modified", f.injected_last_modified}};
}
void from_json(const json& j, FingerprintSet& f) {
    if (j.contains("digests")) f.warning_page_digests = j.at("digests").get<std::set<std::string>>();
    if (j.contains("patterns")) f.warning_excerpt_patterns = j.at("patterns").get<std::vector<std::string>>();
    if (j.contains("last_modified")) f.injected_last_modified = j.at("last_modified").get<std::vector<std::string>>();
    f.validate();
}

void to_json(json& j, const CircumventionMatrix& m) {
    json cells = json::object();
    for (const auto& [target, row] : m.cells) {
        json r = json::object();
        for (const auto& [method, outcome] : row) r[std::string(to_string(method))] = to_string(outcome);
        cells[target] = r;
    }
    j = {{"targets", m.targets}, {"cells", cells}};
}
void from_json(const json& j, CircumventionMatrix& m) {
    m.targets = j.at("targets").get<std::vector<TargetUrl>>();
    m.cells.clear();
    for (const auto& [target, row] : j.at("cells").items())
        for (const auto& [method, outcome] : row.items())
            m.cells[target][parse_method(method)] = parse_outcome(outcome.get<std::string>());
}

void to_json(json& j, const ReferenceEntry& e) {
    j = {{"addresses", e.addresses}, {"body_digest", optional_to(e.body_digest)}};
}
void from_json(const json& j, ReferenceEntry& e) {
    e.addresses = j.at("addresses").get<std::vector<Ipv4Address>>();
    e.body_digest = optional_string(j, "body_digest");
}

namespace io {
namespace {

template <typename T>
struct Kind;
template <> struct Kind<TargetUrl> { static constexpr const char* name = "target"; };
template <> struct Kind<ResolverSpec> { static constexpr const char* name = "resolver"; };
template <> struct Kind<DnsObservation> { static constexpr const char* name = "dns_observation"; };
template <> struct Kind<TcpObservation> { static constexpr const char* name = "tcp_observation"; };
template <> struct Kind<HttpObservation> { static constexpr const char* name = "http_observation"; };
template <> struct Kind<Verdict> { static constexpr const char* name = "verdict"; };
template <> struct Kind<TargetProbeResult> { static constexpr const char* name = "probe_result"; };
template <> struct Kind<CleaningReport> { static constexpr const char* name = "cleaning_report"; };
template <> struct Kind<RunReport> { static constexpr const char* name = "run_report"; };
template <> struct Kind<SessionTranscript> { static constexpr const char* name = "transcript"; };
template <> struct Kind<FingerprintSet> { static constexpr const char* name = "fingerprints"; };
template <> struct Kind<CircumventionMatrix> { static constexpr const char* name = "circumvention_matrix"; };
template <> struct Kind<Reference> { static constexpr const char* name = "reference"; };
template <> struct Kind<std::vector<TargetUrl>> { static constexpr const char* name = "targets"; };
template <> struct Kind<std::vector<TargetProbeResult>> { static constexpr const char* name = "probe_results"; };
template <> struct Kind<std::vector<Verdict>> { static constexpr const char* name = "verdicts"; };
template <> struct Kind<std::vector<SessionTranscript>> { static constexpr const char* name = "transcripts"; };

constexpr int kVersion = 1;

std::set<std::string> keys_of(const json& j) {
    std::set<std::string> out;
    for (const auto& [k, _] : j.items()) out.insert(k);
    return out;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed) {
    for (const auto& k : keys_of(j))
        if (!allowed.contains(k)) throw ConfigInvalid("unknown config key '" + k + "'");
}

const std::set<std::string> kProbeKeys = {"resolvers", "keyword_portal", "timeouts", "retries", "workers",
                                          "host_overrides", "endpoints", "http_port"};
const std::set<std::string> kCircumventKeys = {"methods", "cache_templates", "cache_engine", "host_ip_table"};

json parse_config_json(std::string_view text) {
    try {
        json j = json::parse(text);
        if (!j.is_object()) throw ConfigInvalid("config must be a JSON object");
        std::set<std::string> allowed = kProbeKeys;
        allowed.insert(kCircumventKeys.begin(), kCircumventKeys.end());
        reject_unknown(j, allowed);
        return j;
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
    }
}

std::map<std::string, Ipv4Address> host_table(const json& j) {
    std::map<std::string, Ipv4Address> out;
    for (const auto& [host, addr] : j.items()) out[to_lower(host)] = addr.get<Ipv4Address>();
    return out;
}

}  // namespace

template <typename T>
std::string encode(const T& value) {
    json doc = {{"format", std::string("blockscope/") + Kind<T>::name}, {"version", kVersion}, {"data", value}};
    return doc.dump(2) + "\n";
}

template <typename T>
T decode(std::string_view text) {
    try {
        const json doc = json::parse(text);
        const std::string expected = std::string("blockscope/") + Kind<T>::name;
        if (doc.at("format").get<std::string>() != expected)
            throw FormatError("expected document format " + expected + ", got " + doc.at("format").get<std::string>());
        if (doc.at("version").get<int>() != kVersion) throw FormatError("unsupported document version");
        return doc.at("data").get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed ") + Kind<T>::name + " document: " + e.what());
    } catch (const MalformedUrl& e) {
        throw FormatError(e.what());
    } catch (const InvalidAddress& e) {
        throw FormatError(e.what());
    } catch (const ConfigInvalid& e) {
        throw FormatError(e.what());
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError(path.string(), "read failed");
    return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoError(path.string(), "write failed");
}

template <typename T>
void emit(const T& value, const std::filesystem::path& path) {
    write_text(path, encode(value));
}

template <typename T>
T load(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    try {
        return decode<T>(text);
    } catch (const FormatError& e) {
        throw IoError(path.string(), e.what());
    }
}

#define BLOCKSCOPE_INSTANTIATE(T)                                    \
    template std::string encode<T>(const T&);                        \
    template T decode<T>(std::string_view);                          \
    template void emit<T>(const T&, const std::filesystem::path&);   \
    template T load<T>(const std::filesystem::path&);

BLOCKSCOPE_INSTANTIATE(TargetUrl)
BLOCKSCOPE_INSTANTIATE(ResolverSpec)
BLOCKSCOPE_INSTANTIATE(DnsObservation)
BLOCKSCOPE_INSTANTIATE(TcpObservation)
BLOCKSCOPE_INSTANTIATE(HttpObservation)
BLOCKSCOPE_INSTANTIATE(Verdict)
BLOCKSCOPE_INSTANTIATE(TargetProbeResult)
BLOCKSCOPE_INSTANTIATE(CleaningReport)
BLOCKSCOPE_INSTANTIATE(RunReport)
BLOCKSCOPE_INSTANTIATE(SessionTranscript)
BLOCKSCOPE_INSTANTIATE(FingerprintSet)
BLOCKSCOPE_INSTANTIATE(CircumventionMatrix)
BLOCKSCOPE_INSTANTIATE(Reference)
BLOCKSCOPE_INSTANTIATE(std::vector<TargetUrl>)
BLOCKSCOPE_INSTANTIATE(std::vector<TargetProbeResult>)
BLOCKSCOPE_INSTANTIATE(std::vector<Verdict>)
BLOCKSCOPE_INSTANTIATE(std::vector<SessionTranscript>)

#undef BLOCKSCOPE_INSTANTIATE

FingerprintSet parse_fingerprints(std::string_view json_text) {
    try {
        const json j = json::parse(json_text);
        if (!j.is_object()) throw ConfigInvalid("fingerprint file must be a JSON object");
        reject_unknown(j, {"digests", "patterns", "last_modified"});
        return j.get<FingerprintSet>();
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("invalid fingerprint file: ") + e.what());
    }
}

ProbeConfig parse_probe_config(std::string_view json_text) {
    const json j = parse_config_json(json_text);
    ProbeConfig c;
    try {
        if (j.contains("resolvers")) {
            c.resolvers = j.at("resolvers").get<std::vector<ResolverSpec>>();
        } else {
            c.resolvers = default_resolvers(system_resolver().value_or(Ipv4Address(127, 0, 0, 53)));
        }
        if (j.contains("keyword_portal")) c.keyword_portal = parse_target(j.at("keyword_portal").get<std::string>());
        if (j.contains("timeouts")) {
            const json& t = j.at("timeouts");
            reject_unknown(t, {"dns", "tcp", "http"});
            if (t.contains("dns")) c.timeouts.dns = net::Millis(t.at("dns").get<std::int64_t>());
            if (t.contains("tcp")) c.timeouts.tcp = net::Millis(t.at("tcp").get<std::int64_t>());
            if (t.contains("http")) c.timeouts.http = net::Millis(t.at("http").get<std::int64_t>());
        }
        if (j.contains("retries")) c.retries = j.at("retries").get<int>();
        if (j.contains("workers")) c.workers = j.at("workers").get<std::size_t>();
        if (j.contains("host_overrides")) c.host_overrides = host_table(j.at("host_overrides"));
        if (j.contains("endpoints"))
            for (const auto& [from, to] : j.at("endpoints").items()) c.endpoints.add(from, to.get<std::string>());
        if (j.contains("http_port")) c.http_port = j.at("http_port").get<std::uint16_t>();
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("invalid probe config: ") + e.what());
    } catch (const MalformedUrl& e) {
        throw ConfigInvalid(e.what());
    } catch (const InvalidAddress& e) {
        throw ConfigInvalid(e.what());
    }
    c.validate();
    return c;
}

CircumventConfig parse_circumvent_config(std::string_view json_text) {
    const json j = parse_config_json(json_text);
    CircumventConfig c;
    try {
        if (j.contains("methods")) {
            c.methods.clear();
            for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
        }
        if (j.contains("cache_templates"))
            for (const auto& [engine, tpl] : j.at("cache_templates").items())
                c.cache_templates.templates[parse_cache_engine(engine)] = tpl.get<std::string>();
        if (j.contains("cache_engine")) c.cache_engine = parse_cache_engine(j.at("cache_engine").get<std::string>());
        if (j.contains("host_ip_table")) c.host_ip_table = host_table(j.at("host_ip_table"));
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("invalid circumvention config: ") + e.what());
    } catch (const FormatError& e) {
        throw ConfigInvalid(e.what());
    } catch (const InvalidAddress& e) {
        throw ConfigInvalid(e.what());
    }
    c.validate();
    return c;
}

}  // namespace io
}  // namespace blockscope
