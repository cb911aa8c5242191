#include "blockscope/policy.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "blockscope/error.hpp"
#include "blockscope/url.hpp"

namespace blockscope {

using nlohmann::json;

std::string_view to_string(Generation g) noexcept {
    switch (g) {
        case Generation::PassThrough: return "PassThrough";
        case Generation::Isp302: return "Isp302";
        case Generation::Ixp200: return "Ixp200";
    }
    return "?";
}

Generation parse_generation(std::string_view text) {
    for (auto g : {Generation::PassThrough, Generation::Isp302, Generation::Ixp200})
        if (to_string(g) == text) return g;
    throw PolicyInvalid("/generation", "unknown generation '" + std::string(text) + "'");
}

std::string default_warning_body() {
    return "<html><head><title>Surf Safely!</title></head><body>"
           "<h1>This website is not accessible.</h1>"
           "<p>The site you are trying to access contains content that is prohibited for viewing "
           "from within this network.</p></body></html>";
}

std::vector<ResolverSpec> default_resolver_map() {
    std::vector<ResolverSpec> out{{"local", Ipv4Address(10, 0, 0, 53), std::nullopt}};
    for (auto& r : public_resolvers()) out.push_back(std::move(r));
    return out;
}

bool is_valid_host_pattern(std::string_view pattern) noexcept {
    if (pattern.starts_with("*.")) pattern.remove_prefix(2);
    return is_valid_hostname(pattern);
}

bool pattern_covers(std::string_view outer, std::string_view inner) noexcept {
    if (outer == inner) return true;
    if (!outer.starts_with("*.")) return false;
    const std::string_view suffix = outer.substr(2);
    if (inner.starts_with("*.")) return host_within_domain(inner.substr(2), suffix);
    return host_matches_pattern(inner, outer);
}

void CensorPolicy::validate() const {
    auto check_patterns = [](const std::vector<std::string>& patterns, const std::string& field) {
        for (std::size_t i = 0; i < patterns.size(); ++i)
            if (!is_valid_host_pattern(patterns[i]))
                throw PolicyInvalid(field + "/" + std::to_string(i), "invalid host pattern '" + patterns[i] + "'");
    };
    check_patterns(dns_rules, "/dns_rules");
    check_patterns(http_host_rules, "/http_host_rules");
    for (std::size_t i = 0; i < http_host_uri_rules.size(); ++i) {
        const auto& rule = http_host_uri_rules[i];
        const std::string field = "/http_host_uri_rules/" + std::to_string(i);
        if (!is_valid_host_pattern(rule.host_pattern))
            throw PolicyInvalid(field + "/host", "invalid host pattern '" + rule.host_pattern + "'");
        if (rule.uri_substring.empty()) throw PolicyInvalid(field + "/uri", "uri substring must not be empty");
    }

    // Every DNS-blocked name must also be blocked at the HTTP level.
    for (std::size_t i = 0; i < dns_rules.size(); ++i) {
        const auto& d = dns_rules[i];
        bool covered = false;
        for (const auto& h : http_host_rules) covered = covered || pattern_covers(h, d);
        for (const auto& r : http_host_uri_rules) covered = covered || pattern_covers(r.host_pattern, d);
        if (!covered)
            throw PolicyInvalid("/dns_rules/" + std::to_string(i),
                                "'" + d + "' is DNS-blocked but matched by no http rule");
    }

    if (generation == Generation::Isp302 && !is_private_ip(redirect_host))
        throw PolicyInvalid("/redirect_host", redirect_host.to_string() + " is not a private address");

    std::set<Ipv4Address> seen;
    for (std::size_t i = 0; i < resolver_map.size(); ++i) {
        const std::string field = "/resolver_map/" + std::to_string(i);
        try {
            resolver_map[i].validate();
        } catch (const ConfigInvalid& e) {
            throw PolicyInvalid(field, e.what());
        }
        if (!seen.insert(resolver_map[i].address).second)
            throw PolicyInvalid(field + "/address", "duplicate resolver address");
    }
    if (!is_valid_hostname(keyword_portal_host))
        throw PolicyInvalid("/keyword_portal_host", "invalid host '" + keyword_portal_host + "'");
}

const OriginHost* OriginZone::find(std::string_view host) const noexcept {
    for (const auto& h : hosts)
        if (host_matches_pattern(host, h.pattern)) return &h;
    return nullptr;
}

void OriginZone::add_defaults() {
    auto add = [&](std::string pattern, Ipv4Address addr, OriginBehavior b) {
        if (!find(pattern.starts_with("*.") ? "x" + pattern.substr(1) : pattern))
            hosts.push_back({std::move(pattern), addr, b, std::nullopt});
    };
    add("www.google.com", Ipv4Address(203, 0, 113, 1), OriginBehavior::Portal);
    add("*.nyud.net", Ipv4Address(203, 0, 113, 2), OriginBehavior::Serve);
    add("webcache.googleusercontent.com", Ipv4Address(203, 0, 113, 3), OriginBehavior::Serve);
    add("cc.bingj.com", Ipv4Address(203, 0, 113, 4), OriginBehavior::Serve);
    add("web.archive.org", Ipv4Address(203, 0, 113, 5), OriginBehavior::Serve);
}

OriginZone OriginZone::with_defaults() {
    OriginZone z;
    z.add_defaults();
    return z;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw PolicyInvalid(path_.empty() ? "/" : path_, "expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const {
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, _] : obj_.items())
            if (!allowed.contains(k)) throw PolicyInvalid(path_ + "/" + k, "unknown key");
    }

    const json* get(const char* key) const {
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    std::string field(const char* key) const { return path_ + "/" + key; }

    std::optional<std::string> string(const char* key) const {
        const json* v = get(key);
        if (!v) return std::nullopt;
        if (!v->is_string()) throw PolicyInvalid(field(key), "expected a string");
        return v->get<std::string>();
    }

    std::optional<bool> boolean(const char* key) const {
        const json* v = get(key);
        if (!v) return std::nullopt;
        if (!v->is_boolean()) throw PolicyInvalid(field(key), "expected a boolean");
        return v->get<bool>();
    }

    std::optional<Ipv4Address> address(const char* key) const {
        auto s = string(key);
        if (!s) return std::nullopt;
        auto a = Ipv4Address::try_parse(*s);
        if (!a) throw PolicyInvalid(field(key), "invalid IPv4 address '" + *s + "'");
        return a;
    }

    std::vector<std::string> strings(const char* key) const {
        std::vector<std::string> out;
        const json* v = get(key);
        if (!v) return out;
        if (!v->is_array()) throw PolicyInvalid(field(key), "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i) {
            if (!(*v)[i].is_string()) throw PolicyInvalid(field(key) + "/" + std::to_string(i), "expected a string");
            out.push_back((*v)[i].get<std::string>());
        }
        return out;
    }

    const json& array(const char* key) const {
        static const json empty = json::array();
        const json* v = get(key);
        if (!v) return empty;
        if (!v->is_array()) throw PolicyInvalid(field(key), "expected an array");
        return *v;
    }

private:
    const json& obj_;
    std::string path_;
};

std::vector<std::string> lowered(std::vector<std::string> v) {
    for (auto& s : v) s = to_lower(s);
    return v;
}

OriginBehavior parse_behavior(const std::string& text, const std::string& field) {
    if (text == "serve") return OriginBehavior::Serve;
    if (text == "portal") return OriginBehavior::Portal;
    if (text == "blackhole") return OriginBehavior::Blackhole;
    if (text == "redirect") return OriginBehavior::Redirect;
    throw PolicyInvalid(field, "unknown behavior '" + text + "'");
}

}  // namespace

EmulatorSetup load_policy(std::string_view json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw PolicyInvalid("/", std::string("not valid JSON: ") + e.what());
    }
    Reader r(doc, "");
    r.allow({"generation", "dns_rules", "http_host_rules", "http_host_uri_rules", "redirect_host",
             "warning_body_file", "warning_body", "warning_last_modified", "resolver_map",
             "keyword_portal_interception", "keyword_portal_host", "pop_label", "rule_id", "origin"});

    EmulatorSetup setup;
    CensorPolicy& p = setup.policy;
    if (auto g = r.string("generation")) p.generation = parse_generation(*g);
    p.dns_rules = lowered(r.strings("dns_rules"));
    p.http_host_rules = lowered(r.strings("http_host_rules"));
    const json& uri_rules = r.array("http_host_uri_rules");
    for (std::size_t i = 0; i < uri_rules.size(); ++i) {
        Reader rule(uri_rules[i], "/http_host_uri_rules/" + std::to_string(i));
        rule.allow({"host", "uri"});
        auto host = rule.string("host");
        auto uri = rule.string("uri");
        if (!host) throw PolicyInvalid(rule.field("host"), "missing");
        if (!uri) throw PolicyInvalid(rule.field("uri"), "missing");
        p.http_host_uri_rules.push_back({to_lower(*host), *uri});
    }
    if (auto a = r.address("redirect_host")) p.redirect_host = *a;
    if (r.get("warning_body") && r.get("warning_body_file"))
        throw PolicyInvalid("/warning_body_file", "conflicts with warning_body");
    if (auto body = r.string("warning_body")) p.warning_body = *body;
    if (auto file = r.string("warning_body_file")) {
        std::filesystem::path path(*file);
        if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
        try {
            p.warning_body = read_file(path);
        } catch (const IoError& e) {
            throw PolicyInvalid("/warning_body_file", e.what());
        }
    }
    if (auto lm = r.string("warning_last_modified")) p.warning_last_modified = *lm;
    if (auto k = r.boolean("keyword_portal_interception")) p.keyword_portal_interception = *k;
    if (auto h = r.string("keyword_portal_host")) p.keyword_portal_host = to_lower(*h);
    if (auto s = r.string("pop_label")) p.pop_label = *s;
    if (auto s = r.string("rule_id")) p.rule_id = *s;

    if (r.get("resolver_map")) {
        p.resolver_map.clear();
        const json& resolvers = r.array("resolver_map");
        for (std::size_t i = 0; i < resolvers.size(); ++i) {
            Reader rr(resolvers[i], "/resolver_map/" + std::to_string(i));
            rr.allow({"name", "address", "nxdomain_redirector"});
            ResolverSpec spec;
            auto name = rr.string("name");
            auto addr = rr.address("address");
            if (!name) throw PolicyInvalid(rr.field("name"), "missing");
            if (!addr) throw PolicyInvalid(rr.field("address"), "missing");
            spec.name = *name;
            spec.address = *addr;
            spec.nxdomain_redirector = rr.address("nxdomain_redirector");
            p.resolver_map.push_back(std::move(spec));
        }
    }

    bool include_defaults = true;
    if (const json* origin = r.get("origin")) {
        Reader o(*origin, "/origin");
        o.allow({"hosts", "upstream_dns", "include_defaults"});
        if (auto d = o.boolean("include_defaults")) include_defaults = *d;
        if (auto up = o.string("upstream_dns")) {
            try {
                setup.zone.upstream_dns = net::Endpoint::parse(*up);
            } catch (const ConfigInvalid& e) {
                throw PolicyInvalid(o.field("upstream_dns"), e.what());
            }
        }
        const json& hosts = o.array("hosts");
        for (std::size_t i = 0; i < hosts.size(); ++i) {
            Reader hr(hosts[i], "/origin/hosts/" + std::to_string(i));
            hr.allow({"pattern", "address", "behavior", "body"});
            OriginHost h;
            auto pattern = hr.string("pattern");
            auto addr = hr.address("address");
            if (!pattern || !is_valid_host_pattern(to_lower(*pattern)))
                throw PolicyInvalid(hr.field("pattern"), "missing or invalid host pattern");
            if (!addr) throw PolicyInvalid(hr.field("address"), "missing");
            h.pattern = to_lower(*pattern);
            h.address = *addr;
            if (auto b = hr.string("behavior")) h.behavior = parse_behavior(*b, hr.field("behavior"));
            h.body = hr.string("body");
            setup.zone.hosts.push_back(std::move(h));
        }
    }
    if (include_defaults) setup.zone.add_defaults();

    p.validate();
    return setup;
}

EmulatorSetup load_policy_file(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError& e) {
        throw PolicyInvalid("/", e.what());
    }
    return load_policy(text, path.parent_path());
}

}  // namespace blockscope
