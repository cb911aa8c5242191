#include "blockscope/url.hpp"

#include <algorithm>
#include <charconv>

#include "blockscope/error.hpp"
#include "blockscope/ip.hpp"

namespace blockscope {
namespace {

bool is_space_or_control(unsigned char c) {
    return c <= 0x20 || c == 0x7f;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space_or_control(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && is_space_or_control(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::uint16_t default_port(Scheme s) {
    return s == Scheme::Http ? 80 : 443;
}

}  // namespace

std::string_view to_string(Scheme s) noexcept {
    return s == Scheme::Http ? "http" : "https";
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(c >= 'A' && c <= 'Z' ? c + ('a' - 'A') : c);
    });
    return out;
}

bool is_valid_hostname(std::string_view host) noexcept {
    if (host.empty() || host.size() > 253) return false;
    if (Ipv4Address::try_parse(host)) return true;
    if (host.find('.') == std::string_view::npos) return false;
    std::size_t pos = 0;
    while (pos <= host.size()) {
        std::size_t end = host.find('.', pos);
        if (end == std::string_view::npos) end = host.size();
        std::string_view label = host.substr(pos, end - pos);
        if (label.empty() || label.size() > 63) return false;
        if (label.front() == '-' || label.back() == '-') return false;
        for (char c : label) {
            const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
            if (!ok) return false;
        }
        if (end == host.size()) break;
        pos = end + 1;
    }
    return true;
}

bool host_within_domain(std::string_view host, std::string_view domain) noexcept {
    if (domain.empty()) return false;
    if (host == domain) return true;
    return host.size() > domain.size() && host.ends_with(domain) &&
           host[host.size() - domain.size() - 1] == '.';
}

bool host_matches_pattern(std::string_view host, std::string_view pattern) noexcept {
    if (pattern.starts_with("*.")) {
        std::string_view suffix = pattern.substr(2);
        return host != suffix && host_within_domain(host, suffix);
    }
    return host == pattern;
}

std::string TargetUrl::request_uri() const {
    std::string out = path;
    if (query) {
        out.push_back('?');
        out += *query;
    }
    return out;
}

std::string TargetUrl::render() const {
    std::string out(to_string(scheme));
    out += "://";
    out += host;
    if (port) {
        out.push_back(':');
        out += std::to_string(*port);
    }
    out += request_uri();
    return out;
}

bool TargetUrl::operator==(const TargetUrl& other) const noexcept {
    return scheme == other.scheme && host == other.host && port == other.port &&
           path == other.path && query == other.query;
}

TargetUrl parse_target(std::string_view raw) {
    const std::string_view text = trim(raw);
    if (text.empty()) throw MalformedUrl(std::string(raw));
    if (std::any_of(text.begin(), text.end(),
                    [](char c) { return is_space_or_control(static_cast<unsigned char>(c)); }))
        throw MalformedUrl(std::string(raw));

    TargetUrl url;
    url.raw = std::string(raw);

    std::string_view rest = text.substr(0, text.find('#'));
    if (auto sep = rest.find("://"); sep != std::string_view::npos) {
        const std::string scheme = to_lower(rest.substr(0, sep));
        if (scheme == "http") {
            url.scheme = Scheme::Http;
        } else if (scheme == "https") {
            url.scheme = Scheme::Https;
        } else {
            throw MalformedUrl(std::string(raw));
        }
        rest.remove_prefix(sep + 3);
    } else if (rest.starts_with("//")) {
        rest.remove_prefix(2);
    }

    const std::size_t authority_end = rest.find_first_of("/?");
    std::string_view authority = rest.substr(0, authority_end);
    rest = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

    if (authority.find('@') != std::string_view::npos) throw MalformedUrl(std::string(raw));
    if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
        std::string_view digits = authority.substr(colon + 1);
        unsigned port = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
        if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || port == 0 ||
            port > 65535)
            throw MalformedUrl(std::string(raw));
        if (port != default_port(url.scheme)) url.port = static_cast<std::uint16_t>(port);
        authority = authority.substr(0, colon);
    }
    if (authority.ends_with('.')) authority.remove_suffix(1);
    url.host = to_lower(authority);
    if (!is_valid_hostname(url.host)) throw MalformedUrl(std::string(raw));

    const std::size_t q = rest.find('?');
    std::string_view path = rest.substr(0, q);
    url.path = path.empty() ? "/" : std::string(path);
    if (url.path.front() != '/') throw MalformedUrl(std::string(raw));
    if (q != std::string_view::npos) url.query = std::string(rest.substr(q + 1));
    return url;
}

}  // namespace blockscope
