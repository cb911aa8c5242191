#include "blockscope/http_wire.hpp"

#include <algorithm>
#include <charconv>

#include "blockscope/error.hpp"
#include "blockscope/url.hpp"

namespace blockscope::http {
namespace {

constexpr std::size_t kMaxResponseBytes = 8 * 1024 * 1024;

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Splits a header block (after the first line) into fields; false on a line without ':'.
bool parse_fields(std::string_view block, Headers& out) {
    while (!block.empty()) {
        std::size_t eol = block.find("\r\n");
        std::string_view line = block.substr(0, eol);
        block = eol == std::string_view::npos ? std::string_view{} : block.substr(eol + 2);
        if (line.empty()) break;
        const auto colon = line.find(':');
        if (colon == std::string_view::npos || colon == 0) return false;
        out.emplace_back(std::string(trim(line.substr(0, colon))), std::string(trim(line.substr(colon + 1))));
    }
    return true;
}

std::optional<std::size_t> parse_size(std::string_view text, int base) {
    std::size_t v = 0;
    text = trim(text);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
    if (text.empty() || ec != std::errc{}) return std::nullopt;
    return v;
}

bool is_chunked(const Headers& h) {
    auto te = find_header(h, "Transfer-Encoding");
    return te && to_lower(*te).find("chunked") != std::string::npos;
}

// Decodes a chunked body; nullopt while incomplete.
std::optional<std::string> dechunk(std::string_view data) {
    std::string out;
    for (;;) {
        const auto eol = data.find("\r\n");
        if (eol == std::string_view::npos) return std::nullopt;
        std::string_view size_line = data.substr(0, eol);
        size_line = size_line.substr(0, size_line.find(';'));
        const auto size = parse_size(size_line, 16);
        if (!size) throw FormatError("invalid chunk size");
        data.remove_prefix(eol + 2);
        if (*size == 0) return out;  // trailers are ignored
        if (data.size() < *size + 2) return std::nullopt;
        out.append(data.substr(0, *size));
        data.remove_prefix(*size + 2);
    }
}

struct Head {
    std::string version;
    int status = 0;
    std::string reason;
    Headers headers;
    std::size_t body_offset = 0;
};

std::optional<Head> parse_status_head(std::string_view raw) {
    const auto end = header_end(raw);
    if (!end) return std::nullopt;
    std::string_view block = raw.substr(0, *end);
    const auto eol = block.find("\r\n");
    std::string_view line = block.substr(0, eol);
    Head head;
    const auto sp1 = line.find(' ');
    if (sp1 == std::string_view::npos || !line.starts_with("HTTP/")) throw FormatError("invalid status line");
    head.version = std::string(line.substr(0, sp1));
    std::string_view rest = line.substr(sp1 + 1);
    const auto sp2 = rest.find(' ');
    std::string_view code = rest.substr(0, sp2);
    auto [ptr, ec] = std::from_chars(code.data(), code.data() + code.size(), head.status);
    if (code.size() != 3 || ec != std::errc{} || ptr != code.data() + code.size())
        throw FormatError("invalid status code");
    head.reason = sp2 == std::string_view::npos ? "" : std::string(rest.substr(sp2 + 1));
    if (!parse_fields(block.substr(eol + 2), head.headers)) throw FormatError("invalid header line");
    head.body_offset = *end;
    return head;
}

}  // namespace

std::optional<std::string> find_header(const Headers& headers, std::string_view name) {
    for (const auto& [k, v] : headers)
        if (iequals(k, name)) return v;
    return std::nullopt;
}

std::string Request::request_line() const {
    return method + " " + target + " " + version;
}

std::string Request::serialize() const {
    std::string out = request_line() + "\r\n";
    for (const auto& [k, v] : headers) out += k + ": " + v + "\r\n";
    out += "\r\n";
    return out;
}

std::string Response::serialize() const {
    std::string out = version + " " + std::to_string(status) + " " + reason + "\r\n";
    for (const auto& [k, v] : headers) out += k + ": " + v + "\r\n";
    if (!find_header(headers, "Content-Length")) out += "Content-Length: " + std::to_string(body.size()) + "\r\n";
    if (!find_header(headers, "Connection")) out += "Connection: close\r\n";
    out += "\r\n";
    out += body;
    return out;
}

std::string Response::summary() const {
    std::string out = version + " " + std::to_string(status) + " " + reason;
    if (auto ct = header("Content-Type")) {
        std::string_view media = *ct;
        media = trim(media.substr(0, media.find(';')));
        out += " (" + std::string(media) + ")";
    }
    return out;
}

std::string_view reason_phrase(int status) noexcept {
    switch (status) {
        case 200: return "OK";
        case 203: return "Non-Authoritative Information";
        case 301: return "Moved Permanently";
        case 302: return "Found";
        case 400: return "Bad Request";
        case 403: return "Forbidden";
        case 404: return "Not Found";
        case 500: return "Internal Server Error";
        case 502: return "Bad Gateway";
        case 503: return "Service Unavailable";
        default: return "Unknown";
    }
}

Response make_response(int status, std::string content_type, std::string body, Headers extra) {
    Response r;
    r.status = status;
    r.reason = std::string(reason_phrase(status));
    r.headers.emplace_back("Content-Type", std::move(content_type));
    for (auto& h : extra) r.headers.push_back(std::move(h));
    r.body = std::move(body);
    return r;
}

std::optional<std::size_t> header_end(std::string_view buffer) noexcept {
    const auto pos = buffer.find("\r\n\r\n");
    if (pos == std::string_view::npos) return std::nullopt;
    return pos + 4;
}

std::optional<Request> parse_request(std::string_view head) {
    const auto eol = head.find("\r\n");
    if (eol == std::string_view::npos) return std::nullopt;
    std::string_view line = head.substr(0, eol);
    const auto sp1 = line.find(' ');
    const auto sp2 = line.rfind(' ');
    if (sp1 == std::string_view::npos || sp2 == sp1) return std::nullopt;
    Request req;
    req.method = std::string(line.substr(0, sp1));
    req.target = std::string(line.substr(sp1 + 1, sp2 - sp1 - 1));
    req.version = std::string(line.substr(sp2 + 1));
    if (req.method.empty() || req.target.empty() || !req.version.starts_with("HTTP/1.")) return std::nullopt;
    if (req.target.find(' ') != std::string::npos) return std::nullopt;
    if (!parse_fields(head.substr(eol + 2), req.headers)) return std::nullopt;
    return req;
}

bool response_complete(std::string_view buffer) {
    std::optional<Head> head;
    try {
        head = parse_status_head(buffer);
    } catch (const FormatError&) {
        return true;  // let the parser report it
    }
    if (!head) return false;
    std::string_view body = buffer.substr(head->body_offset);
    if (head->status == 204 || head->status == 304 || head->status / 100 == 1) return true;
    if (is_chunked(head->headers)) {
        try {
            return dechunk(body).has_value();
        } catch (const FormatError&) {
            return true;
        }
    }
    if (auto cl = find_header(head->headers, "Content-Length")) {
        if (auto n = parse_size(*cl, 10)) return body.size() >= *n;
    }
    return false;  // read until close
}

Response parse_response(std::string_view raw) {
    auto head = parse_status_head(raw);
    if (!head) throw FormatError("incomplete response head");
    Response r;
    r.version = std::move(head->version);
    r.status = head->status;
    r.reason = std::move(head->reason);
    r.headers = std::move(head->headers);
    std::string_view body = raw.substr(head->body_offset);
    if (is_chunked(r.headers)) {
        auto decoded = dechunk(body);
        if (!decoded) throw FormatError("truncated chunked body");
        r.body = std::move(*decoded);
    } else if (auto cl = r.header("Content-Length"); cl && parse_size(*cl, 10)) {
        const auto n = *parse_size(*cl, 10);
        if (body.size() < n) throw FormatError("body shorter than Content-Length");
        r.body = std::string(body.substr(0, n));
    } else {
        r.body = std::string(body);
    }
    return r;
}

FetchResult get(net::Endpoint to, std::string_view host, std::string_view uri, net::Millis timeout) {
    using Clock = std::chrono::steady_clock;
    FetchResult out;
    const auto deadline = Clock::now() + timeout;
    auto conn = net::connect_tcp(to, timeout);
    out.connect = conn.result;
    if (conn.result != TcpResult::Connected) {
        out.error = "connect " + to.to_string() + ": " + std::string(to_string(conn.result));
        return out;
    }
    Request req;
    req.target = std::string(uri);
    req.headers = {{"Host", std::string(host)},
                   {"User-Agent", "blockscope/0.1"},
                   {"Accept", "*/*"},
                   {"Connection", "close"}};
    auto left = [&] {
        return std::max(net::Millis(1), std::chrono::duration_cast<net::Millis>(deadline - Clock::now()));
    };
    if (!net::send_all(conn.socket, req.serialize(), left())) {
        out.error = "send to " + to.to_string() + " failed";
        return out;
    }
    std::string buffer;
    const auto end = net::read_until(conn.socket, buffer, left(), kMaxResponseBytes, response_complete);
    if (end == net::ReadEnd::Timeout) {
        out.error = "timeout reading response from " + to.to_string();
        return out;
    }
    if (end == net::ReadEnd::Error) {
        out.error = "connection reset by " + to.to_string();
        return out;
    }
    if (buffer.empty()) {
        out.error = "empty response from " + to.to_string();
        return out;
    }
    try {
        out.response = parse_response(buffer);
    } catch (const FormatError& e) {
        out.error = std::string("unparseable response: ") + e.what();
    }
    return out;
}

HttpObservation to_observation(std::string_view host, std::string_view uri, const Response& response) {
    return make_http_observation(std::string(host), std::string(uri), response.status,
                                 response.header("Location"), response.header("Last-Modified"), response.body);
}

}  // namespace blockscope::http
