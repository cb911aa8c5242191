#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "blockscope/model.hpp"
#include "blockscope/net.hpp"

namespace blockscope::http {

using Headers = std::vector<std::pair<std::string, std::string>>;

/// Case-insensitive header lookup; first occurrence wins.
std::optional<std::string> find_header(const Headers& headers, std::string_view name);

struct Request {
    std::string method = "GET";
    std::string target = "/";
    std::string version = "HTTP/1.1";
    Headers headers;

    std::optional<std::string> header(std::string_view name) const { return find_header(headers, name); }
    std::string serialize() const;
    /// "GET / HTTP/1.1"
    std::string request_line() const;
};

struct Response {
    std::string version = "HTTP/1.1";
    int status = 200;
    std::string reason = "OK";
    Headers headers;
    std::string body;

    std::optional<std::string> header(std::string_view name) const { return find_header(headers, name); }
    /// Adds Content-Length and Connection: close when absent.
    std::string serialize() const;
    /// "HTTP/1.1 302 Found (text/html)"
    std::string summary() const;
};

std::string_view reason_phrase(int status) noexcept;

Response make_response(int status, std::string content_type, std::string body, Headers extra = {});

/// Offset just past the blank line ending the header block, if complete.
std::optional<std::size_t> header_end(std::string_view buffer) noexcept;

/// Parses a request head. Returns nullopt when the head is syntactically invalid.
std::optional<Request> parse_request(std::string_view head);

/// Parses a complete response as read off a closed connection. Handles
/// Content-Length, chunked transfer coding and read-until-close bodies.
/// Throws FormatError on an invalid status line.
Response parse_response(std::string_view raw);

/// True once `buffer` holds a full response per its framing headers.
bool response_complete(std::string_view buffer);

struct FetchResult {
    std::optional<Response> response;
    std::string error;  // set when response is absent
    TcpResult connect = TcpResult::Connected;
};

/// One GET over a fresh connection to `to`, with an explicit Host header and
/// no redirect following.
FetchResult get(net::Endpoint to, std::string_view host, std::string_view uri, net::Millis timeout);

/// Records a fetch as an observation.
HttpObservation to_observation(std::string_view host, std::string_view uri, const Response& response);

}  // namespace blockscope::http
