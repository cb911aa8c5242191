#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <utility>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blockscope/ip.hpp"
#include "blockscope/model.hpp"

namespace blockscope::net {

using Millis = std::chrono::milliseconds;

struct Endpoint {
    Ipv4Address address;
    std::uint16_t port = 0;

    /// "a.b.c.d:port"; throws ConfigInvalid.
    static Endpoint parse(std::string_view text);
    std::string to_string() const;

    friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

/// Rewrites logical destinations (a resolver on :53, an origin on :80) to the
/// socket that actually serves them. Exact entries win over port wildcards
/// ("*:80"); unmapped endpoints are dialled as-is.
class EndpointMap {
public:
    void add(Endpoint from, Endpoint to) { exact_[from] = to; }
    void add_port_wildcard(std::uint16_t port, Endpoint to) { by_port_[port] = to; }

    /// Accepts "a.b.c.d:port" or "*:port" keys.
    void add(std::string_view from, std::string_view to);

    Endpoint resolve(Endpoint logical) const;
    bool empty() const noexcept { return exact_.empty() && by_port_.empty(); }

    const std::map<Endpoint, Endpoint>& exact() const noexcept { return exact_; }
    const std::map<std::uint16_t, Endpoint>& by_port() const noexcept { return by_port_; }

private:
    std::map<Endpoint, Endpoint> exact_;
    std::map<std::uint16_t, Endpoint> by_port_;
};

/// Owning file descriptor.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) noexcept : fd_(fd) {}
    Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket();

    int fd() const noexcept { return fd_; }
    bool valid() const noexcept { return fd_ >= 0; }
    void close() noexcept;
    /// shutdown(2) both directions without releasing the descriptor.
    void shutdown() noexcept;

private:
    int fd_ = -1;
};

struct ConnectOutcome {
    TcpResult result = TcpResult::TimedOut;
    Socket socket;  // valid only when Connected
};

ConnectOutcome connect_tcp(Endpoint to, Millis timeout);

/// Writes everything or returns false on error/timeout.
bool send_all(const Socket& s, std::string_view data, Millis timeout);

enum class ReadEnd { Complete, Closed, Timeout, Error, LimitReached };

/// Appends to `buffer` until `complete(buffer)` holds, the peer closes, the
/// deadline passes, or `limit` bytes are buffered.
ReadEnd read_until(const Socket& s, std::string& buffer, Millis timeout, std::size_t limit,
                   const std::function<bool(std::string_view)>& complete);

/// One UDP request/response exchange. Replies from other peers or with a
/// different DNS id are ignored. Returns nullopt on timeout.
std::optional<std::vector<std::uint8_t>> udp_exchange(Endpoint to, std::span<const std::uint8_t> request,
                                                      Millis timeout);

Socket bind_udp(Endpoint local);
Socket listen_tcp(Endpoint local, int backlog = 64);

/// Port a bound socket ended up on.
std::uint16_t local_port(const Socket& s);

/// Waits for readability; false on timeout.
bool wait_readable(const Socket& s, Millis timeout);

Ipv4Address peer_address(const Socket& s);

}  // namespace blockscope::net
