#include "blockscope/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include "blockscope/dns_wire.hpp"
#include "blockscope/error.hpp"

namespace blockscope::net {
namespace {

using Clock = std::chrono::steady_clock;

sockaddr_in to_sockaddr(Endpoint ep) {
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(ep.port);
    sa.sin_addr.s_addr = htonl(ep.address.value());
    return sa;
}

int remaining_ms(Clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<Millis>(deadline - Clock::now()).count();
    return left <= 0 ? 0 : static_cast<int>(left);
}

void set_nonblocking(int fd) {
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

TcpResult classify_errno(int err) {
    switch (err) {
        case ECONNREFUSED:
        case ECONNRESET:
            return TcpResult::Refused;
        case ENETUNREACH:
        case EHOSTUNREACH:
        case EADDRNOTAVAIL:
        case ENETDOWN:
        case EACCES:
        case EPERM:
            return TcpResult::Unreachable;
        default:
            return TcpResult::TimedOut;
    }
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos) throw ConfigInvalid("endpoint missing port: '" + std::string(text) + "'");
    const auto addr = Ipv4Address::try_parse(text.substr(0, colon));
    unsigned port = 0;
    const auto digits = text.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (!addr || digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || port > 65535)
        throw ConfigInvalid("invalid endpoint: '" + std::string(text) + "'");
    return {*addr, static_cast<std::uint16_t>(port)};
}

std::string Endpoint::to_string() const {
    return address.to_string() + ":" + std::to_string(port);
}

void EndpointMap::add(std::string_view from, std::string_view to) {
    const Endpoint target = Endpoint::parse(to);
    if (from.starts_with("*:")) {
        unsigned port = 0;
        const auto digits = from.substr(2);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || port == 0 || port > 65535)
            throw ConfigInvalid("invalid wildcard endpoint: '" + std::string(from) + "'");
        add_port_wildcard(static_cast<std::uint16_t>(port), target);
        return;
    }
    add(Endpoint::parse(from), target);
}

Endpoint EndpointMap::resolve(Endpoint logical) const {
    if (auto it = exact_.find(logical); it != exact_.end()) return it->second;
    if (auto it = by_port_.find(logical.port); it != by_port_.end()) return it->second;
    return logical;
}

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
}

Socket::~Socket() { close(); }

void Socket::close() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
}

void Socket::shutdown() noexcept {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

ConnectOutcome connect_tcp(Endpoint to, Millis timeout) {
    ConnectOutcome out;
    Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!s.valid()) {
        out.result = TcpResult::Unreachable;
        return out;
    }
    set_nonblocking(s.fd());
    const sockaddr_in sa = to_sockaddr(to);
    if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&sa), sizeof sa) == 0) {
        out.result = TcpResult::Connected;
        out.socket = std::move(s);
        return out;
    }
    if (errno != EINPROGRESS) {
        out.result = classify_errno(errno);
        return out;
    }
    pollfd pfd{s.fd(), POLLOUT, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (rc <= 0) {
        out.result = TcpResult::TimedOut;
        return out;
    }
    int err = 0;
    socklen_t len = sizeof err;
    ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) {
        out.result = classify_errno(err);
        return out;
    }
    out.result = TcpResult::Connected;
    out.socket = std::move(s);
    return out;
}

bool send_all(const Socket& s, std::string_view data, Millis timeout) {
    const auto deadline = Clock::now() + timeout;
    while (!data.empty()) {
        const ssize_t n = ::send(s.fd(), data.data(), data.size(), MSG_NOSIGNAL);
        if (n > 0) {
            data.remove_prefix(static_cast<std::size_t>(n));
            continue;
        }
        if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) return false;
        pollfd pfd{s.fd(), POLLOUT, 0};
        if (::poll(&pfd, 1, remaining_ms(deadline)) <= 0) return false;
    }
    return true;
}

ReadEnd read_until(const Socket& s, std::string& buffer, Millis timeout, std::size_t limit,
                   const std::function<bool(std::string_view)>& complete) {
    const auto deadline = Clock::now() + timeout;
    char chunk[8192];
    for (;;) {
        if (complete(buffer)) return ReadEnd::Complete;
        if (buffer.size() >= limit) return ReadEnd::LimitReached;
        pollfd pfd{s.fd(), POLLIN, 0};
        const int rc = ::poll(&pfd, 1, remaining_ms(deadline));
        if (rc == 0) return ReadEnd::Timeout;
        if (rc < 0) {
            if (errno == EINTR) continue;
            return ReadEnd::Error;
        }
        const std::size_t want = std::min(sizeof chunk, limit - buffer.size());
        const ssize_t n = ::recv(s.fd(), chunk, want, 0);
        if (n == 0) return complete(buffer) ? ReadEnd::Complete : ReadEnd::Closed;
        if (n < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
            return ReadEnd::Error;
        }
        buffer.append(chunk, static_cast<std::size_t>(n));
    }
}

std::optional<std::vector<std::uint8_t>> udp_exchange(Endpoint to, std::span<const std::uint8_t> request,
                                                      Millis timeout) {
    Socket s(::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0));
    if (!s.valid()) return std::nullopt;
    const sockaddr_in sa = to_sockaddr(to);
    if (::sendto(s.fd(), request.data(), request.size(), 0, reinterpret_cast<const sockaddr*>(&sa),
                 sizeof sa) < 0)
        return std::nullopt;
    const auto expected_id = dns::peek_id(request);
    const auto deadline = Clock::now() + timeout;
    std::vector<std::uint8_t> buf(65535);
    for (;;) {
        pollfd pfd{s.fd(), POLLIN, 0};
        const int rc = ::poll(&pfd, 1, remaining_ms(deadline));
        if (rc == 0) return std::nullopt;
        if (rc < 0) {
            if (errno == EINTR) continue;
            return std::nullopt;
        }
        sockaddr_in from{};
        socklen_t len = sizeof from;
        const ssize_t n =
            ::recvfrom(s.fd(), buf.data(), buf.size(), 0, reinterpret_cast<sockaddr*>(&from), &len);
        if (n < 0) {
            // ICMP port unreachable surfaces as ECONNREFUSED on some stacks; keep waiting.
            continue;
        }
        if (from.sin_addr.s_addr != sa.sin_addr.s_addr || from.sin_port != sa.sin_port) continue;
        std::span<const std::uint8_t> reply(buf.data(), static_cast<std::size_t>(n));
        if (expected_id && dns::peek_id(reply) != expected_id) continue;
        return std::vector<std::uint8_t>(reply.begin(), reply.end());
    }
}

Socket bind_udp(Endpoint local) {
    Socket s(::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0));
    if (!s.valid()) throw Error(std::string("socket: ") + std::strerror(errno));
    const sockaddr_in sa = to_sockaddr(local);
    if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&sa), sizeof sa) < 0)
        throw Error("bind udp " + local.to_string() + ": " + std::strerror(errno));
    return s;
}

Socket listen_tcp(Endpoint local, int backlog) {
    Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!s.valid()) throw Error(std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    const sockaddr_in sa = to_sockaddr(local);
    if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&sa), sizeof sa) < 0)
        throw Error("bind tcp " + local.to_string() + ": " + std::strerror(errno));
    if (::listen(s.fd(), backlog) < 0) throw Error(std::string("listen: ") + std::strerror(errno));
    return s;
}

std::uint16_t local_port(const Socket& s) {
    sockaddr_in sa{};
    socklen_t len = sizeof sa;
    if (::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&sa), &len) < 0)
        throw Error(std::string("getsockname: ") + std::strerror(errno));
    return ntohs(sa.sin_port);
}

bool wait_readable(const Socket& s, Millis timeout) {
    pollfd pfd{s.fd(), POLLIN, 0};
    return ::poll(&pfd, 1, static_cast<int>(timeout.count())) > 0;
}

Ipv4Address peer_address(const Socket& s) {
    sockaddr_in sa{};
    socklen_t len = sizeof sa;
    if (::getpeername(s.fd(), reinterpret_cast<sockaddr*>(&sa), &len) < 0) return {};
    return Ipv4Address(ntohl(sa.sin_addr.s_addr));
}

}  // namespace blockscope::net
