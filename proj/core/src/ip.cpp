#include "blockscope/ip.hpp"

#include <charconv>

#include "blockscope/error.hpp"

namespace blockscope {

std::optional<Ipv4Address> Ipv4Address::try_parse(std::string_view text) noexcept {
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
        const std::size_t end = i < 3 ? text.find('.') : text.size();
        if (end == std::string_view::npos) return std::nullopt;
        const std::string_view part = text.substr(0, end);
        if (part.empty() || part.size() > 3) return std::nullopt;
        if (part.size() > 1 && part.front() == '0') return std::nullopt;
        unsigned octet = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), octet);
        if (ec != std::errc{} || ptr != part.data() + part.size() || octet > 255) return std::nullopt;
        value = (value << 8) | octet;
        text.remove_prefix(i < 3 ? end + 1 : end);
    }
    return Ipv4Address(value);
}

Ipv4Address Ipv4Address::parse(std::string_view text) {
    if (auto addr = try_parse(text)) return *addr;
    throw InvalidAddress("invalid IPv4 address: '" + std::string(text) + "'");
}

std::string Ipv4Address::to_string() const {
    std::string out;
    out.reserve(15);
    for (int i = 0; i < 4; ++i) {
        if (i) out.push_back('.');
        out += std::to_string(octet(i));
    }
    return out;
}

bool Ipv4Address::is_unicast() const noexcept {
    const auto first = octet(0);
    if (first == 0) return false;
    if (first >= 224) return false;  // multicast, reserved, broadcast
    return true;
}

bool is_private_ip(Ipv4Address addr) noexcept {
    const auto a = addr.octet(0);
    const auto b = addr.octet(1);
    if (a == 10) return true;
    if (a == 172 && b >= 16 && b <= 31) return true;
    return a == 192 && b == 168;
}

}  // namespace blockscope
