#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace blockscope {

/// An IPv4 address held in host byte order.
class Ipv4Address {
public:
    constexpr Ipv4Address() = default;
    constexpr explicit Ipv4Address(std::uint32_t host_order) : value_(host_order) {}
    constexpr Ipv4Address(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
        : value_((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) |
                 std::uint32_t{d}) {}

    /// Strict dotted-quad parsing; throws InvalidAddress.
    static Ipv4Address parse(std::string_view text);
    static std::optional<Ipv4Address> try_parse(std::string_view text) noexcept;

    constexpr std::uint32_t value() const noexcept { return value_; }
    constexpr std::uint8_t octet(int i) const noexcept {
        return static_cast<std::uint8_t>(value_ >> (24 - 8 * i));
    }
    std::string to_string() const;

    /// Excludes 0.0.0.0/8, multicast, reserved 240/4 and the limited broadcast address.
    bool is_unicast() const noexcept;

    friend constexpr auto operator<=>(Ipv4Address, Ipv4Address) = default;

private:
    std::uint32_t value_ = 0;
};

/// True iff the address lies in 10.0.0.0/8, 172.16.0.0/12 or 192.168.0.0/16.
bool is_private_ip(Ipv4Address addr) noexcept;

}  // namespace blockscope
