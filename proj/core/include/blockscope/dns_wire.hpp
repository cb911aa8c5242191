#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blockscope/error.hpp"
#include "blockscope/ip.hpp"

namespace blockscope::dns {

/// Minimal DNS message codec: A queries, A answers, NXDOMAIN and error rcodes.
/// Non-A records in a response are skipped, compression pointers are followed.

class ParseError : public FormatError {
public:
    explicit ParseError(const std::string& what) : FormatError("dns: " + what) {}
};

enum class Rcode : std::uint8_t {
    NoError = 0,
    FormErr = 1,
    ServFail = 2,
    NxDomain = 3,
    NotImp = 4,
    Refused = 5,
};

inline constexpr std::uint16_t kTypeA = 1;
inline constexpr std::uint16_t kClassIn = 1;
inline constexpr std::size_t kHeaderSize = 12;

struct Question {
    std::string name;
    std::uint16_t qtype = kTypeA;
    std::uint16_t qclass = kClassIn;

    bool operator==(const Question&) const = default;
};

struct ARecord {
    std::string name;
    std::uint32_t ttl = 0;
    Ipv4Address address;

    bool operator==(const ARecord&) const = default;
};

struct Message {
    std::uint16_t id = 0;
    bool response = false;
    std::uint8_t opcode = 0;
    bool authoritative = false;
    bool truncated = false;
    bool recursion_desired = true;
    bool recursion_available = false;
    Rcode rcode = Rcode::NoError;
    std::vector<Question> questions;
    std::vector<ARecord> answers;
    std::size_t skipped_records = 0;  // non-A answers seen while decoding

    bool operator==(const Message&) const = default;
};

/// Wire-format name, e.g. "\x03www\x07example\x03com\x00". Throws ParseError on bad labels.
std::vector<std::uint8_t> encode_name(std::string_view name);

std::vector<std::uint8_t> encode_query(std::uint16_t id, std::string_view qname);

/// Encodes header, questions and A answers; answers reuse the first question name by pointer.
std::vector<std::uint8_t> encode(const Message& msg);

Message decode(std::span<const std::uint8_t> wire);

/// Reads the transaction id if at least a header's worth of bytes is present.
std::optional<std::uint16_t> peek_id(std::span<const std::uint8_t> wire) noexcept;

/// FORMERR reply echoing only the id of an unparseable query.
std::vector<std::uint8_t> encode_formerr(std::uint16_t id);

}  // namespace blockscope::dns
