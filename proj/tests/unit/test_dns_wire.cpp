#include <random>

#include <gtest/gtest.h>

#include <blockscope/dns_wire.hpp>

using namespace blockscope;
namespace dns = blockscope::dns;

using Bytes = std::vector<std::uint8_t>;

TEST(DnsWire, QueryLayoutMatchesRfc1035) {
    const Bytes q = dns::encode_query(0xBEEF, "www.youtube.com");
    const Bytes expected = {
        0xBE, 0xEF, 0x01, 0x00,  // id, RD
        0x00, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
        3, 'w', 'w', 'w', 7, 'y', 'o', 'u', 't', 'u', 'b', 'e', 3, 'c', 'o', 'm', 0,
        0x00, 0x01, 0x00, 0x01,  // A, IN
    };
    EXPECT_EQ(q, expected);
}

TEST(DnsWire, NameEncodingRejectsBadLabels) {
    EXPECT_THROW(dns::encode_name(std::string(64, 'a') + ".com"), dns::ParseError);
    EXPECT_THROW(dns::encode_name("a..b"), dns::ParseError);
    EXPECT_EQ(dns::encode_name("").size(), 1u);
}

TEST(DnsWire, ResponseRoundTrip) {
    dns::Message m;
    m.id = 7;
    m.response = true;
    m.recursion_available = true;
    m.questions = {{"example.com", dns::kTypeA, dns::kClassIn}};
    m.answers = {{"example.com", 300, Ipv4Address(93, 184, 216, 34)}, {"example.com", 60, Ipv4Address(1, 2, 3, 4)}};
    const Bytes wire = dns::encode(m);
    // Answers point back at the question name.
    EXPECT_EQ(wire[12 + 13 + 4], 0xC0);
    EXPECT_EQ(wire[12 + 13 + 5], 0x0C);
    EXPECT_EQ(dns::decode(wire), m);
}

TEST(DnsWire, DecodesNxDomainAndSkipsOtherTypes) {
    // Hand-built response: NXDOMAIN with no answers.
    Bytes nx = {0x12, 0x34, 0x81, 0x83, 0, 1, 0, 0, 0, 0, 0, 0, 1, 'a', 3, 'c', 'o', 'm', 0, 0, 1, 0, 1};
    auto m = dns::decode(nx);
    EXPECT_TRUE(m.response);
    EXPECT_EQ(m.rcode, dns::Rcode::NxDomain);
    EXPECT_TRUE(m.answers.empty());

    // CNAME then A, both with compressed owner names.
    Bytes r = {0x00, 0x01, 0x81, 0x80, 0, 1, 0, 2, 0, 0, 0, 0, 1, 'a', 3, 'c', 'o', 'm', 0, 0, 1, 0, 1,
               0xC0, 0x0C, 0, 5, 0, 1, 0, 0, 0, 10, 0, 4, 1, 'b', 0xC0, 0x0E,
               0xC0, 0x0C, 0, 1, 0, 1, 0, 0, 0, 10, 0, 4, 10, 0, 0, 1};
    m = dns::decode(r);
    ASSERT_EQ(m.answers.size(), 1u);
    EXPECT_EQ(m.answers[0].address, Ipv4Address(10, 0, 0, 1));
    EXPECT_EQ(m.answers[0].name, "a.com");
    EXPECT_EQ(m.skipped_records, 1u);
}

TEST(DnsWire, RejectsPointerLoopsAndTruncation) {
    Bytes loop = {0, 1, 0x81, 0x80, 0, 1, 0, 0, 0, 0, 0, 0, 0xC0, 0x0C, 0, 1, 0, 1};
    EXPECT_THROW(dns::decode(loop), dns::ParseError);
    Bytes shortish = {0, 1, 0x81};
    EXPECT_THROW(dns::decode(shortish), dns::ParseError);
    EXPECT_FALSE(dns::peek_id(shortish).has_value());
    Bytes truncated = dns::encode_query(1, "example.com");
    truncated.resize(truncated.size() - 3);
    EXPECT_THROW(dns::decode(truncated), dns::ParseError);
}

TEST(DnsWire, FormErrEchoesId) {
    const Bytes f = dns::encode_formerr(0xABCD);
    const auto m = dns::decode(f);
    EXPECT_EQ(m.id, 0xABCD);
    EXPECT_TRUE(m.response);
    EXPECT_EQ(m.rcode, dns::Rcode::FormErr);
}

TEST(DnsWire, RandomBytesNeverCrashDecoder) {
    std::mt19937 rng(53);
    std::uniform_int_distribution<int> byte(0, 255), len(0, 80);
    for (int i = 0; i < 20000; ++i) {
        Bytes b(static_cast<std::size_t>(len(rng)));
        for (auto& x : b) x = static_cast<std::uint8_t>(byte(rng));
        try {
            (void)dns::decode(b);
        } catch (const dns::ParseError&) {
        }
    }
}
