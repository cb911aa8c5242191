#include <gtest/gtest.h>

#include <blockscope/digest.hpp>
#include <blockscope/error.hpp>
#include <blockscope/model.hpp>

using namespace blockscope;

TEST(ResolverSpec, PublicFiveWithRedirectors) {
    const auto pub = public_resolvers();
    ASSERT_EQ(pub.size(), 5u);
    auto redirector = [&](const char* addr) {
        const auto* r = find_resolver(pub, Ipv4Address::parse(addr));
        EXPECT_NE(r, nullptr) << addr;
        return r ? r->nxdomain_redirector : std::nullopt;
    };
    EXPECT_EQ(redirector("8.8.8.8"), std::nullopt);
    EXPECT_EQ(redirector("209.244.0.3"), std::nullopt);
    EXPECT_EQ(redirector("198.153.192.40"), Ipv4Address::parse("198.153.192.3"));
    EXPECT_EQ(redirector("8.26.56.26"), Ipv4Address::parse("92.242.144.50"));
    EXPECT_EQ(redirector("208.67.222.222"), Ipv4Address::parse("67.215.65.132"));
    for (const auto& r : pub) EXPECT_NO_THROW(r.validate());
}

TEST(ResolverSpec, Invariants) {
    ResolverSpec r{"x", Ipv4Address(0, 0, 0, 0), std::nullopt};
    EXPECT_THROW(r.validate(), ConfigInvalid);
    r.address = Ipv4Address(1, 1, 1, 1);
    r.nxdomain_redirector = r.address;
    EXPECT_THROW(r.validate(), ConfigInvalid);
}

TEST(DnsObservation, AnswersMatchOutcome) {
    DnsObservation o;
    o.qname = "a.com";
    o.outcome = DnsOutcome::Answers;
    EXPECT_THROW(o.validate(), FormatError);
    o.answers = {Ipv4Address(1, 2, 3, 4)};
    EXPECT_NO_THROW(o.validate());
    o.outcome = DnsOutcome::NxDomain;
    EXPECT_THROW(o.validate(), FormatError);
}

TEST(TcpObservation, PortRange) {
    TcpObservation t{Ipv4Address(1, 2, 3, 4), 0, TcpResult::Connected};
    EXPECT_THROW(t.validate(), FormatError);
    t.port = 65535;
    EXPECT_NO_THROW(t.validate());
}

TEST(HttpObservation, LocationKeptOnlyForRedirects) {
    auto o = make_http_observation("a.com", "/", 302, "http://10.16.6.41/redirect.php", std::nullopt, "x");
    EXPECT_EQ(o.location, "http://10.16.6.41/redirect.php");
    o = make_http_observation("a.com", "/", 200, "http://elsewhere/", std::nullopt, "x");
    EXPECT_FALSE(o.location.has_value());
    o = make_http_observation("a.com", "/", 301, "https://a.com/", std::nullopt, "x");
    EXPECT_TRUE(o.location.has_value());
}

TEST(HttpObservation, DigestAndExcerpt) {
    const std::string body(10000, 'w');
    const auto o = make_http_observation("a.com", "/", 200, std::nullopt, "Fri, 19 Apr 2013", body);
    EXPECT_EQ(o.body_digest, sha256_hex(body));
    EXPECT_EQ(o.body_excerpt.size(), kBodyExcerptBytes);
    EXPECT_EQ(o.last_modified, "Fri, 19 Apr 2013");
    // Known SHA-256 vector.
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(HttpObservation, StatusRange) {
    HttpObservation o;
    o.request_host = "a.com";
    o.request_uri = "/";
    o.status = 99;
    EXPECT_THROW(o.validate(), FormatError);
    o.status = 600;
    EXPECT_THROW(o.validate(), FormatError);
    o.status = 404;
    EXPECT_NO_THROW(o.validate());
    o.location = "x";
    EXPECT_THROW(o.validate(), FormatError);
}

TEST(Verdict, CleanIffNoMechanisms) {
    Verdict v;
    v.target = parse_target("http://a.com");
    EXPECT_NO_THROW(v.validate());
    v.mechanisms.insert(Mechanism::IpBlock);
    EXPECT_THROW(v.validate(), FormatError);
    v.clean = false;
    EXPECT_NO_THROW(v.validate());
}

TEST(Mechanism, NamesRoundTrip) {
    for (Mechanism m : kAllMechanisms) EXPECT_EQ(parse_mechanism(to_string(m)), m);
    for (auto o : {DnsOutcome::Answers, DnsOutcome::NxDomain, DnsOutcome::Timeout, DnsOutcome::ServFail})
        EXPECT_EQ(parse_dns_outcome(to_string(o)), o);
    for (auto r : {TcpResult::Connected, TcpResult::Refused, TcpResult::TimedOut, TcpResult::Unreachable})
        EXPECT_EQ(parse_tcp_result(to_string(r)), r);
    EXPECT_THROW(parse_mechanism("Bogus"), FormatError);
}

TEST(Digest, Base64RoundTrip) {
    for (std::string s : {std::string(), std::string("a"), std::string("ab"), std::string("abc"),
                          std::string("\0\xff\x10 binary", 10)}) {
        EXPECT_EQ(base64_decode(base64_encode(s)), s);
    }
    EXPECT_EQ(base64_encode("abc"), "YWJj");
    EXPECT_EQ(base64_encode("ab"), "YWI=");
}
