#include <random>

#include <gtest/gtest.h>

#include <blockscope/error.hpp>
#include <blockscope/url.hpp>

#include "generators.hpp"

using namespace blockscope;

TEST(ParseTarget, PlainHost) {
    const auto t = parse_target("http://www.youtube.com");
    EXPECT_EQ(t.scheme, Scheme::Http);
    EXPECT_EQ(t.host, "www.youtube.com");
    EXPECT_EQ(t.path, "/");
    EXPECT_FALSE(t.query.has_value());
    EXPECT_EQ(t.raw, "http://www.youtube.com");
}

TEST(ParseTarget, FoldsHostCaseOnly) {
    const auto t = parse_target("HTTP://Example.COM/A");
    EXPECT_EQ(t.scheme, Scheme::Http);
    EXPECT_EQ(t.host, "example.com");
    EXPECT_EQ(t.path, "/A");
}

TEST(ParseTarget, RejectsText) {
    EXPECT_THROW(parse_target("not a url"), MalformedUrl);
}

TEST(ParseTarget, DefaultsAndNormalisation) {
    auto t = parse_target("vimeo.com/64414932");
    EXPECT_EQ(t.scheme, Scheme::Http);
    EXPECT_EQ(t.host, "vimeo.com");
    EXPECT_EQ(t.path, "/64414932");

    t = parse_target("https://a.b.c:443/p?q=1#frag");
    EXPECT_EQ(t.scheme, Scheme::Https);
    EXPECT_FALSE(t.port.has_value());
    EXPECT_EQ(t.path, "/p");
    EXPECT_EQ(t.query, "q=1");
    EXPECT_EQ(t.render(), "https://a.b.c/p?q=1");

    t = parse_target("http://a.b.c:8080");
    EXPECT_EQ(t.port, 8080);
    EXPECT_EQ(t.render(), "http://a.b.c:8080/");
    EXPECT_EQ(t.request_uri(), "/");

    t = parse_target("  http://Example.com./x  ");
    EXPECT_EQ(t.host, "example.com");

    t = parse_target("http://10.16.6.41/redirect.php?n=1");
    EXPECT_EQ(t.host, "10.16.6.41");
    EXPECT_EQ(t.request_uri(), "/redirect.php?n=1");
}

TEST(ParseTarget, RejectionCases) {
    for (const char* bad : {"", "   ", "ftp://example.com/", "http://", "http:///path", "http://localhost/",
                            "http://exa mple.com/", "http://user@example.com/", "http://example.com:0/",
                            "http://example.com:99999/", "http://-bad-.com/", "http://a..b.com/", "#only"}) {
        EXPECT_THROW(parse_target(bad), MalformedUrl) << bad;
    }
}

TEST(ParseTarget, EqualityIgnoresRaw) {
    EXPECT_EQ(parse_target("http://a.com"), parse_target("HTTP://A.COM/"));
    EXPECT_NE(parse_target("http://a.com/x"), parse_target("http://a.com/X"));
}

TEST(ParseTarget, RoundTripsRandomUrls) {
    gen::Rng rng(597);
    for (int i = 0; i < 2000; ++i) {
        const std::string text = gen::url_text(rng);
        const TargetUrl t = parse_target(text);
        EXPECT_FALSE(t.host.empty());
        EXPECT_EQ(t.host, to_lower(t.host));
        EXPECT_TRUE(t.path.starts_with("/"));
        const TargetUrl again = parse_target(t.render());
        ASSERT_EQ(again, t) << text;
        ASSERT_EQ(again.render(), t.render());
    }
}

TEST(ParseTarget, TotalOverArbitraryLines) {
    // Every input either parses or throws MalformedUrl.
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> byte(1, 126);
    std::uniform_int_distribution<int> len(0, 40);
    for (int i = 0; i < 5000; ++i) {
        std::string s;
        const int n = len(rng);
        for (int j = 0; j < n; ++j) s += static_cast<char>(byte(rng));
        try {
            (void)parse_target(s);
        } catch (const MalformedUrl&) {
        }
    }
}

TEST(HostPatterns, ExactAndWildcard) {
    EXPECT_TRUE(host_matches_pattern("youtube.com", "youtube.com"));
    EXPECT_FALSE(host_matches_pattern("www.youtube.com", "youtube.com"));
    EXPECT_TRUE(host_matches_pattern("www.youtube.com", "*.youtube.com"));
    EXPECT_TRUE(host_matches_pattern("a.b.youtube.com", "*.youtube.com"));
    EXPECT_FALSE(host_matches_pattern("youtube.com", "*.youtube.com"));
    EXPECT_FALSE(host_matches_pattern("notyoutube.com", "*.youtube.com"));

    EXPECT_TRUE(host_within_domain("youtube.com", "youtube.com"));
    EXPECT_TRUE(host_within_domain("m.youtube.com", "youtube.com"));
    EXPECT_FALSE(host_within_domain("myyoutube.com", "youtube.com"));
}

TEST(Hostnames, Validity) {
    EXPECT_TRUE(is_valid_hostname("www.example.com"));
    EXPECT_TRUE(is_valid_hostname("1.2.3.4"));
    EXPECT_FALSE(is_valid_hostname("Example.com"));
    EXPECT_FALSE(is_valid_hostname("example.com."));
    EXPECT_TRUE(is_valid_hostname("exa_mple.com"));
    EXPECT_FALSE(is_valid_hostname("exa mple.com"));
    EXPECT_FALSE(is_valid_hostname(std::string(64, 'a') + ".com"));
}
