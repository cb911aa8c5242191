#include <gtest/gtest.h>

#include <blockscope/circumvent.hpp>
#include <blockscope/error.hpp>

#include "generators.hpp"
#include "harness.hpp"

using namespace blockscope;

TEST(Coralize, AppendsSuffixOnly) {
    EXPECT_EQ(coralize(parse_target("http://google.com")).render(), "http://google.com.nyud.net/");
    const auto t = parse_target("http://a.b.c/p?q=1");
    const auto c = coralize(t);
    EXPECT_EQ(c.render(), "http://a.b.c.nyud.net/p?q=1");
    EXPECT_EQ(c.scheme, t.scheme);
    EXPECT_EQ(c.path, t.path);
    EXPECT_EQ(c.query, t.query);
    EXPECT_EQ(c.port, t.port);
    EXPECT_FALSE(strip_coral(t).has_value());
}

TEST(Coralize, StripInvertsOnRandomUrls) {
    gen::Rng rng(52);
    for (int i = 0; i < 1000; ++i) {
        const auto t = gen::target(rng);
        const auto back = strip_coral(coralize(t));
        ASSERT_TRUE(back);
        ASSERT_EQ(*back, t);
    }
}

TEST(CacheUrl, TemplatesEmbedTarget) {
    const auto t = parse_target("http://google.com");
    const auto g = cache_url(t, CacheEngine::GoogleCache);
    EXPECT_NE(g.render().find("cache:http://google.com"), std::string::npos);
    EXPECT_EQ(g.host, "webcache.googleusercontent.com");
    const auto ia = cache_url(parse_target("http://x.org/a?b=1"), CacheEngine::InternetArchive);
    EXPECT_TRUE(ia.render().ends_with("/http://x.org/a?b=1"));
    EXPECT_EQ(cache_url(t, CacheEngine::Bing).host, "cc.bingj.com");
}

TEST(CacheUrl, ExtractionInvertsOnRandomUrls) {
    gen::Rng rng(53);
    for (CacheEngine e : {CacheEngine::GoogleCache, CacheEngine::Bing, CacheEngine::InternetArchive}) {
        for (int i = 0; i < 300; ++i) {
            const auto t = gen::target(rng);
            const auto back = extract_cached(cache_url(t, e), e);
            ASSERT_TRUE(back) << t.render();
            ASSERT_EQ(*back, t);
            ASSERT_EQ(back->render(), t.render());
        }
    }
    EXPECT_FALSE(extract_cached(parse_target("http://other.example/x"), CacheEngine::Bing).has_value());
}

TEST(CacheTemplates, Validation) {
    CacheTemplates t;
    EXPECT_NO_THROW(t.validate());
    t.templates[CacheEngine::Bing] = "http://cc.bingj.com/cache.aspx";
    EXPECT_THROW(t.validate(), ConfigInvalid);
    t.templates[CacheEngine::Bing] = "http://c/{URL}/{URL}";
    EXPECT_THROW(t.validate(), ConfigInvalid);
    t.templates[CacheEngine::Bing] = "http://cache.example/get?u={URL}";
    EXPECT_NO_THROW(t.validate());
    EXPECT_EQ(cache_url(parse_target("a.com"), CacheEngine::Bing, t).render(), "http://cache.example/get?u=http://a.com/");
}

namespace {

OriginZone circumvention_zone() {
    OriginZone z = OriginZone::with_defaults();
    z.hosts.push_back({"youtube.com", Ipv4Address(173, 194, 43, 111), OriginBehavior::Serve, std::nullopt});
    z.hosts.push_back({"blog.example", Ipv4Address(198, 18, 5, 5), OriginBehavior::Serve, std::nullopt});
    z.hosts.push_back({"shop.example", Ipv4Address(198, 18, 5, 5), OriginBehavior::Serve, std::nullopt});
    return z;
}

}  // namespace

TEST(HostHeaderFetch, InjectedForBlockedHostOriginOtherwise) {
    CensorPolicy p;
    p.generation = Generation::Ixp200;
    p.dns_rules = {"youtube.com"};
    p.http_host_rules = {"youtube.com"};
    harness::TestNetwork net(p, circumvention_zone());
    const auto config = net.censored_config();

    const auto blocked = host_header_fetch(Ipv4Address(173, 194, 43, 111), "youtube.com", "/", config);
    ASSERT_TRUE(blocked.observation);
    EXPECT_EQ(blocked.observation->status, 200);
    EXPECT_EQ(classify_http(*blocked.observation, FingerprintSet{}, std::nullopt), Mechanism::Http200Injection);

    const auto a = host_header_fetch(Ipv4Address(198, 18, 5, 5), "blog.example", "/", config);
    const auto b = host_header_fetch(Ipv4Address(198, 18, 5, 5), "shop.example", "/", config);
    ASSERT_TRUE(a.observation && b.observation);
    EXPECT_EQ(a.observation->body_excerpt, OriginStub::default_body("blog.example", "/"));
    EXPECT_NE(a.observation->body_digest, b.observation->body_digest);
}

class Matrix : public ::testing::Test {
protected:
    void build(Generation g, bool block_cdn) {
        gen::Rng rng(static_cast<std::uint64_t>(g) * 10 + block_cdn);
        scenario_ = gen::scenario(rng, g, 24);
        CensorPolicy& p = scenario_.policy;
        p.http_host_uri_rules.clear();
        p.http_host_rules.clear();
        p.dns_rules.clear();
        for (std::size_t i = 0; i < scenario_.targets.size(); ++i) {
            p.http_host_rules.push_back(scenario_.targets[i].host);
            if (i % 2 == 0) p.dns_rules.push_back(scenario_.targets[i].host);
        }
        if (block_cdn) p.http_host_rules.push_back("*.nyud.net");
        net_ = std::make_unique<harness::TestNetwork>(p, scenario_.zone);
        for (const auto& h : scenario_.zone.hosts) config_.host_ip_table[h.pattern] = h.address;
    }

    CircumventionMatrix evaluate() {
        const auto clean = net_->clean_config();
        return evaluate_matrix(scenario_.targets, config_, net_->censored_config(), harness::default_fingerprints(),
                               &clean);
    }

    gen::Scenario scenario_;
    std::unique_ptr<harness::TestNetwork> net_;
    CircumventConfig config_;
};

TEST_F(Matrix, CoralBypassesHostRules) {
    build(Generation::Ixp200, false);
    const auto m = evaluate();
    const auto n = scenario_.targets.size();
    EXPECT_EQ(m.count(Method::CoralCdn, Outcome::Accessible), n);
    EXPECT_EQ(m.count(Method::SearchCache, Outcome::Accessible), n);
    EXPECT_EQ(m.count(Method::WebDnsPlusHostHeader, Outcome::Blocked), n);
    for (const auto& t : scenario_.targets) EXPECT_EQ(m.cells.at(t.render()).size(), 3u);
}

TEST_F(Matrix, CoralBlockedOnceCdnNamesAreRuled) {
    build(Generation::Isp302, true);
    const auto m = evaluate();
    const auto n = scenario_.targets.size();
    EXPECT_EQ(m.count(Method::CoralCdn, Outcome::Blocked), n);
    EXPECT_EQ(m.count(Method::WebDnsPlusHostHeader, Outcome::Blocked), n);
    EXPECT_EQ(m.count(Method::SearchCache, Outcome::Accessible), n);
}

TEST_F(Matrix, MissingLookupIsInconclusive) {
    build(Generation::Ixp200, false);
    config_.host_ip_table.clear();
    config_.methods = {Method::WebDnsPlusHostHeader};
    const auto m = evaluate();
    EXPECT_EQ(m.count(Method::WebDnsPlusHostHeader, Outcome::Inconclusive), scenario_.targets.size());
    for (const auto& [_, row] : m.cells) EXPECT_EQ(row.size(), 1u);
}
