#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include <blockscope/error.hpp>
#include <blockscope/report.hpp>

#include "oracles.hpp"

using namespace blockscope;

namespace {

Verdict verdict(std::size_t i, MechanismSet m, bool inconclusive = false) {
    Verdict v;
    v.target = parse_target("http://site" + std::to_string(i) + ".example/");
    v.clean = m.empty();
    v.mechanisms = std::move(m);
    v.inconclusive = inconclusive;
    return v;
}

/// `dns` DNS-injected sites, then `http` HTTP-blocked sites, the rest clean.
std::vector<Verdict> campaign(std::size_t total, std::size_t dns, std::size_t http_count, Mechanism http) {
    std::vector<Verdict> out;
    for (std::size_t i = 0; i < total; ++i) {
        if (i < dns) out.push_back(verdict(i, {Mechanism::DnsInjection}));
        else if (i < dns + http_count) out.push_back(verdict(i, {http}));
        else out.push_back(verdict(i, {}));
    }
    return out;
}

}  // namespace

struct PercentCase {
    std::uint64_t count, total;
    const char* text;
};

void PrintTo(const PercentCase& c, std::ostream* os) { *os << c.count << "/" << c.total; }

class PercentVectors : public ::testing::TestWithParam<PercentCase> {};

TEST_P(PercentVectors, MatchesHalfEvenDecimal) {
    const auto& c = GetParam();
    EXPECT_EQ(Percent::of(c.count, c.total).to_string(), c.text);
    EXPECT_EQ(oracle::percent_text(c.count, c.total), c.text);
    EXPECT_EQ(Percent::parse(c.text), Percent::of(c.count, c.total));
}

INSTANTIATE_TEST_SUITE_P(Known, PercentVectors,
                         ::testing::Values(PercentCase{187, 307, "60.91"}, PercentCase{5, 307, "1.63"},
                                           PercentCase{192, 307, "62.54"}, PercentCase{179, 307, "58.31"},
                                           PercentCase{184, 307, "59.93"}, PercentCase{1, 32, "3.12"},
                                           PercentCase{3, 32, "9.38"}, PercentCase{1, 16, "6.25"},
                                           PercentCase{1, 1600, "0.06"}, PercentCase{3, 1600, "0.19"},
                                           PercentCase{5, 1600, "0.31"}, PercentCase{0, 10, "0.00"},
                                           PercentCase{10, 10, "100.00"}, PercentCase{1, 3, "33.33"},
                                           PercentCase{2, 3, "66.67"}, PercentCase{1, 8, "12.50"},
                                           PercentCase{7, 800, "0.88"}, PercentCase{9, 800, "1.12"},
                                           PercentCase{1, 7, "14.29"}),
                         [](const auto& info) {
                             return std::to_string(info.param.count) + "_of_" + std::to_string(info.param.total);
                         });

TEST(Percent, AgreesWithOracleOnRandomFractions) {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 20000; ++i) {
        const std::uint64_t total = std::uniform_int_distribution<std::uint64_t>(1, 100000)(rng);
        const std::uint64_t count = std::uniform_int_distribution<std::uint64_t>(0, total)(rng);
        ASSERT_EQ(Percent::of(count, total).to_string(), oracle::percent_text(count, total)) << count << "/" << total;
    }
}

TEST(Percent, ParseRejectsMalformed) {
    for (const char* bad : {"", ".5", "1.234", "-1.00", "1.x", "abc", "1..2"})
        EXPECT_THROW(Percent::parse(bad), FormatError) << bad;
    EXPECT_EQ(Percent::parse("7").hundredths, 700);
    EXPECT_EQ(Percent::parse("7.5").hundredths, 750);
}

TEST(Aggregate, IspShapedCampaign) {
    const auto v = campaign(307, 187, 5, Mechanism::Http302Redirect);
    const auto r = aggregate(v, 307);
    EXPECT_EQ(r.counts.at(Mechanism::Http302Redirect), 5u);
    EXPECT_EQ(r.counts.at(Mechanism::DnsInjection), 187u);
    EXPECT_EQ(r.counts.at(Mechanism::IpBlock), 0u);
    EXPECT_EQ(r.blocked_total, 192u);
    EXPECT_EQ(r.percents.at(Mechanism::DnsInjection).to_string(), "60.91");
    EXPECT_EQ(r.percents.at(Mechanism::Http302Redirect).to_string(), "1.63");
    EXPECT_EQ(r.blocked_percent.to_string(), "62.54");
    EXPECT_EQ(r.counts.size(), kAllMechanisms.size());
    EXPECT_NO_THROW(r.validate());
}

TEST(Aggregate, IxpShapedCampaign) {
    const auto r = aggregate(campaign(307, 179, 5, Mechanism::Http200Injection), 307);
    EXPECT_EQ(r.percents.at(Mechanism::DnsInjection).to_string(), "58.31");
    EXPECT_EQ(r.percents.at(Mechanism::Http200Injection).to_string(), "1.63");
    EXPECT_EQ(r.blocked_percent.to_string(), "59.93");
}

TEST(Aggregate, NoVerdictsMeansZeros) {
    const auto r = aggregate({}, 10);
    EXPECT_EQ(r.blocked_total, 0u);
    for (Mechanism m : kAllMechanisms) EXPECT_EQ(r.percents.at(m).hundredths, 0);
}

TEST(Aggregate, MultiMechanismSiteCountedOncePerRowAndOnceInTotal) {
    std::vector<Verdict> v = {verdict(0, {Mechanism::DnsInjection, Mechanism::UrlKeyword, Mechanism::Http200Injection}),
                              verdict(1, {}), verdict(2, {}, true)};
    const auto r = aggregate(v, 4, 1);
    EXPECT_EQ(r.blocked_total, 1u);
    EXPECT_EQ(r.counts.at(Mechanism::UrlKeyword), 1u);
    EXPECT_EQ(r.percents.at(Mechanism::Http200Injection).to_string(), "25.00");
    EXPECT_EQ(r.inconclusive, 1u);
    EXPECT_EQ(r.error_logged, 1u);
}

TEST(Aggregate, Errors) {
    EXPECT_THROW(aggregate({}, 0), EmptyCampaign);
    const auto v = campaign(3, 0, 1, Mechanism::Http302Redirect);
    EXPECT_THROW(aggregate(v, 2), Error);
}

TEST(Aggregate, OrderDoesNotMatter) {
    std::mt19937_64 rng(62);
    auto v = campaign(307, 179, 5, Mechanism::Http200Injection);
    v[300].inconclusive = true;
    const auto base = aggregate(v, 307);
    for (int i = 0; i < 100; ++i) {
        std::shuffle(v.begin(), v.end(), rng);
        ASSERT_EQ(aggregate(v, 307), base);
    }
}

TEST(RenderTable, RowsAndTotals) {
    const auto r = aggregate(campaign(307, 187, 5, Mechanism::Http302Redirect), 307);
    const auto text = render_table(r);
    for (const char* needle : {"DNS", "IP", "URL-keyword", "HTTP (302)", "Total", "62.54", "60.91", "1.63", "0.00",
                               "(307 sites tested)"})
        EXPECT_NE(text.find(needle), std::string::npos) << needle;
    EXPECT_EQ(text.find("HTTP (200)"), std::string::npos);
    EXPECT_EQ(text.find("* "), std::string::npos);

    const auto lines = std::count(text.begin(), text.end(), '\n');
    EXPECT_EQ(lines, 1 + 1 + 4 + 1 + 1 + 1);
}

TEST(RenderTable, IxpCampaignUses200Row) {
    const auto text = render_table(aggregate(campaign(307, 179, 5, Mechanism::Http200Injection), 307));
    EXPECT_NE(text.find("HTTP (200)"), std::string::npos);
    EXPECT_EQ(text.find("HTTP (302)"), std::string::npos);
    EXPECT_NE(text.find("59.93"), std::string::npos);
}

TEST(RenderTable, AllCleanStillListsEveryRow) {
    const auto text = render_table(aggregate(campaign(10, 0, 0, Mechanism::Http302Redirect), 10));
    for (const char* needle : {"DNS", "IP", "URL-keyword", "HTTP (302)", "Total"})
        EXPECT_NE(text.find(needle), std::string::npos) << needle;
    EXPECT_NE(text.find("0.00"), std::string::npos);
}

TEST(RenderTable, Footnotes) {
    std::vector<Verdict> v = {verdict(0, {}, true), verdict(1, {Mechanism::Http302Redirect})};
    const auto text = render_table(aggregate(v, 2, 3));
    EXPECT_NE(text.find("1 site(s) with inconclusive"), std::string::npos);
    EXPECT_NE(text.find("3 site(s) excluded"), std::string::npos);
}
