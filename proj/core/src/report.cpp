#include "blockscope/report.hpp"

#include <charconv>
#include <cstdio>
#include <numeric>

#include "blockscope/error.hpp"

namespace blockscope {

Percent Percent::of(std::uint64_t count, std::uint64_t total) {
    if (total == 0) throw EmptyCampaign();
    const std::uint64_t scaled = count * 10000;
    std::uint64_t q = scaled / total;
    const std::uint64_t r = scaled % total;
    // Compare 2r against total to avoid fractions.
    if (2 * r > total || (2 * r == total && (q % 2 == 1))) ++q;
    return Percent{static_cast<std::int64_t>(q)};
}

Percent Percent::parse(std::string_view text) {
    const auto dot = text.find('.');
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty() || frac.size() > 2) throw FormatError("invalid percent '" + std::string(text) + "'");
    std::int64_t w = 0;
    auto [p1, e1] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
    if (e1 != std::errc{} || p1 != whole.data() + whole.size() || w < 0)
        throw FormatError("invalid percent '" + std::string(text) + "'");
    std::int64_t f = 0;
    if (!frac.empty()) {
        auto [p2, e2] = std::from_chars(frac.data(), frac.data() + frac.size(), f);
        if (e2 != std::errc{} || p2 != frac.data() + frac.size())
            throw FormatError("invalid percent '" + std::string(text) + "'");
        if (frac.size() == 1) f *= 10;
    }
    return Percent{w * 100 + f};
}

std::string Percent::to_string() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld.%02lld", static_cast<long long>(hundredths / 100),
                  static_cast<long long>(hundredths % 100));
    return buf;
}

void RunReport::validate() const {
    std::size_t sum = 0;
    for (const auto& [_, c] : counts) sum += c;
    if (sum < blocked_total) throw FormatError("mechanism counts sum below blocked total");
    if (blocked_total > total) throw FormatError("blocked total exceeds total");
}

RunReport aggregate(std::span<const Verdict> verdicts, std::size_t total, std::size_t error_logged) {
    if (total == 0) throw EmptyCampaign();
    if (verdicts.size() > total) throw Error("more verdicts than targets in campaign");
    RunReport report;
    report.total = total;
    report.error_logged = error_logged;
    for (Mechanism m : kAllMechanisms) report.counts[m] = 0;
    for (const auto& v : verdicts) {
        for (Mechanism m : v.mechanisms) ++report.counts[m];
        if (!v.mechanisms.empty()) ++report.blocked_total;
        if (v.inconclusive) ++report.inconclusive;
    }
    for (Mechanism m : kAllMechanisms) report.percents[m] = Percent::of(report.counts[m], total);
    report.blocked_percent = Percent::of(report.blocked_total, total);
    return report;
}

std::string render_table(const RunReport& report) {
    auto count_of = [&](Mechanism m) {
        auto it = report.counts.find(m);
        return it == report.counts.end() ? std::size_t{0} : it->second;
    };
    auto percent_of = [&](Mechanism m) {
        auto it = report.percents.find(m);
        return it == report.percents.end() ? Percent{} : it->second;
    };

    struct Row {
        const char* label;
        std::size_t count;
        Percent percent;
    };
    std::vector<Row> rows = {
        {"DNS", count_of(Mechanism::DnsInjection), percent_of(Mechanism::DnsInjection)},
        {"IP", count_of(Mechanism::IpBlock), percent_of(Mechanism::IpBlock)},
        {"URL-keyword", count_of(Mechanism::UrlKeyword), percent_of(Mechanism::UrlKeyword)},
    };
    const std::size_t n302 = count_of(Mechanism::Http302Redirect);
    const std::size_t n200 = count_of(Mechanism::Http200Injection);
    if (n302 > 0 || n200 == 0) rows.push_back({"HTTP (302)", n302, percent_of(Mechanism::Http302Redirect)});
    if (n200 > 0) rows.push_back({"HTTP (200)", n200, percent_of(Mechanism::Http200Injection)});

    std::string out;
    char line[128];
    std::snprintf(line, sizeof line, "%-13s %21s %8s\n", "Mechanism", "No. of Affected Sites", "Percent");
    out += line;
    out += std::string(44, '-') + "\n";
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-13s %21zu %8s\n", r.label, r.count, r.percent.to_string().c_str());
        out += line;
    }
    out += std::string(44, '-') + "\n";
    std::snprintf(line, sizeof line, "%-13s %21zu %8s\n", "Total", report.blocked_total,
                  report.blocked_percent.to_string().c_str());
    out += line;
    std::snprintf(line, sizeof line, "(%zu sites tested)\n", report.total);
    out += line;
    if (report.inconclusive > 0) {
        std::snprintf(line, sizeof line, "* %zu site(s) with inconclusive HTTP evidence, not counted as blocked\n",
                      report.inconclusive);
        out += line;
    }
    if (report.error_logged > 0) {
        std::snprintf(line, sizeof line, "* %zu site(s) excluded for error-log entries\n", report.error_logged);
        out += line;
    }
    return out;
}

}  // namespace blockscope
