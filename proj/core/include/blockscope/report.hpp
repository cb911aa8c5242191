#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "blockscope/model.hpp"

namespace blockscope {

/// A percentage held as an integer number of hundredths (62.54 -> 6254).
struct Percent {
    std::int64_t hundredths = 0;

    /// count / total * 100, rounded half-to-even at two decimals. Exact integer arithmetic.
    static Percent of(std::uint64_t count, std::uint64_t total);
    /// Parses "62.54" style text; throws FormatError.
    static Percent parse(std::string_view text);

    double value() const noexcept { return static_cast<double>(hundredths) / 100.0; }
    std::string to_string() const;

    friend auto operator<=>(Percent, Percent) = default;
};

struct RunReport {
    std::size_t total = 0;
    std::map<Mechanism, std::size_t> counts;   // every mechanism present, zero included
    std::map<Mechanism, Percent> percents;
    std::size_t blocked_total = 0;             // targets with at least one mechanism
    Percent blocked_percent;
    std::size_t inconclusive = 0;
    std::size_t error_logged = 0;

    void validate() const;
    bool operator==(const RunReport&) const = default;
};

/// Per-mechanism site counts over reportable verdicts. Throws EmptyCampaign when total is 0.
RunReport aggregate(std::span<const Verdict> verdicts, std::size_t total, std::size_t error_logged = 0);

/// Fixed-column table: DNS, IP, URL-keyword, the HTTP row(s) in use, Total.
std::string render_table(const RunReport& report);

}  // namespace blockscope
