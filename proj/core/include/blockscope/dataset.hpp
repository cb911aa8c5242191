#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "blockscope/url.hpp"

namespace blockscope {

struct Rejection {
    std::size_t line = 0;  // 1-based
    std::string text;
    std::string reason;

    bool operator==(const Rejection&) const = default;
};

struct TargetList {
    std::vector<TargetUrl> targets;
    std::vector<Rejection> rejected;
};

/// One URL per line; '#' comments and blank lines are skipped, malformed
/// lines are collected. Throws EmptyList when nothing valid remains.
TargetList load_target_list(std::istream& source);

enum class RemovalReason { CollapsedIntoDomain, Duplicate, Offline };

std::string_view to_string(RemovalReason) noexcept;
RemovalReason parse_removal_reason(std::string_view);

struct Removal {
    TargetUrl target;
    RemovalReason reason = RemovalReason::Duplicate;

    bool operator==(const Removal&) const = default;
};

struct CleaningReport {
    std::size_t initial_count = 0;
    std::size_t after_collapse = 0;
    std::size_t after_dedupe = 0;
    std::size_t after_liveness = 0;
    std::vector<Removal> removed;

    void validate() const;
    bool operator==(const CleaningReport&) const = default;
};

/// Every target inside one of `collapse_hosts` (the host itself or a
/// subdomain) is folded into a single "http://<collapse host>/" entry placed
/// where the first such target stood. Folded-away entries are appended to
/// `removed` when given.
std::vector<TargetUrl> collapse_to_domains(const std::vector<TargetUrl>& targets,
                                           const std::vector<std::string>& collapse_hosts,
                                           std::vector<Removal>* removed = nullptr);

/// Keeps the first occurrence of each (host, port, path, query).
std::vector<TargetUrl> dedupe(const std::vector<TargetUrl>& targets, std::vector<Removal>* removed = nullptr);

enum class FetchStatus { Ok, DnsFailure, ConnectFailure };

/// Result of fetching one URL over the clean path. Any HTTP status counts as Ok.
struct CleanFetchResult {
    FetchStatus status = FetchStatus::Ok;
    int http_status = 0;
};

using CleanFetch = std::function<CleanFetchResult(const TargetUrl&)>;

struct LivenessOptions {
    int attempts = 3;
    /// Wait after failed attempt i before attempt i+1.
    std::vector<std::chrono::milliseconds> backoff = {std::chrono::seconds(1), std::chrono::seconds(2),
                                                      std::chrono::seconds(4)};
    std::size_t workers = 8;
    /// Fetched first; failure means the clean channel itself is down.
    std::optional<TargetUrl> control;
    std::function<void(std::chrono::milliseconds)> sleep;  // defaults to std::this_thread::sleep_for
};

struct LivenessResult {
    std::vector<TargetUrl> targets;
    CleaningReport report;
};

/// Drops targets whose clean-path fetch fails at the DNS or connection level
/// on every attempt. Throws CleanPathUnavailable when the control URL fails.
LivenessResult liveness_filter(const std::vector<TargetUrl>& targets, const CleanFetch& clean_path,
                               const LivenessOptions& options = {});

struct CleaningResult {
    std::vector<TargetUrl> targets;
    CleaningReport report;
};

/// collapse -> dedupe -> liveness, in that order.
CleaningResult clean_targets(const std::vector<TargetUrl>& targets, const std::vector<std::string>& collapse_hosts,
                             const CleanFetch& clean_path, const LivenessOptions& options = {});

}  // namespace blockscope
