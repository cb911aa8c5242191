#include "blockscope/dataset.hpp"

#include <set>
#include <thread>
#include <tuple>

#include "blockscope/error.hpp"
#include "blockscope/worker_pool.hpp"

namespace blockscope {

std::string_view to_string(RemovalReason r) noexcept {
    switch (r) {
        case RemovalReason::CollapsedIntoDomain: return "CollapsedIntoDomain";
        case RemovalReason::Duplicate: return "Duplicate";
        case RemovalReason::Offline: return "Offline";
    }
    return "?";
}

RemovalReason parse_removal_reason(std::string_view text) {
    for (auto r : {RemovalReason::CollapsedIntoDomain, RemovalReason::Duplicate, RemovalReason::Offline})
        if (to_string(r) == text) return r;
    throw FormatError("unknown removal reason: '" + std::string(text) + "'");
}

void CleaningReport::validate() const {
    if (!(initial_count >= after_collapse && after_collapse >= after_dedupe && after_dedupe >= after_liveness))
        throw FormatError("cleaning report counts are not monotonically non-increasing");
    if (removed.size() != initial_count - after_liveness)
        throw FormatError("cleaning report removal list does not match counts");
}

TargetList load_target_list(std::istream& source) {
    TargetList out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(source, line)) {
        ++number;
        std::string_view view = line;
        if (number == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        const auto first = view.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || view[first] == '#') continue;
        try {
            out.targets.push_back(parse_target(view));
        } catch (const MalformedUrl&) {
            out.rejected.push_back({number, std::string(view), "malformed url"});
        }
    }
    if (out.targets.empty()) throw EmptyList();
    return out;
}

std::vector<TargetUrl> collapse_to_domains(const std::vector<TargetUrl>& targets,
                                           const std::vector<std::string>& collapse_hosts,
                                           std::vector<Removal>* removed) {
    std::vector<TargetUrl> out;
    out.reserve(targets.size());
    std::set<std::string> emitted;
    for (const auto& t : targets) {
        const std::string* domain = nullptr;
        for (const auto& h : collapse_hosts) {
            if (host_within_domain(t.host, h)) {
                domain = &h;
                break;
            }
        }
        if (!domain) {
            out.push_back(t);
            continue;
        }
        if (emitted.insert(*domain).second) {
            out.push_back(parse_target("http://" + *domain + "/"));
        } else if (removed) {
            removed->push_back({t, RemovalReason::CollapsedIntoDomain});
        }
    }
    return out;
}

std::vector<TargetUrl> dedupe(const std::vector<TargetUrl>& targets, std::vector<Removal>* removed) {
    using Key = std::tuple<std::string, std::optional<std::uint16_t>, std::string, std::optional<std::string>>;
    std::set<Key> seen;
    std::vector<TargetUrl> out;
    out.reserve(targets.size());
    for (const auto& t : targets) {
        if (seen.emplace(t.host, t.port, t.path, t.query).second) {
            out.push_back(t);
        } else if (removed) {
            removed->push_back({t, RemovalReason::Duplicate});
        }
    }
    return out;
}

namespace {

bool fetch_alive(const TargetUrl& t, const CleanFetch& fetch, const LivenessOptions& options) {
    const int attempts = std::max(1, options.attempts);
    for (int i = 0; i < attempts; ++i) {
        if (fetch(t).status == FetchStatus::Ok) return true;
        if (i + 1 < attempts && static_cast<std::size_t>(i) < options.backoff.size()) {
            if (options.sleep) options.sleep(options.backoff[static_cast<std::size_t>(i)]);
            else std::this_thread::sleep_for(options.backoff[static_cast<std::size_t>(i)]);
        }
    }
    return false;
}

}  // namespace

LivenessResult liveness_filter(const std::vector<TargetUrl>& targets, const CleanFetch& clean_path,
                               const LivenessOptions& options) {
    if (options.control && !fetch_alive(*options.control, clean_path, options))
        throw CleanPathUnavailable("clean path cannot reach control url " + options.control->render());

    const auto alive = parallel_map<char>(targets.size(), options.workers, [&](std::size_t i) -> char {
        return fetch_alive(targets[i], clean_path, options) ? 1 : 0;
    });

    LivenessResult out;
    out.report.initial_count = out.report.after_collapse = out.report.after_dedupe = targets.size();
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (alive[i]) out.targets.push_back(targets[i]);
        else out.report.removed.push_back({targets[i], RemovalReason::Offline});
    }
    out.report.after_liveness = out.targets.size();
    return out;
}

CleaningResult clean_targets(const std::vector<TargetUrl>& targets, const std::vector<std::string>& collapse_hosts,
                             const CleanFetch& clean_path, const LivenessOptions& options) {
    CleaningResult out;
    out.report.initial_count = targets.size();
    auto collapsed = collapse_to_domains(targets, collapse_hosts, &out.report.removed);
    out.report.after_collapse = collapsed.size();
    auto unique = dedupe(collapsed, &out.report.removed);
    out.report.after_dedupe = unique.size();
    auto live = liveness_filter(unique, clean_path, options);
    out.report.after_liveness = live.targets.size();
    out.report.removed.insert(out.report.removed.end(), live.report.removed.begin(), live.report.removed.end());
    out.targets = std::move(live.targets);
    return out;
}

}  // namespace blockscope
