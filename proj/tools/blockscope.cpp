// blockscope command-line front end.
//
// Exit codes: 0 success, 1 usage or input error, 2 the campaign itself failed.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include <blockscope/circumvent.hpp>
#include <blockscope/classifier.hpp>
#include <blockscope/dataset.hpp>
#include <blockscope/emulator.hpp>
#include <blockscope/error.hpp>
#include <blockscope/probe.hpp>
#include <blockscope/report.hpp>
#include <blockscope/serialize.hpp>

using namespace blockscope;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kCampaignFailed = 2;

/// Raised for failures of the run rather than of its inputs.
class CampaignFailure : public Error {
public:
    using Error::Error;
};

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

std::vector<TargetUrl> read_targets(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open");
    const auto list = load_target_list(in);
    for (const auto& r : list.rejected)
        std::fprintf(stderr, "warning: %s:%zu: skipped '%s'\n", path.c_str(), r.line, r.text.c_str());
    return list.targets;
}

ProbeConfig probe_config(const std::string& path, std::size_t workers) {
    ProbeConfig c = path.empty() ? io::parse_probe_config("{}") : io::parse_probe_config(io::read_text(path));
    if (workers > 0) c.workers = workers;
    c.validate();
    return c;
}

FingerprintSet fingerprints(const std::string& path) {
    return path.empty() ? FingerprintSet{} : io::parse_fingerprints(io::read_text(path));
}

void print_summary(const RunReport& report) { std::fputs(render_table(report).c_str(), stdout); }

struct Options {
    std::string targets, config, clean_config, policy, out, fingerprints, reference, report, input;
    std::size_t workers = 0;
    std::vector<std::string> collapse = {"youtube.com"};
    std::string bind = "127.0.0.1";
    std::uint16_t http_port = 8080;
    std::uint16_t dns_base_port = 5300;
    double seconds = 0;
};

int run_probe(const Options& o) {
    const auto targets = read_targets(o.targets);
    const auto config = probe_config(o.config, o.workers);
    const auto campaign = run_campaign(targets, config);
    io::emit(campaign.results, o.out);
    if (!o.clean_config.empty()) {
        const auto reference = collect_reference(targets, probe_config(o.clean_config, o.workers));
        io::emit(reference, o.reference.empty() ? o.out + ".reference.json" : o.reference);
    }
    const auto& s = campaign.summary;
    std::printf("%zu targets, %zu reportable, %zu error-logged\n", s.targets, s.reportable, s.error_logged);
    if (s.reportable == 0) throw CampaignFailure("every target has error-log entries");
    return kOk;
}

int run_classify(const Options& o) {
    const auto results = io::load<std::vector<TargetProbeResult>>(o.input);
    const auto fp = fingerprints(o.fingerprints);
    fp.validate();
    const Reference reference = o.reference.empty() ? Reference{} : io::load<Reference>(o.reference);
    const auto known = o.config.empty() ? public_resolvers() : probe_config(o.config, 0).resolvers;
    const auto classified = classify_campaign(results, fp, known, reference);
    if (!o.out.empty()) io::emit(classified.verdicts, o.out);
    if (classified.total == 0) throw CampaignFailure("no reportable targets to classify");
    const auto report = aggregate(classified.verdicts, classified.total, classified.error_logged);
    if (!o.report.empty()) io::emit(report, o.report);
    print_summary(report);
    return kOk;
}

int run_report(const Options& o) {
    const std::string text = io::read_text(o.input);
    RunReport report;
    try {
        report = io::decode<RunReport>(text);
    } catch (const FormatError&) {
        const auto verdicts = io::decode<std::vector<Verdict>>(text);
        if (verdicts.empty()) throw CampaignFailure("verdict file is empty");
        report = aggregate(verdicts, verdicts.size());
    }
    report.validate();
    if (!o.out.empty()) io::emit(report, o.out);
    print_summary(report);
    return kOk;
}

int run_emulate(const Options& o) {
    const auto setup = load_policy_file(o.policy);
    EmulatorOptions eo;
    eo.bind = Ipv4Address::parse(o.bind);
    eo.http_port = o.http_port;
    eo.dns_base_port = o.dns_base_port;
    Emulator emu(setup.policy, setup.zone, eo);
    try {
        emu.start();
    } catch (const Error& e) {
        throw CampaignFailure(e.what());
    }

    // The endpoint map a probe config needs to reach this emulator.
    std::vector<std::string> lines;
    const auto map = emu.endpoint_map();
    for (const auto& [from, to] : map.exact()) lines.push_back("\"" + from.to_string() + "\": \"" + to.to_string() + "\"");
    for (const auto& [port, to] : map.by_port())
        lines.push_back("\"*:" + std::to_string(port) + "\": \"" + to.to_string() + "\"");
    std::printf("{\n  \"endpoints\": {\n");
    for (std::size_t i = 0; i < lines.size(); ++i)
        std::printf("    %s%s\n", lines[i].c_str(), i + 1 < lines.size() ? "," : "");
    std::printf("  }\n}\n");
    std::fflush(stdout);

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(o.seconds);
    while (!g_stop && (o.seconds <= 0 || std::chrono::steady_clock::now() < deadline))
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    emu.stop();
    if (!o.out.empty()) io::emit(emu.transcripts(), o.out);
    return kOk;
}

int run_circumvent(const Options& o) {
    const auto targets = read_targets(o.targets);
    const auto censored = probe_config(o.config, o.workers);
    const auto config = o.config.empty() ? CircumventConfig{} : io::parse_circumvent_config(io::read_text(o.config));
    std::optional<ProbeConfig> clean;
    if (!o.clean_config.empty()) clean = probe_config(o.clean_config, o.workers);
    const auto matrix = evaluate_matrix(targets, config, censored, fingerprints(o.fingerprints), clean ? &*clean : nullptr);
    io::emit(matrix, o.out);
    for (Method m : config.methods)
        std::printf("%-22s accessible %zu  blocked %zu  inconclusive %zu\n", std::string(to_string(m)).c_str(),
                    matrix.count(m, Outcome::Accessible), matrix.count(m, Outcome::Blocked),
                    matrix.count(m, Outcome::Inconclusive));
    return kOk;
}

int run_clean(const Options& o) {
    const auto targets = read_targets(o.targets);
    const auto clean = probe_config(o.config, o.workers);
    LivenessOptions lo;
    lo.workers = clean.workers;
    lo.control = clean.keyword_portal;
    CleaningResult result;
    try {
        result = clean_targets(targets, o.collapse, make_clean_fetch(clean), lo);
    } catch (const CleanPathUnavailable& e) {
        throw CampaignFailure(e.what());
    }
    std::string text;
    for (const auto& t : result.targets) text += t.render() + "\n";
    io::write_text(o.out, text);
    if (!o.report.empty()) io::emit(result.report, o.report);
    const auto& r = result.report;
    std::printf("%zu -> %zu collapsed -> %zu deduplicated -> %zu live\n", r.initial_count, r.after_collapse,
                r.after_dedupe, r.after_liveness);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Censorship measurement toolkit: probe, classify, emulate, circumvent, clean, report"};
    app.require_subcommand(1);
    Options o;

    auto* probe = app.add_subcommand("probe", "Run the four-step probe over a target list");
    probe->add_option("--targets", o.targets, "Target list, one URL per line")->required()->check(CLI::ExistingFile);
    probe->add_option("--config", o.config, "Probe config (JSON)")->check(CLI::ExistingFile);
    probe->add_option("--clean-config", o.clean_config, "Config reaching an uncensored path; enables reference collection")
        ->check(CLI::ExistingFile);
    probe->add_option("--reference", o.reference, "Where to write the reference (default <out>.reference.json)");
    probe->add_option("--out", o.out, "Results file")->required();
    probe->add_option("--workers", o.workers, "Concurrent targets")->check(CLI::PositiveNumber);

    auto* classify = app.add_subcommand("classify", "Classify stored probe results");
    classify->add_option("results", o.input, "Probe results file")->required()->check(CLI::ExistingFile);
    classify->add_option("--fingerprints", o.fingerprints, "Warning-page fingerprints (JSON)")->check(CLI::ExistingFile);
    classify->add_option("--reference", o.reference, "Reference from a clean path")->check(CLI::ExistingFile);
    classify->add_option("--config", o.config, "Probe config whose resolvers are known")->check(CLI::ExistingFile);
    classify->add_option("--out", o.out, "Verdicts file");
    classify->add_option("--report", o.report, "Run report file");

    auto* emulate = app.add_subcommand("emulate", "Serve a censor policy on local sockets");
    emulate->add_option("--policy", o.policy, "Policy file (JSON)")->required()->check(CLI::ExistingFile);
    emulate->add_option("--bind", o.bind, "Listen address")->capture_default_str();
    emulate->add_option("--http-port", o.http_port, "HTTP listener port (0 picks one)")->capture_default_str();
    emulate->add_option("--dns-base-port", o.dns_base_port, "Resolver i listens on base+i (0 picks)")->capture_default_str();
    emulate->add_option("--seconds", o.seconds, "Stop after this long (default: until interrupted)");
    emulate->add_option("--out", o.out, "Write session transcripts here on exit");

    auto* circumvent = app.add_subcommand("circumvent", "Evaluate circumvention methods per target");
    circumvent->add_option("--targets", o.targets, "Target list")->required()->check(CLI::ExistingFile);
    circumvent->add_option("--config", o.config, "Probe and circumvention config (JSON)")->check(CLI::ExistingFile);
    circumvent->add_option("--clean-config", o.clean_config, "Config reaching an uncensored path")->check(CLI::ExistingFile);
    circumvent->add_option("--fingerprints", o.fingerprints, "Warning-page fingerprints")->check(CLI::ExistingFile);
    circumvent->add_option("--out", o.out, "Matrix file")->required();
    circumvent->add_option("--workers", o.workers, "Concurrent targets")->check(CLI::PositiveNumber);

    auto* clean = app.add_subcommand("clean", "Collapse, deduplicate and liveness-filter a target list");
    clean->add_option("--targets", o.targets, "Raw target list")->required()->check(CLI::ExistingFile);
    clean->add_option("--config", o.config, "Clean-path probe config")->check(CLI::ExistingFile);
    clean->add_option("--collapse", o.collapse, "Domains folded to one entry")->capture_default_str();
    clean->add_option("--out", o.out, "Cleaned list, one URL per line")->required();
    clean->add_option("--report", o.report, "Cleaning report file");
    clean->add_option("--workers", o.workers, "Concurrent fetches")->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "Render a run report or verdict file as a table");
    report->add_option("input", o.input, "Run report or verdicts file")->required()->check(CLI::ExistingFile);
    report->add_option("--out", o.out, "Write the run report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*probe) return run_probe(o);
        if (*classify) return run_classify(o);
        if (*emulate) return run_emulate(o);
        if (*circumvent) return run_circumvent(o);
        if (*clean) return run_clean(o);
        if (*report) return run_report(o);
    } catch (const CampaignFailure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kCampaignFailed;
    } catch (const EmptyList& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kCampaignFailed;
    } catch (const EmptyCampaign& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kCampaignFailed;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    }
    return kUsage;
}
