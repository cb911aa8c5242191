#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "blockscope/circumvent.hpp"
#include "blockscope/classifier.hpp"
#include "blockscope/dataset.hpp"
#include "blockscope/emulator.hpp"
#include "blockscope/probe.hpp"
#include "blockscope/report.hpp"

namespace blockscope::io {

/// JSON documents with sorted keys and two-space indentation, so equal values
/// always serialize to identical bytes. Each document is wrapped as
/// {"format": "blockscope/<kind>", "version": 1, "data": ...}.
///
/// Supported T: TargetUrl, ResolverSpec, DnsObservation, TcpObservation,
/// HttpObservation, Verdict, TargetProbeResult, CleaningReport, RunReport,
/// SessionTranscript, FingerprintSet, CircumventionMatrix, Reference, and
/// std::vector of TargetUrl, TargetProbeResult, Verdict, SessionTranscript.
template <typename T>
std::string encode(const T& value);

/// Throws FormatError on malformed input or a format tag for another type.
template <typename T>
T decode(std::string_view text);

/// Writes encode(value) to `path`. Throws IoError naming the path.
template <typename T>
void emit(const T& value, const std::filesystem::path& path);

template <typename T>
T load(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Plain (unwrapped) fingerprint file: {"digests": [], "patterns": [], "last_modified": []}.
FingerprintSet parse_fingerprints(std::string_view json_text);

/// Probe and circumvention settings share one config file. Unknown keys are rejected.
ProbeConfig parse_probe_config(std::string_view json_text);
CircumventConfig parse_circumvent_config(std::string_view json_text);

}  // namespace blockscope::io
