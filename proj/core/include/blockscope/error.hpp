#pragma once

#include <stdexcept>
#include <string>

namespace blockscope {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedUrl : public Error {
public:
    explicit MalformedUrl(const std::string& input)
        : Error("malformed url: '" + input + "'"), input_(input) {}
    const std::string& input() const noexcept { return input_; }

private:
    std::string input_;
};

class InvalidAddress : public Error {
public:
    using Error::Error;
};

class EmptyList : public Error {
public:
    EmptyList() : Error("target list contains no valid entries") {}
};

class CleanPathUnavailable : public Error {
public:
    using Error::Error;
};

/// Policy validation failure. `field()` is a JSON-pointer-like path to the offending value.
class PolicyInvalid : public Error {
public:
    PolicyInvalid(std::string field, const std::string& message)
        : Error("policy invalid at " + field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class ConfigInvalid : public Error {
public:
    using Error::Error;
};

class AmbiguousEvidence : public Error {
public:
    AmbiguousEvidence()
        : Error("status 200 without fingerprint match or reference digest") {}
};

class DecoyUnreachable : public Error {
public:
    using Error::Error;
};

class EmptyCampaign : public Error {
public:
    EmptyCampaign() : Error("campaign total is zero") {}
};

class IoError : public Error {
public:
    IoError(std::string path, const std::string& message)
        : Error(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace blockscope
