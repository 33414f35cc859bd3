#pragma once

#include <stdexcept>
#include <string>

namespace facadeage {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// -- input / corpus ----------------------------------------------------------

class MissingFileError : public Error {
public:
    using Error::Error;
};

class MalformedManifestError : public Error {
public:
    using Error::Error;
};

class UnknownEpochLabelError : public Error {
public:
    UnknownEpochLabelError(std::string label, long long entry_id)
        : Error("unknown age epoch label \"" + label + "\" (entry id " + std::to_string(entry_id) + ")"),
          label_(std::move(label)),
          entry_id_(entry_id) {}

    const std::string& label() const noexcept { return label_; }
    long long entry_id() const noexcept { return entry_id_; }

private:
    std::string label_;
    long long entry_id_;
};

class DuplicateIdError : public Error {
public:
    using Error::Error;
};

class UndecodableImageError : public Error {
public:
    using Error::Error;
};

class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

// -- prompting ---------------------------------------------------------------

class EmptyLocationError : public Error {
public:
    EmptyLocationError() : Error("location hint must be non-empty") {}
};

class InvalidTemplateError : public Error {
public:
    using Error::Error;
};

class ItemImageMismatchError : public Error {
public:
    using Error::Error;
};

// -- evaluation --------------------------------------------------------------

class EmptyRunError : public Error {
public:
    EmptyRunError() : Error("evaluation run contains no pairs") {}
};

class NoScoreablePairsError : public Error {
public:
    NoScoreablePairsError() : Error("no scoreable pairs: every prediction is malformed or refused") {}
};

class IdMismatchError : public Error {
public:
    using Error::Error;
};

class UnknownFixtureError : public Error {
public:
    using Error::Error;
};

// -- gateway -----------------------------------------------------------------

// Backend failures carry whether a retry can possibly help.
class GatewayError : public Error {
public:
    using Error::Error;
    virtual bool retryable() const noexcept { return false; }
};

class AuthError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

class RateLimitedError : public GatewayError {
public:
    using GatewayError::GatewayError;
    bool retryable() const noexcept override { return true; }
};

class TransportError : public GatewayError {
public:
    using GatewayError::GatewayError;
    bool retryable() const noexcept override { return true; }
};

class TimeoutError : public GatewayError {
public:
    using GatewayError::GatewayError;
    bool retryable() const noexcept override { return true; }
};

}  // namespace facadeage
