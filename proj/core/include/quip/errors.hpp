#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quip {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied value is out of its documented range.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Filesystem or stream failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// What went wrong while decoding a sketch file.
enum class FormatFault {
    bad_magic,
    unsupported_version,
    truncated,
    checksum_mismatch,
    bad_header,
};

/// A sketch file failed to decode.
class FormatError : public Error {
public:
    FormatError(FormatFault fault, const std::string& what) : Error(what), fault_(fault) {}
    FormatFault fault() const { return fault_; }

private:
    FormatFault fault_;
};

/// Two sketches (or a sketch and an n-gram config) have incompatible parameters.
class MismatchError : public Error {
public:
    using Error::Error;
};

/// A JSONL input line could not be parsed. Lines are numbered from 1.
class JsonlError : public Error {
public:
    JsonlError(std::size_t line, const std::string& what) : Error(what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Run evaluation failed (unknown prompt id, missing null row, empty input, ...).
class EvalError : public Error {
public:
    using Error::Error;
};

}  // namespace quip
