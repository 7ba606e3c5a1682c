#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace elastimesh {

/// Base for every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Input geometry cannot be fitted or sampled (e.g. all points coincide).
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

/// Domain curves do not meet at the corners.
class GeometryError : public Error {
public:
    using Error::Error;
};

class DegenerateCell : public Error {
public:
    DegenerateCell(std::size_t i, std::size_t j)
        : Error("degenerate cell (" + std::to_string(i) + "," + std::to_string(j) +
                "): zero-length edge"),
          i_(i), j_(j) {}

    std::size_t i() const noexcept { return i_; }
    std::size_t j() const noexcept { return j_; }

private:
    std::size_t i_;
    std::size_t j_;
};

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Hyper-dual or tape primitive evaluated at a singular point.
class DomainError : public Error {
public:
    DomainError(const std::string& op, const std::string& what)
        : Error(op + ": " + what), op_(op) {}

    const std::string& op() const noexcept { return op_; }

private:
    std::string op_;
};

/// Non-finite value inside the network or the loss.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Training diverged (loss became non-finite).
class TrainingError : public Error {
public:
    TrainingError(std::size_t epoch, const std::string& what)
        : Error("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}

    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

/// Invalid configuration document; `field` is a JSON-pointer-like path.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : Error(field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace elastimesh
