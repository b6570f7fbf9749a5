#pragma once

#include <stdexcept>
#include <string>

namespace fpgadse {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class UnsupportedKind : public Error {
public:
    using Error::Error;
};

class SweepTooLarge : public Error {
public:
    using Error::Error;
};

class MissingAssignment : public Error {
public:
    MissingAssignment(std::size_t layer_index, const std::string& what)
        : Error("missing assignment for layer " + std::to_string(layer_index) + ": " + what),
          layer_index_(layer_index) {}
    std::size_t layer_index() const noexcept { return layer_index_; }

private:
    std::size_t layer_index_;
};

class InfeasibleFrequency : public Error {
public:
    using Error::Error;
};

class PeriodTooShort : public Error {
public:
    PeriodTooShort(std::string strategy, const std::string& detail)
        : Error("period too short for " + strategy + ": " + detail), strategy_(std::move(strategy)) {}
    const std::string& strategy() const noexcept { return strategy_; }

private:
    std::string strategy_;
};

class EmptyTrace : public Error {
public:
    EmptyTrace() : Error("empty trace: at least one request gap is required") {}
};

class NonPositiveGap : public Error {
public:
    NonPositiveGap(std::size_t line, const std::string& text)
        : Error("non-positive gap at line " + std::to_string(line) + ": '" + text + "'"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UncoveredLayerKind : public Error {
public:
    explicit UncoveredLayerKind(const std::string& kind)
        : Error("no catalog profile covers layer kind " + kind), kind_(kind) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class SpaceTooLarge : public Error {
public:
    SpaceTooLarge(unsigned long long size, unsigned long long cap)
        : Error("design space has " + std::to_string(size) + " candidates, cap is " + std::to_string(cap)),
          size_(size) {}
    unsigned long long size() const noexcept { return size_; }

private:
    unsigned long long size_;
};

}  // namespace fpgadse
