#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace piergen {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// schema / formulas

class MissingInput : public Error {
public:
    explicit MissingInput(std::string name)
        : Error("missing input parameter '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class NonIntegerResult : public Error {
public:
    explicit NonIntegerResult(std::string name)
        : Error("formula for '" + name + "' does not divide evenly"), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class NonPositiveResult : public Error {
public:
    explicit NonPositiveResult(std::string name)
        : Error("formula for '" + name + "' evaluated to a non-positive value"),
          name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class UnknownParameter : public Error {
public:
    explicit UnknownParameter(std::string name)
        : Error("unknown parameter '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// Raised for malformed schemas: duplicate names, cyclic formulas, bad ranges.
class SchemaError : public Error {
public:
    using Error::Error;
};

class ExpressionSyntaxError : public Error {
public:
    using Error::Error;
};

// sampler

class RejectionBudgetExhausted : public Error {
public:
    explicit RejectionBudgetExhausted(std::uint64_t index)
        : Error("rejection budget exhausted at sample index " + std::to_string(index)),
          index_(index) {}
    std::uint64_t index() const noexcept { return index_; }

private:
    std::uint64_t index_;
};

// drawing / export

class ConflictingAnnotation : public Error {
public:
    ConflictingAnnotation(std::string name, std::int64_t first, std::int64_t second)
        : Error("conflicting annotations for '" + name + "': " + std::to_string(first) +
                " vs " + std::to_string(second)),
          name_(std::move(name)), first_(first), second_(second) {}
    const std::string& name() const noexcept { return name_; }
    std::int64_t first() const noexcept { return first_; }
    std::int64_t second() const noexcept { return second_; }

private:
    std::string name_;
    std::int64_t first_;
    std::int64_t second_;
};

class MalformedDxf : public Error {
public:
    MalformedDxf(std::size_t line, const std::string& reason)
        : Error("malformed DXF at line " + std::to_string(line) + ": " + reason), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UnsupportedEntity : public Error {
public:
    explicit UnsupportedEntity(std::string type)
        : Error("unsupported DXF entity " + type), type_(std::move(type)) {}
    const std::string& type() const noexcept { return type_; }

private:
    std::string type_;
};

class DegenerateBounds : public Error {
public:
    DegenerateBounds() : Error("view bounding box is degenerate") {}
};

// solids

class DuplicateName : public Error {
public:
    explicit DuplicateName(const std::string& name) : Error("duplicate solid name '" + name + "'") {}
};

class UnknownReference : public Error {
public:
    explicit UnknownReference(const std::string& name)
        : Error("reference to undeclared solid '" + name + "'") {}
};

class NonPositiveExtent : public Error {
public:
    explicit NonPositiveExtent(const std::string& name)
        : Error("solid '" + name + "' has a non-positive extent") {}
};

class ScriptSyntaxError : public Error {
public:
    ScriptSyntaxError(std::size_t line, const std::string& reason)
        : Error("script line " + std::to_string(line) + ": " + reason) {}
};

// curriculum / rewards / evaluation

class InfeasibleCorruption : public Error {
public:
    InfeasibleCorruption() : Error("no entry can be corrupted within its range") {}
};

class MissingExemplar : public Error {
public:
    MissingExemplar() : Error("prompt format requires an exemplar sample") {}
};

class ExemplarLeak : public Error {
public:
    explicit ExemplarLeak(const std::string& id)
        : Error("exemplar sample '" + id + "' is the test sample itself") {}
};

class WrongTaskKind : public Error {
public:
    explicit WrongTaskKind(const std::string& what) : Error("wrong task kind: " + what) {}
};

class UnknownSampleId : public Error {
public:
    explicit UnknownSampleId(const std::string& id) : Error("unknown sample id '" + id + "'") {}
};

/// Line-numbered parse failure in a newline-delimited record file.
class RecordParseError : public Error {
public:
    RecordParseError(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace piergen
