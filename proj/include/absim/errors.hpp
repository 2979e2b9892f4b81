#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace absim {

// Exit-code categories used by the CLI.
enum class ErrorKind {
    Config = 2,     // malformed or inconsistent configuration
    Guard = 3,      // a runtime precondition (guard) was violated
    Numerical = 4,  // a numerical procedure failed to converge
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct SingularPoint : Error {
    explicit SingularPoint(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};
struct Degenerate : Error {
    explicit Degenerate(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};
struct ClassMismatch : Error {
    explicit ClassMismatch(const std::string& w) : Error(ErrorKind::Guard, w) {}
};
struct OutsideDomain : Error {
    explicit OutsideDomain(const std::string& w) : Error(ErrorKind::Guard, w) {}
};
struct LoopIntersectsMagnet : Error {
    explicit LoopIntersectsMagnet(const std::string& w) : Error(ErrorKind::Guard, w) {}
};
struct UnrealizedClass : Error {
    explicit UnrealizedClass(const std::string& w) : Error(ErrorKind::Guard, w) {}
};
struct ResolutionGuard : Error {
    explicit ResolutionGuard(const std::string& w) : Error(ErrorKind::Guard, w) {}
};
struct FarPastGuard : Error {
    explicit FarPastGuard(const std::string& w) : Error(ErrorKind::Guard, w) {}
};
struct SupportViolation : Error {
    explicit SupportViolation(const std::string& w) : Error(ErrorKind::Guard, w) {}
};
struct KrylovStall : Error {
    explicit KrylovStall(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};
struct GridMismatch : Error {
    explicit GridMismatch(const std::string& w) : Error(ErrorKind::Config, w) {}
};
struct LowContrast : Error {
    explicit LowContrast(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};
struct FitUnderdetermined : Error {
    explicit FitUnderdetermined(const std::string& w) : Error(ErrorKind::Config, w) {}
};

// I/O failure with the byte offset where parsing stopped making sense.
struct FormatError : Error {
    FormatError(const std::string& w, std::size_t offset)
        : Error(ErrorKind::Config, w + " (byte offset " + std::to_string(offset) + ")"), byte_offset(offset) {}
    std::size_t byte_offset;
};

// Configuration schema violation carrying the JSON path of the offending field.
struct SchemaError : Error {
    SchemaError(const std::string& w, const std::string& path)
        : Error(ErrorKind::Config, w + " (at " + path + ")"), field_path(path) {}
    std::string field_path;
};

}  // namespace absim
