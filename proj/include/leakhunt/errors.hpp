#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace leakhunt {

/** Malformed input file (syntax or missing/ill-typed field). */
class ParseError : public std::runtime_error {
  public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/** Semantic violations found while validating a network. Collects every violation. */
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const { return violations_; }

  private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "network validation failed:";
        for (const auto& s : v) {
            out += "\n  - " + s;
        }
        return out;
    }
    std::vector<std::string> violations_;
};

/** Hydraulic solve failed (non-convergence, disconnected junction, ...). */
class SolveError : public std::runtime_error {
  public:
    explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

/** A database was built against a different network or meter layout. */
class FingerprintError : public std::runtime_error {
  public:
    explicit FingerprintError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace leakhunt
