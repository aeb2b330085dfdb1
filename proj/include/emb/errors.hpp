#ifndef EMB_ERRORS_HPP
#define EMB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace emb {

// Bad input: violated precondition, inconsistent invariants, malformed data.
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// A bounded search ran out of candidates. Carries the bound that was hit so
// callers can report it or retry with a larger one.
struct bound_exceeded : std::runtime_error {
    long bound;
    bound_exceeded(const std::string& what, long b)
        : std::runtime_error(what + " (bound " + std::to_string(b) + " exceeded)"), bound(b) {}
};

// Requested a computation outside the supported extension classes.
struct unsupported_error : domain_error {
    explicit unsupported_error(const std::string& what) : domain_error(what) {}
};

} // namespace emb

#endif
