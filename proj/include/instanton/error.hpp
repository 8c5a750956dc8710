#pragma once

#include <stdexcept>
#include <string>

namespace instanton {

// Every failure carries a dotted tag such as "flowcat.AX1" so diagnostics
// can be traced back to the axiom that was violated.
struct Error : std::runtime_error {
    std::string tag;
    Error(std::string t, const std::string& what)
        : std::runtime_error(what), tag(std::move(t)) {}
};

struct Report {
    bool ok = true;
    std::string tag;
    std::string detail;

    static Report pass() { return {}; }
    static Report fail(std::string t, std::string d) { return {false, std::move(t), std::move(d)}; }
    explicit operator bool() const { return ok; }
};

}  // namespace instanton
