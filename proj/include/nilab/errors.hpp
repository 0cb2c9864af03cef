#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nilab {

/// Bad arguments or malformed input documents. CLI exit code 2.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Search budget exhausted. Carries how far the search got. CLI exit code 2.
struct ResourceError : std::runtime_error {
    std::int64_t partial_count;
    ResourceError(const std::string& what, std::int64_t partial)
        : std::runtime_error(what), partial_count(partial) {}
};

/// A cross-check that must agree with itself failed; indicates a bug or an
/// out-of-contract input (e.g. fibration criteria disagreeing).
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

/// Node budget for backtracking searches. One instance is active per thread;
/// enumeration routines tick it and throw ResourceError when it runs dry.
class Budget {
public:
    static constexpr std::int64_t kDefault = 200'000'000;

    static std::int64_t& remaining() {
        thread_local std::int64_t value = kDefault;
        return value;
    }

    static void tick(const char* where) {
        auto& r = remaining();
        if (--r < 0)
            throw ResourceError(std::string("search budget exhausted in ") + where,
                                kDefault - r);
    }

    /// RAII scope that installs a fresh budget and restores the old one.
    class Scope {
    public:
        explicit Scope(std::int64_t nodes) : saved_(remaining()) { remaining() = nodes; }
        ~Scope() { remaining() = saved_; }
        Scope(const Scope&) = delete;
        Scope& operator=(const Scope&) = delete;

    private:
        std::int64_t saved_;
    };
};

} // namespace nilab
