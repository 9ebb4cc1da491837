#pragma once

#include <stdexcept>
#include <string>

namespace tamekit {

/// A request that violates an admissibility gate the caller is expected to
/// screen for: q in S, q dividing w2, ramified primes where unramified ones
/// are required, malformed field literals. The CLI maps these to exit code 2.
class admissibility_error : public std::invalid_argument {
public:
    enum class reason {
        q_in_s,
        q_divides_w2,
        ramified_prime,
        bad_input,
    };

    admissibility_error(reason r, const std::string& msg)
        : std::invalid_argument(msg), reason_(r) {}

    reason why() const noexcept { return reason_; }

private:
    reason reason_;
};

/// An identity that holds by construction failed to hold; indicates a bug,
/// never a property of the input. The CLI maps these to exit code 1.
class internal_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace tamekit
