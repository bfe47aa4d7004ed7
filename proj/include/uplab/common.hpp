#ifndef UPLAB_COMMON_HPP
#define UPLAB_COMMON_HPP

#include <stdexcept>
#include <string>

namespace uplab {

/// Error type thrown by every operation in the library on contract
/// violations (shape mismatches, bad arguments, malformed files).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown by the toy trainer when the loss becomes non-finite.
struct DivergenceError : Error {
    std::size_t step;
    DivergenceError(const std::string& msg, std::size_t step_index)
        : Error(msg), step(step_index) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw Error(msg);
}

} // namespace uplab

#endif
