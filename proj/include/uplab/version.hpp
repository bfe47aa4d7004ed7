#ifndef UPLAB_VERSION_HPP
#define UPLAB_VERSION_HPP

namespace uplab {

inline constexpr const char* kVersion = "0.1.0";

} // namespace uplab

#endif
