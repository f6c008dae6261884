#ifndef SUBDIFF_VERSION_HPP
#define SUBDIFF_VERSION_HPP

namespace subdiff {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace subdiff

#endif  // SUBDIFF_VERSION_HPP
