#ifndef CRFEM_VERSION_HPP
#define CRFEM_VERSION_HPP

namespace crfem {

inline constexpr const char* kVersion = "0.1.0";

}

#endif
