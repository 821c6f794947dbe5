#include "gccd/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace gccd::kernels {

namespace {

const Impl& select() {
  const char* disable = std::getenv("GCCD_DISABLE_AVX2");
  if (disable && std::strcmp(disable, "0") != 0) return scalar_impl();
  if (avx2_available()) return avx2_impl();
  return scalar_impl();
}

}  // namespace

const Impl& active() {
  static const Impl& impl = select();
  return impl;
}

}  // namespace gccd::kernels
