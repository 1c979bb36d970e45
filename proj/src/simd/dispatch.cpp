#include <cstdlib>
#include <string_view>

#include "nsaudit/simd.hpp"

namespace nsaudit::simd {
namespace {

Isa select_isa() {
  if (const char* env = std::getenv("NS_SIMD"); env && std::string_view(env) == "scalar")
    return Isa::scalar;
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = select_isa();
  return isa;
}

const KernelTable& kernels() {
  static const KernelTable& table =
      active_isa() == Isa::avx2 ? avx2_kernels() : scalar_kernels();
  return table;
}

std::string_view isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

}  // namespace nsaudit::simd
