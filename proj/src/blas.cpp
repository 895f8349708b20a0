#include "blas.hpp"

#include <mutex>

namespace dds::blas {

void use_single_thread() {
  static std::once_flag once;
  std::call_once(once, [] { openblas_set_num_threads(1); });
}

}  // namespace dds::blas
