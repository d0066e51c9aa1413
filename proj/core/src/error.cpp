#include "jnt/error.hpp"

namespace jnt {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::input:
      return 2;
    case ErrorKind::numerical:
      return 3;
    case ErrorKind::config:
      return 4;
  }
  return 1;
}

}  // namespace jnt
