#include "lrsm/error.hpp"

namespace lrsm {

void throw_argument(const std::string& what) { throw ArgumentError(what); }

}  // namespace lrsm
