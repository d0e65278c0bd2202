#include "caafc/errors.hpp"

namespace caafc {

// Out-of-line destructor anchors the hierarchy's vtable in the library.
Error::~Error() = default;

}  // namespace caafc
