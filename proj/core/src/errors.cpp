#include "mckean/errors.hpp"

namespace mckean {

NumericalBlowupError::NumericalBlowupError(const std::string& what,
                                           std::size_t particle)
    : NumericalError(what + " (particle " + std::to_string(particle) + ")"),
      particle_(particle) {}

}  // namespace mckean
