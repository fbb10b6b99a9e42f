#include "riskctl/error.hpp"

namespace riskctl {

NumericalInstability::NumericalInstability(double theta, int time, std::size_t node, std::size_t control)
    : Error("non-finite exponential-utility intermediate at theta=" + std::to_string(theta) +
            ", t=" + std::to_string(time) + ", node=" + std::to_string(node) +
            ", control=" + std::to_string(control)),
      theta_(theta),
      time_(time),
      node_(node),
      control_(control) {}

MemoryBudgetExceeded::MemoryBudgetExceeded(std::size_t required_bytes, std::size_t budget_bytes)
    : Error("value/policy tables need " + std::to_string(required_bytes) + " bytes, budget is " +
            std::to_string(budget_bytes) + " bytes"),
      required_(required_bytes),
      budget_(budget_bytes) {}

}  // namespace riskctl
