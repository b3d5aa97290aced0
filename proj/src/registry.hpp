#pragma once

#include <vector>

#include "sol/algorithm.hpp"

namespace sol {

std::vector<const Algorithm*> first_order_learners();
std::vector<const Algorithm*> second_order_learners();
std::vector<const Algorithm*> sparse_learners();
std::vector<const Algorithm*> adaptive_l1_learners();

}  // namespace sol
