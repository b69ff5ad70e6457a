#pragma once

#include <string>

namespace ramcell {

/// Fixed-point with six decimals, trailing zeros stripped, "-0" folded to "0".
std::string fixed6(double v);

}  // namespace ramcell
