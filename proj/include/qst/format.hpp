#pragma once

#include <string>

namespace qst {

/// Locale-independent %.12g rendering used for every CSV/JSON number;
/// negative zero prints as "0".
std::string format_number(double value);

/// Value rounded to the 12 significant digits format_number prints.
double round_to_output(double value);

}  // namespace qst
