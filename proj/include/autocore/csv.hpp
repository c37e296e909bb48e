#pragma once

#include <string>

#include "autocore/types.hpp"

namespace autocore {

// UTF-8, comma-delimited, header row required. Features are all non-label
// columns in file order; binary labels map the lexicographically smaller raw
// value to -1.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 Task task);

// Values printed with 17 significant digits so a reload is bit-identical.
void write_csv(const std::string& path, const Dataset& data,
               const std::string& label_column = "label");

}  // namespace autocore
