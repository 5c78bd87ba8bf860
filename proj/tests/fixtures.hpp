#pragma once

#include "sketchsci/io.hpp"

#include <string>

namespace fixtures {

inline sketchsci::Document load(const std::string& name)
{
    return sketchsci::load_document(std::string(DATA_DIR) + "/" + name);
}

} // namespace fixtures
