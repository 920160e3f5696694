#include "dfhc/error.hpp"

namespace dfhc {

IoError::IoError(const std::string& path, const std::string& what)
    : Error(path + ": " + what), path_(path) {}

}  // namespace dfhc
