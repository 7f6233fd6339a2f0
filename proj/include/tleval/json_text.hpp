#pragma once

#include <json.hpp>

#include <string>

namespace tleval {

/// Insertion-ordered JSON; field order is part of every artifact schema.
using Json = nlohmann::ordered_json;

/// Two-space indentation, standard escapes, raw UTF-8, trailing newline.
inline std::string canonical_dump(const Json& value) {
    return value.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

} // namespace tleval
