#pragma once

#include <json.hpp>

namespace ctrans {

// All emitted artifacts use insertion-ordered JSON so serialized output has a
// stable field order and repeated runs are byte-identical.
using Json = nlohmann::ordered_json;

}  // namespace ctrans
