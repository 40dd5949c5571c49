#pragma once

#include <json.hpp>

#include "hkl/export.hpp"

namespace hkl::detail {

using json = nlohmann::ordered_json;

json envelope(const std::string& kind, json body);
json marking_json(const Marking& m);
json mode_json(const Mode& m);
json term_json(const Term& t);
json signature_json(const Signature& sig);
json structure_json(const Structure& st);

}  // namespace hkl::detail
