#include "srivc/hold.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace srivc {

const char* to_string(Hold hold) {
    return hold == Hold::Zoh ? "zoh" : "foh";
}

Hold hold_from_string(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "zoh") return Hold::Zoh;
    if (lower == "foh") return Hold::Foh;
    throw std::invalid_argument("unknown hold '" + std::string(name) + "' (expected zoh or foh)");
}

}  // namespace srivc
