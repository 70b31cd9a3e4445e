#pragma once

#include <string>
#include <string_view>

namespace srivc {

// Intersample reconstruction assumed when a continuous-time filter is
// applied to a sampled signal.
enum class Hold {
    Zoh,  // piecewise constant between samples
    Foh   // piecewise linear between samples (triangle hold)
};

const char* to_string(Hold hold);

// Accepts "zoh"/"foh" (case-insensitive); throws std::invalid_argument otherwise.
Hold hold_from_string(std::string_view name);

}  // namespace srivc
