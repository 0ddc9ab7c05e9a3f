#pragma once

#include <nlohmann/json.hpp>

namespace senseprobe::detail {

// task id -> sense label -> instruction text
const nlohmann::json& instruction_fixture();

// task id -> sense label -> label -> surface tokens
const nlohmann::json& lexicon_fixture();

}  // namespace senseprobe::detail
