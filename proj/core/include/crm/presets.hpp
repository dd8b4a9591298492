#pragma once

#include "crm/experiment.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace crm {

struct PresetInfo {
    std::string name;     // e.g. fig1e, figS7f
    std::string summary;
    Engine engine;
};

std::vector<PresetInfo> list_presets();

// Throws InvalidConfig for an unknown name.
ExperimentSpec make_preset(std::string_view name);

}  // namespace crm
