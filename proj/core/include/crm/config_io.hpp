#pragma once

#include "crm/errors.hpp"
#include "crm/experiment.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace crm {

// Parse or schema failure. line/column are 1-based, 0 when unknown.
class ParseError : public InvalidConfig {
public:
    ParseError(const std::string& source, int line, int column, const std::string& field,
               const std::string& message);
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_, column_;
    std::string field_;
};

// YAML, or JSON when the text starts with '{'. A manifest.json written by
// run_experiment is accepted and yields the spec it recorded.
ExperimentSpec parse_spec(std::string_view text, const std::string& source = "<input>");
ExperimentSpec load_spec(const std::filesystem::path& file);

// Round-trips through parse_spec.
std::string spec_to_yaml(const ExperimentSpec& spec);
std::string spec_to_json(const ExperimentSpec& spec, int indent = 2);

// The `model:` block on its own.
ModelConfig parse_model_config(std::string_view text, const std::string& source = "<input>");
std::string model_config_to_yaml(const ModelConfig& config);

}  // namespace crm
