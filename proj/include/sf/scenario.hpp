#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "sf/errors.hpp"

// Scenario configuration: a small TOML-style format (tables of key = value
// with numbers, strings, booleans and flat arrays), validation, and the
// runner that produces CSV/JSON artifacts under an output directory.

namespace sf {

struct ConfigValue {
    std::variant<double, bool, std::string, std::vector<double>,
                 std::vector<std::string>>
        v;

    double number(const std::string& field) const;
    bool boolean(const std::string& field) const;
    const std::string& text(const std::string& field) const;
    std::vector<double> numbers(const std::string& field) const;
};

class ConfigTable {
  public:
    using Section = std::map<std::string, ConfigValue>;

    static ConfigTable parse_file(const std::string& path);
    static ConfigTable parse_string(const std::string& text,
                                    const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    const ConfigValue& at(const std::string& section, const std::string& key) const;
    double number_or(const std::string& section, const std::string& key,
                     double fallback) const;
    std::string text_or(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
    bool bool_or(const std::string& section, const std::string& key,
                 bool fallback) const;
    const std::map<std::string, Section>& sections() const { return sections_; }

  private:
    std::map<std::string, Section> sections_;
};

struct ScenarioError : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct RunOutcome {
    int exit_code = 0;
    std::vector<std::string> artifacts;
    std::string message;
};

// Parse + validate + execute a scenario file.  Artifacts land under
// <out_root>/<scenario name>/; existing outputs are only replaced when
// `force` is set.
RunOutcome run_scenario(const std::string& path, const std::string& out_root,
                        bool force, int threads);

}  // namespace sf
