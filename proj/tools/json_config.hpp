#ifndef DOCBIN_TOOLS_JSON_CONFIG_HPP
#define DOCBIN_TOOLS_JSON_CONFIG_HPP

#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace docbin::cli {

/// Flat JSON config files: {"tau": 0.25, "edge-mode": "structure-tensor", ...}
/// Keys match the long option names; command-line flags take precedence.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        nlohmann::json j;
        for (const CLI::Option* opt : app->get_options({})) {
            if (!opt->get_lnames().empty() && opt->get_configurable()) {
                const std::string name = opt->get_lnames()[0];
                if (opt->reduced_results().size() == 1)
                    j[name] = opt->reduced_results().at(0);
                else if (default_also)
                    j[name] = opt->get_default_str();
            }
        }
        return j.dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            input >> j;
        } catch (const nlohmann::json::exception& e) {
            throw CLI::FileError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::FileError("config must hold a flat JSON object");

        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            item.name = key;
            if (value.is_boolean())
                item.inputs = {value.get<bool>() ? "true" : "false"};
            else if (value.is_string())
                item.inputs = {value.get<std::string>()};
            else if (value.is_number() || value.is_number_integer())
                item.inputs = {value.dump()};
            else
                throw CLI::FileError("config key '" + key + "' must be a scalar");
            items.push_back(std::move(item));
        }
        return items;
    }
};

} // namespace docbin::cli

#endif
