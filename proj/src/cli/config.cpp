#include <fstream>
#include <sstream>

#include "wmamp/cli/commands.hpp"

namespace wmamp::cli {

OutputFormat parse_output_format(const std::string& name) {
    if (name == "table") return OutputFormat::Table;
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw UsageError("unknown output format '" + name + "'");
}

ConfigFile ConfigFile::load(const std::string& path, const std::set<std::string>& allowed_keys) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'", "config");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), allowed_keys);
}

ConfigFile ConfigFile::parse(const std::string& text, const std::set<std::string>& allowed_keys) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what(), "config");
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object", "config");
    for (const auto& [key, value] : doc.items()) {
        if (key == "schema_version") {
            if (!value.is_number_integer() || value.get<long long>() != 1) {
                throw ConfigError("unsupported schema_version (expected 1)", key);
            }
            continue;
        }
        if (!allowed_keys.contains(key)) throw ConfigError("unknown config key '" + key + "'", key);
    }
    return ConfigFile(std::move(doc));
}

std::optional<double> ConfigFile::number(const std::string& key) const {
    if (!doc_.contains(key)) return std::nullopt;
    const auto& v = doc_.at(key);
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number", key);
    return v.get<double>();
}

std::optional<std::vector<double>> ConfigFile::numbers(const std::string& key) const {
    if (!doc_.contains(key)) return std::nullopt;
    const auto& v = doc_.at(key);
    if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array", key);
    std::vector<double> out;
    for (const auto& item : v) {
        if (item.is_number()) {
            out.push_back(item.get<double>());
        } else if (item.is_array()) {
            for (const auto& x : item) {
                if (!x.is_number()) throw ConfigError("config key '" + key + "' must hold numbers", key);
                out.push_back(x.get<double>());
            }
        } else {
            throw ConfigError("config key '" + key + "' must hold numbers", key);
        }
    }
    return out;
}

std::optional<std::string> ConfigFile::text(const std::string& key) const {
    if (!doc_.contains(key)) return std::nullopt;
    const auto& v = doc_.at(key);
    if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string", key);
    return v.get<std::string>();
}

bool ConfigFile::flag(const std::string& key) const {
    if (!doc_.contains(key)) return false;
    const auto& v = doc_.at(key);
    if (!v.is_boolean()) throw ConfigError("config key '" + key + "' must be true or false", key);
    return v.get<bool>();
}

} // namespace wmamp::cli
