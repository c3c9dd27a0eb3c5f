#include "res/app/app.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace res::app {

Lookup env_lookup() {
    return [](std::string_view key) -> std::optional<std::string> {
        const char* value = std::getenv(std::string(key).c_str());
        if (value == nullptr || *value == '\0') return std::nullopt;
        return std::string(value);
    };
}

Lookup layered_lookup(Lookup first, std::map<std::string, std::string> fallback) {
    return [first = std::move(first), fallback = std::move(fallback)](std::string_view key) {
        if (auto v = first(key)) return v;
        const auto it = fallback.find(std::string(key));
        return it == fallback.end() ? std::optional<std::string>{} : std::optional<std::string>{it->second};
    };
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
    std::map<std::string, std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw std::invalid_argument("config line " + std::to_string(number) + " is not KEY=VALUE");
        }
        out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return out;
}

std::map<std::string, std::string> load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

std::filesystem::path default_data_dir() {
    if (const char* dir = std::getenv("RES_DATA_DIR"); dir != nullptr && *dir != '\0') return dir;
#ifdef RES_DEFAULT_DATA_DIR
    return RES_DEFAULT_DATA_DIR;
#else
    return "data";
#endif
}

service::ServiceConfig service_config(const Lookup& lookup) {
    service::ServiceConfig config;
    config.data_dir = default_data_dir();
    if (auto v = lookup("RES_HOST")) config.host = *v;
    if (auto v = lookup("RES_PORT")) {
        std::size_t pos = 0;
        int port = -1;
        try {
            port = std::stoi(*v, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != v->size() || port < 0 || port > 65535) throw std::invalid_argument("RES_PORT is not a port: " + *v);
        config.port = port;
    }
    if (auto v = lookup("RES_STORE_DIR")) config.store_dir = *v;
    if (auto v = lookup("RES_STATIC_DIR")) config.static_dir = *v;
    if (auto v = lookup("RES_DATA_DIR")) config.data_dir = *v;
    if (auto v = lookup("RES_FIXTURES")) config.fixtures = *v;
    if (auto v = lookup("RES_PROVIDER")) {
        if (*v == "mock") {
            config.provider.kind = llm::ProviderKind::Mock;
        } else if (*v == "live") {
            config.provider.kind = llm::ProviderKind::Live;
        } else {
            throw std::invalid_argument("RES_PROVIDER must be mock or live");
        }
    }
    if (auto v = lookup("RES_MODEL")) config.provider.model_id = *v;
    if (auto v = lookup("RES_API_KEY_VAR")) config.provider.api_key_ref = *v;
    if (auto v = lookup("RES_ENDPOINT")) config.provider.endpoint = *v;
    if (auto v = lookup("RES_CROSSREF_MAILTO")) config.crossref_mailto = *v;
    return config;
}

}  // namespace res::app
