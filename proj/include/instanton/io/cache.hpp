#pragma once

// Result cache keyed by a SHA-256 of (tool version, canonical request).
// Entries are written to a temporary file and renamed into place, so a
// reader sees either nothing or a complete entry.

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "instanton/error.hpp"

namespace instanton::io {

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw Error("cache.hash", "SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

struct CacheEntry {
    int status = 0;
    std::string output;
};

class Cache {
public:
    Cache() = default;
    Cache(std::filesystem::path root, std::string version) : root_(std::move(root)), version_(std::move(version)) {
        std::error_code ec;
        std::filesystem::create_directories(*root_, ec);
        if (ec || !std::filesystem::is_directory(*root_)) disable("cannot create cache directory " + root_->string());
    }

    bool enabled() const { return root_.has_value(); }
    const std::vector<std::string>& warnings() const { return warnings_; }

    std::string key_hash(const std::string& request) const { return sha256_hex(version_ + "\n" + request); }

    std::optional<CacheEntry> get(const std::string& request) const {
        if (!root_) return std::nullopt;
        auto path = *root_ / (key_hash(request) + ".json");
        std::ifstream in(path, std::ios::binary);
        if (!in) return std::nullopt;
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            auto j = nlohmann::json::parse(ss.str());
            if (j.at("version") != version_ || j.at("request") != request) return std::nullopt;
            return CacheEntry{j.at("status").get<int>(), j.at("output").get<std::string>()};
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }

    void put(const std::string& request, const CacheEntry& e) {
        if (!root_) return;
        auto name = key_hash(request);
        auto final_path = *root_ / (name + ".json");
        std::error_code ec;
        if (std::filesystem::exists(final_path, ec)) return;  // entries are immutable
        nlohmann::json j{{"version", version_}, {"request", request}, {"status", e.status}, {"output", e.output}};
        std::random_device rd;
        auto tmp = *root_ / (".tmp-" + name + "-" + std::to_string(rd()) + std::to_string(rd()));
        {
            std::ofstream out(tmp, std::ios::binary);
            out << j.dump();
            out.flush();
            if (!out) {
                std::filesystem::remove(tmp, ec);
                disable("cache directory " + root_->string() + " is not writable");
                return;
            }
        }
        std::filesystem::rename(tmp, final_path, ec);
        if (ec) {
            std::filesystem::remove(tmp, ec);
            disable("cannot publish cache entry in " + root_->string());
        }
    }

private:
    void disable(const std::string& why) {
        warnings_.push_back(why + "; continuing without cache");
        root_.reset();
    }

    std::optional<std::filesystem::path> root_;
    std::string version_;
    std::vector<std::string> warnings_;
};

}  // namespace instanton::io
