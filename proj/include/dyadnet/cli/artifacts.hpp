#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dyadnet/core/error.hpp"

namespace dyadnet::cli {

/// Output files of one run. Each file is written as `<name>.partial` and renamed only when the
/// whole task succeeds, so a failed run leaves its partial outputs behind under that suffix.
class Artifacts {
public:
    explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

    std::ofstream& open(const std::string& name) {
        auto& slot = files_[name];
        if (!slot) {
            slot = std::make_unique<std::ofstream>(dir_ / (name + ".partial"), std::ios::binary | std::ios::trunc);
            if (!*slot) throw DomainError("cannot write '" + (dir_ / name).string() + ".partial'");
            order_.push_back(name);
        }
        return *slot;
    }

    void commit() {
        for (const auto& name : order_) {
            auto& f = *files_[name];
            f.flush();
            if (!f) throw DomainError("write failed for '" + name + "'");
            f.close();
            std::filesystem::rename(dir_ / (name + ".partial"), dir_ / name);
        }
    }

    /// Flushes everything as `.partial` files after a failure.
    void abandon() {
        for (auto& [name, f] : files_)
            if (f && f->is_open()) f->close();
    }

    const std::vector<std::string>& names() const noexcept { return order_; }
    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
    std::map<std::string, std::unique_ptr<std::ofstream>> files_;
    std::vector<std::string> order_;
};

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace dyadnet::cli
