#pragma once

// Helpers shared by the test binaries: scratch directories, shell commands and
// the system grep oracle.

#include "tleval/timeline.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace support {

namespace fs = std::filesystem;

/// A fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                ("tleval-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const fs::path& path() const { return path_; }
    std::string str() const { return path_.string(); }
    std::string operator/(const std::string& rel) const { return (path_ / rel).string(); }

private:
    fs::path path_;
};

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

/// Runs `command` through /bin/sh and captures stdout.
inline CommandResult run(const std::string& command) {
    CommandResult result;
    FILE* pipe = ::popen(command.c_str(), "r");
    if (pipe == nullptr) {
        throw std::runtime_error("popen failed: " + command);
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        result.output.append(buf.data(), n);
    }
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

inline std::string quote(const std::string& s) {
    std::string out = "'";
    for (const char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

/// `LC_ALL=C grep -E` over the data lines (header excluded) of a CSV file.
inline std::string system_grep(const std::string& csv_text, const std::string& pattern,
                               const ScratchDir& dir) {
    const auto csv_path = dir / "grep-input.csv";
    const auto pat_path = dir / "grep-pattern.txt";
    tleval::write_file(csv_path, csv_text);
    tleval::write_file(pat_path, pattern + "\n");
    const auto result = run("tail -n +2 " + quote(csv_path) + " | LC_ALL=C grep -E -f " +
                            quote(pat_path));
    if (result.exit_code > 1) {
        throw std::runtime_error("system grep failed for pattern " + pattern);
    }
    return result.output;
}

} // namespace support
