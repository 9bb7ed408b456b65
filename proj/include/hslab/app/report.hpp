#pragma once

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hslab::app {

using Json = nlohmann::json;  // std::map objects, so keys come out sorted

// Two-space indent, sorted keys, doubles at 17 significant digits, non-finite
// doubles as null. Ends with a newline.
std::string dump_json(const Json& j);

// Files written by one command. Each file goes through a temporary name and a
// rename; anything written is deleted again unless commit() ran.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir);
    ~OutputSet();
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;

    std::filesystem::path write(const std::string& name, const std::string& content);
    void commit() { committed_ = true; }
    const std::vector<std::filesystem::path>& files() const { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> files_;
    bool committed_ = false;
};

} // namespace hslab::app
