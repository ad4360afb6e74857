#pragma once

#include "config.hpp"

#include "fbnl/params.hpp"

#include <json.hpp>

#include <chrono>
#include <string>
#include <vector>

namespace fbnl::cli {

std::string num17(double v);

/*! \brief Owns an output directory for one run.
 *
 *  Creates the directory, takes ".fbnl.lock" exclusively (fails if another
 *  run holds it), records every written file with its FNV-1a checksum, and
 *  writes manifest.json last through a temporary file and rename.
 */
class RunOutput {
public:
    RunOutput(std::string dir, std::string command);
    ~RunOutput();
    RunOutput(const RunOutput&) = delete;
    RunOutput& operator=(const RunOutput&) = delete;

    const std::string& dir() const { return dir_; }
    std::string path(const std::string& name) const;

    void write(const std::string& name, const std::string& content, const std::string& producer);
    void write_json(const std::string& name, const nlohmann::json& j, const std::string& producer);

    void add_check(const std::string& name, bool pass, double measured, double tolerance,
                   const std::string& producer);

    void finish(const Config& cfg, const Params& params, const nlohmann::json& grid, int threads);

private:
    std::string dir_;
    std::string command_;
    std::string lock_path_;
    std::chrono::steady_clock::time_point start_;
    nlohmann::json files_ = nlohmann::json::array();
    nlohmann::json checks_ = nlohmann::json::array();
};

} // namespace fbnl::cli
