#include "output.hpp"

#include "fbnl/error.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <fcntl.h>
#include <unistd.h>

#ifndef FBNL_VERSION
#define FBNL_VERSION "unknown"
#endif

namespace fbnl::cli {

namespace fs = std::filesystem;

std::string num17(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunOutput::RunOutput(std::string dir, std::string command)
    : dir_(std::move(dir)), command_(std::move(command)), start_(std::chrono::steady_clock::now())
{
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec)
        throw ParameterError("cannot create output directory " + dir_ + ": " + ec.message());
    lock_path_ = path(".fbnl.lock");
    const int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        const std::string why = std::strerror(errno);
        lock_path_.clear();
        throw ParameterError("output directory " + dir_ + " is locked by another run (" + why + ")");
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    if (::write(fd, pid.data(), pid.size()) < 0) {
        // The lock is the file's existence; the pid is informational.
    }
    ::close(fd);
}

RunOutput::~RunOutput()
{
    if (!lock_path_.empty())
        ::unlink(lock_path_.c_str());
}

std::string RunOutput::path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

void RunOutput::write(const std::string& name, const std::string& content,
                      const std::string& producer)
{
    std::ofstream os(path(name), std::ios::binary);
    os << content;
    os.close();
    if (!os)
        throw ParameterError("cannot write " + path(name));
    files_.push_back({{"file", name},
                      {"fnv1a64", hex64(fnv1a(content))},
                      {"bytes", content.size()},
                      {"producer", producer}});
}

void RunOutput::write_json(const std::string& name, const nlohmann::json& j,
                           const std::string& producer)
{
    write(name, j.dump(2) + "\n", producer);
}

void RunOutput::add_check(const std::string& name, bool pass, double measured, double tolerance,
                          const std::string& producer)
{
    checks_.push_back({{"check", name},
                       {"pass", pass},
                       {"measured", measured},
                       {"tolerance", tolerance},
                       {"producer", producer}});
}

void RunOutput::finish(const Config& cfg, const Params& params, const nlohmann::json& grid,
                       int threads)
{
    nlohmann::json pj = nlohmann::json::object();
    for (const auto& [k, v] : params.entries())
        pj[k] = v;
    nlohmann::json m;
    m["command"] = command_;
    m["tool_version"] = FBNL_VERSION;
    m["params"] = pj;
    m["grid"] = grid;
    m["config"] = cfg.entries();
    m["config_hash"] = hex64(fnv1a(cfg.canonical()));
    m["threads"] = threads;
    m["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    m["outputs"] = files_;
    m["checks"] = checks_;

    const std::string tmp = path("manifest.json.tmp");
    {
        std::ofstream os(tmp, std::ios::binary);
        os << m.dump(2) << "\n";
        os.close();
        if (!os)
            throw ParameterError("cannot write " + tmp);
    }
    std::error_code ec;
    fs::rename(tmp, path("manifest.json"), ec);
    if (ec)
        throw ParameterError("cannot move manifest into place: " + ec.message());
}

} // namespace fbnl::cli
