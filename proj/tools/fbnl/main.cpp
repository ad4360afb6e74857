#include "commands.hpp"

#include "fbnl/error.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace {

std::string usage_commands()
{
    std::string s = "commands:";
    for (const std::string& c : fbnl::cli::command_names())
        s += " " + c;
    return s;
}

} // namespace

int main(int argc, char** argv)
{
    using fbnl::cli::Config;

    CLI::App app{"fbnl: half-plane profiles, discrete minimizers, and monotonicity functionals"};
    app.footer(usage_commands());

    std::string command, config_path, out_dir;
    std::vector<std::string> overrides;
    double s = 0.0, gamma = 0.0;
    int n = 0, threads = 1;
    app.add_option("command", command, "command to run")->required();
    app.add_option("--config", config_path, "configuration file");
    app.add_option("--set", overrides, "override, section.key=value (repeatable)")
        ->type_size(1)
        ->allow_extra_args(false);
    auto* s_opt = app.add_option("--s", s, "fractional order in (0, 1)");
    auto* g_opt = app.add_option("--gamma", gamma, "trace exponent in [0, 1)");
    auto* n_opt = app.add_option("--n", n, "tangential dimension");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const auto& names = fbnl::cli::command_names();
    if (std::find(names.begin(), names.end(), command) == names.end()) {
        std::cerr << "unknown command '" << command << "'\n" << app.help();
        return 1;
    }

    try {
        fbnl::cli::Invocation inv;
        inv.command = command;
        inv.cfg = config_path.empty() ? Config{} : Config::load(config_path);
        for (const std::string& o : overrides)
            inv.cfg.set_override(o);
        const auto num = [](double v) {
            std::ostringstream os;
            os.precision(17);
            os << v;
            return os.str();
        };
        if (*s_opt)
            inv.cfg.set("params.s", num(s));
        if (*g_opt)
            inv.cfg.set("params.gamma", num(gamma));
        if (*n_opt)
            inv.cfg.set("params.n", std::to_string(n));
        if (!out_dir.empty())
            inv.out_dir = out_dir;
        else if (const char* env = std::getenv("FBNL_OUT"); env && *env)
            inv.out_dir = env;
        else
            inv.out_dir = inv.cfg.str("run.out", "fbnl_out");
        inv.threads = threads;
        return fbnl::cli::run_command(inv);
    } catch (const fbnl::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return 2;
    } catch (const fbnl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
