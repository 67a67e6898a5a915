#include "microdisk/errors.hpp"
#include "microdisk/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>

namespace ex = microdisk::experiment;

namespace
{

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

void print_catalog()
{
    for (const auto &e : ex::catalog())
    {
        std::cout << e.name << "\n    " << e.summary << "\n";
        if (!e.scan.empty())
            std::cout << "    scan: " << e.scan << "\n";
    }
}

int run_config(const std::string &path, const std::string &out_dir, int threads)
{
    ex::Config cfg = ex::load_config(path);
    if (threads > 0)
    {
        cfg.threads = threads;
        cfg.validate();
    }
    const ex::Result result = ex::run(cfg);
    const auto files = ex::write_outputs(cfg, result, out_dir);
    for (const auto &t : result.targets)
        std::printf("%s  %s = %.6g  [%.6g, %.6g]\n", t.pass ? "PASS" : "FAIL", t.name.c_str(), t.value, t.lower,
                    t.upper);
    std::printf("%s: config %s, %zu file(s) in %s, targets %s\n", ex::kind_name(cfg.kind).c_str(),
                cfg.hash().c_str(), files.size(), out_dir.c_str(), result.pass() ? "pass" : "FAIL");
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Microdisk resonator experiments"};
    app.require_subcommand(1);

    auto *list = app.add_subcommand("list", "Print the experiment catalog");
    auto *run = app.add_subcommand("run", "Run one experiment config");
    std::string config_path;
    std::string out_dir = "out";
    int threads = 0;
    run->add_option("config", config_path, "Config file (section.key = value lines)")->required();
    run->add_option("--out", out_dir, "Output directory")->envname("MICRODISK_OUT")->capture_default_str();
    run->add_option("--threads", threads, "Worker threads (overrides the config)")->check(CLI::Range(1, 256));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try
    {
        if (list->parsed())
        {
            print_catalog();
            return 0;
        }
        return run_config(config_path, out_dir, threads);
    }
    catch (const microdisk::ValidationError &e)
    {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}
