#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "itergm/cli.hpp"
#include "itergm/errors.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"itergm: iterated integrals and Melnikov functions of polynomial Hamiltonians"};
    app.require_subcommand(1);

    std::string config, output, csv_dir;
    bool no_timings = false;
    auto* run = app.add_subcommand("run", "execute the commands of a job file");
    run->add_option("config", config, "job configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", output, "write the JSON report here instead of stdout");
    run->add_option("--csv-dir", csv_dir, "directory for CSV side outputs");
    run->add_flag("--no-timings", no_timings, "omit wall-clock timings from the report");

    auto* hash = app.add_subcommand("hash", "print the config hash of a job file");
    hash->add_option("config", config, "job configuration file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    itergm::JobConfig cfg;
    try {
        cfg = itergm::load_config(config);
    } catch (const itergm::ConfigError& e) {
        std::cerr << config << ": " << e.what();
        if (!e.field().empty()) std::cerr << " [field " << e.field() << "]";
        std::cerr << "\n";
        return 2;
    }

    if (*hash) {
        std::cout << itergm::config_hash(cfg) << "\n";
        return 0;
    }

    itergm::RunReport rep = itergm::run(cfg);
    std::string text = (no_timings ? rep.document : rep.full()).dump(2) + "\n";
    if (output.empty()) {
        std::cout << text;
    } else {
        std::ofstream(output) << text;
    }
    if (!csv_dir.empty()) {
        fs::create_directories(csv_dir);
        for (const auto& [name, body] : rep.csv) std::ofstream(fs::path(csv_dir) / name) << body;
    }
    for (const auto& [name, entry] : rep.document["results"].items())
        if (entry["status"] != "ok")
            std::cerr << name << ": " << entry["error"]["message"].get<std::string>() << "\n";
    return rep.ok ? 0 : 1;
}
