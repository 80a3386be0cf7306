#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hyperlip/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Lipschitz-equivalence certificates for self-similar sets via augmented trees"};
    app.require_subcommand(1);

    std::string config_path, out_path, dot_path;
    int depth = -1;
    long long budget_k = -1;
    int budget_class = -1;

    for (const std::string& name : hyperlip::command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "job config (JSON)");
        sub->add_option("--depth", depth, "tree depth override");
        sub->add_option("--budget-k", budget_k, "rearrangement power budget override");
        sub->add_option("--budget-class", budget_class, "classification budget override");
        sub->add_option("--out", out_path, "report output path (default: stdout)");
        sub->add_option("--dot", dot_path, "DOT export path");
    }

    CLI11_PARSE(app, argc, argv);
    std::string command = app.get_subcommands().front()->get_name();

    hyperlip::JobConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "cannot open config: " << config_path << "\n";
                return 1;
            }
            std::stringstream buf;
            buf << in.rdbuf();
            cfg = hyperlip::parse_config(buf.str());
        }
    } catch (const hyperlip::Error& e) {
        nlohmann::ordered_json err;
        err["schema"] = "1";
        err["command"] = command;
        err["error"] = {{"code", e.code()}, {"message", e.what()}};
        std::cout << err.dump(2) << "\n";
        return 1;
    }
    if (depth > 0) cfg.depth = depth;
    if (budget_k > 0) cfg.budgets.k = budget_k;
    if (budget_class > 0) cfg.budgets.cls = budget_class;
    if (!out_path.empty()) cfg.out_report = out_path;
    if (!dot_path.empty()) cfg.out_dot = dot_path;

    hyperlip::CommandResult res = hyperlip::run_command(command, cfg);
    std::string text = res.report.dump(2) + "\n";
    if (!cfg.out_report.empty()) {
        std::ofstream out(cfg.out_report);
        out << text;
    } else {
        std::cout << text;
    }
    return res.exit_code;
}
