// causaforge: staged command-line front end.
//
//   causaforge run --config pipeline.ini --mock --seed 7
//   causaforge predict --config pipeline.ini --predict.threshold 0.6
//
// Values come from built-in defaults, then the --config file, then flags.

#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>
#include <map>

#include "causaforge/errors.hpp"
#include "causaforge/pipeline.hpp"

namespace cf = causaforge;
namespace pl = causaforge::pipeline;

namespace {

enum Exit { kOk = 0, kUsage = 1, kMissing = 2, kProvider = 3, kData = 4 };

struct Overrides {
    std::string config_path;
    bool mock = false;
    std::string seed;
    std::map<std::string, std::string> values;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config_path, "INI config file (sections mirror the flags below)");
    sub->add_flag("--mock", o.mock, "same as --provider.mock true");
    sub->add_option("--seed", o.seed, "same as --global.seed");
    for (const auto& k : pl::config_keys()) sub->add_option("--" + k.name, o.values[k.name], k.help);
}

pl::PipelineConfig resolve(CLI::App* sub, const Overrides& o) {
    pl::PipelineConfig config;
    if (!o.config_path.empty()) {
        if (!std::filesystem::is_regular_file(o.config_path))
            throw cf::ConfigError("config file not found: " + o.config_path);
        pl::load_ini(config, o.config_path);
    }
    for (const auto& k : pl::config_keys())
        if (sub->count("--" + k.name)) k.set(config, o.values.at(k.name));
    if (sub->count("--seed")) pl::set_config_value(config, "global.seed", o.seed);
    if (o.mock) config.provider.mock = true;
    return config;
}

std::string effective_ini(const pl::PipelineConfig& config) {
    std::string out;
    std::string section;
    for (const auto& k : pl::config_keys()) {
        const auto dot = k.name.find('.');
        const std::string s = k.name.substr(0, dot);
        if (s != section) {
            out += (out.empty() ? "[" : "\n[") + s + "]\n";
            section = s;
        }
        out += k.name.substr(dot + 1) + " = " + k.get(config) + "\n";
    }
    return out;
}

int report(const std::string& stage, const std::string& code, const std::string& message, int exit_code) {
    nlohmann::json j = {{"error", code}, {"message", message}, {"stage", stage}, {"exit_code", exit_code}};
    std::cerr << j.dump() << std::endl;
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causaforge: literature causal graph, link prediction and hypothesis generation"};
    app.require_subcommand(1);
    Overrides o;

    std::vector<std::pair<CLI::App*, std::vector<pl::Stage>>> stage_commands;
    auto stage_cmd = [&](pl::Stage s, const std::string& help) {
        auto* sub = app.add_subcommand(std::string(pl::to_string(s)), help);
        add_common(sub, o);
        stage_commands.push_back({sub, {s}});
    };
    stage_cmd(pl::Stage::ingest, "filter the corpus, strip references and chunk");
    stage_cmd(pl::Stage::extract, "extract causal assertions from chunks");
    stage_cmd(pl::Stage::build_graph, "merge assertions into the causal graph");
    stage_cmd(pl::Stage::embed, "node2vec embeddings of the graph");
    stage_cmd(pl::Stage::predict, "rank unconnected concept pairs");
    stage_cmd(pl::Stage::generate, "generate hypotheses for ranked pairs");
    stage_cmd(pl::Stage::evaluate, "statistics, t-SNE and curves from ratings");
    stage_cmd(pl::Stage::vectorize, "embed hypothesis statements via the sidecar");

    auto* run = app.add_subcommand("run", "ingest through generate");
    add_common(run, o);
    stage_commands.push_back({run, pl::generation_stages()});

    auto* keys = app.add_subcommand("fixture-keys", "print mock fixture names for every chunk prompt");
    add_common(keys, o);
    auto* show = app.add_subcommand("show-config", "print the effective configuration as INI");
    add_common(show, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    CLI::App* active = app.get_subcommands().front();
    std::string current = active->get_name();
    try {
        const auto config = resolve(active, o);
        if (active == keys) {
            std::cout << pl::extraction_fixture_keys(config);
            return kOk;
        }
        if (active == show) {
            std::cout << effective_ini(config);
            return kOk;
        }
        for (const auto& [cmd, stages] : stage_commands) {
            if (cmd != active) continue;
            for (pl::Stage s : stages) {
                current = std::string(pl::to_string(s));
                pl::execute_stage(s, config, std::cerr);
            }
        }
        return kOk;
    } catch (const cf::ConfigError& e) {
        return report(current, e.code(), e.what(), kUsage);
    } catch (const cf::MissingPrerequisite& e) {
        return report(current, e.code(), e.what(), kMissing);
    } catch (const cf::ProviderError& e) {
        return report(current, e.code(), e.what(), kProvider);
    } catch (const cf::ProviderExhausted& e) {
        return report(current, e.code(), e.what(), kProvider);
    } catch (const cf::OversizeRequest& e) {
        return report(current, e.code(), e.what(), kProvider);
    } catch (const cf::Error& e) {
        return report(current, e.code(), e.what(), kData);
    } catch (const std::exception& e) {
        return report(current, "internal", e.what(), kData);
    }
}
