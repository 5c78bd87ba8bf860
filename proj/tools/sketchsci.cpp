// Command-line front end: one subcommand per task, plus the HTTP service.

#include "sketchsci/engine.hpp"
#include "sketchsci/service.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace sketchsci;

namespace {

struct TaskOptions {
    std::string input;
    std::string output;
    std::string sketch;
    std::string config;
    std::optional<unsigned> seed;
    bool explain = false;
};

Json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::io, "cannot open file", path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::validation, "file is not valid JSON", path + ": " + e.what());
    }
}

int run(engine::TaskKind kind, const TaskOptions& opts)
{
    auto doc = load_document(opts.input);
    if (!opts.sketch.empty()) {
        auto json = read_json(opts.sketch);
        // Either a bare sketch or a whole document whose sketch is used.
        doc.sketch = sketch_from_json(json.contains("sketch") ? json["sketch"] : json);
    }
    auto cfg = opts.config.empty() ? engine::TaskConfig{} : engine::config_from_json(read_json(opts.config));
    if (opts.seed)
        cfg.seed = *opts.seed;

    auto outcome = engine::execute(kind, doc, cfg);
    if (opts.output.empty())
        std::cout << serialize_document(outcome.document);
    else
        export_workbook(outcome.document.workbook, outcome.document.sketch, opts.output);
    if (opts.explain)
        std::cerr << outcome.summary.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sketch-driven data science on spreadsheet workbooks"};
    app.require_subcommand(1);

    TaskOptions opts;
    std::optional<engine::TaskKind> chosen;
    for (auto [name, kind, help] : {
             std::tuple{"wrangle", engine::TaskKind::wrangle, "Synthesize a reshaping program from group colors"},
             std::tuple{"select", engine::TaskKind::select, "Learn selection queries from positive/negative rows"},
             std::tuple{"cluster", engine::TaskKind::cluster, "Cluster rows under must-link/cannot-link colors"},
             std::tuple{"constraints", engine::TaskKind::learn_constraints, "Discover formulas and constraints"},
             std::tuple{"predict", engine::TaskKind::predict, "Predict target cells with a calibrated ensemble"},
             std::tuple{"autocomplete", engine::TaskKind::autocomplete, "Fill Missing cells consistently"},
         }) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("-i,--input", opts.input, "Workbook (.vsw.json) or directory of CSV files")->required();
        sub->add_option("-o,--output", opts.output, "Write the resulting workbook here instead of stdout");
        sub->add_option("--sketch", opts.sketch, "Sketch JSON replacing the workbook's own sketch");
        sub->add_option("--seed", opts.seed, "Random seed");
        sub->add_option("--config", opts.config, "Task configuration JSON");
        sub->add_flag("--explain", opts.explain, "Print the model summary to stderr");
        sub->callback([&chosen, kind = kind] { chosen = kind; });
    }

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--host", host, "Listen address");
    serve->add_option("--port", port, "Listen port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (serve->parsed()) {
            service::SessionStore store;
            service::Server server(store);
            std::cerr << "listening on " << host << ":" << port << '\n';
            if (!server.listen(host, port)) {
                std::cerr << "error: io: cannot listen on " << host << ":" << port << '\n';
                return 1;
            }
            return 0;
        }
        return run(*chosen, opts);
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what();
        if (!e.details().empty())
            std::cerr << " (" << e.details() << ")";
        std::cerr << '\n';
        return engine::exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
