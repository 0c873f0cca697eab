#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "istar/export.hpp"
#include "istar/parser.hpp"
#include "istar/validator.hpp"
#include "istar/views.hpp"

#ifdef _WIN32
#include <io.h>
#define ISTARC_ISATTY(fd) _isatty(fd)
#else
#include <unistd.h>
#define ISTARC_ISATTY(fd) isatty(fd)
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitUsage = 2;

bool use_color() {
    if (std::getenv("NO_COLOR")) return false;
    return ISTARC_ISATTY(2) != 0;
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void print_human(const std::vector<istar::Diagnostic>& diags,
                 const std::string& fallbackFile) {
    bool color = use_color();
    for (const istar::Diagnostic& d : diags) {
        std::string where = fallbackFile;
        if (d.primary.span)
            where = d.primary.span->file + ":" +
                    std::to_string(d.primary.span->startLine) + ":" +
                    std::to_string(d.primary.span->startCol);
        const char* sev = to_string(d.severity);
        if (color) {
            const char* tint =
                d.severity == istar::Severity::Error ? "\033[31m" : "\033[33m";
            std::cerr << where << ": " << tint << sev << "\033[0m"
                      << "[" << d.code << "]: " << d.message << "\n";
        } else {
            std::cerr << where << ": " << sev << "[" << d.code
                      << "]: " << d.message << "\n";
        }
    }
}

struct Options {
    std::vector<std::string> inputs;
    std::string diagnosticsFormat = "human";
    std::string outputPath;

    void print(const std::vector<istar::Diagnostic>& diags,
               const std::string& file) const {
        if (diagnosticsFormat == "machine")
            std::cerr << istar::diagnostics_to_machine(diags);
        else
            print_human(diags, file);
    }
};

bool write_output(const Options& opts, const std::string& text) {
    if (opts.outputPath.empty()) {
        std::cout << text;
        return true;
    }
    std::ofstream out(opts.outputPath, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << opts.outputPath << "'\n";
        return false;
    }
    out << text;
    return true;
}

// parse + validate one file; on success fills `model`
int check_file(const Options& opts, const std::string& path,
               std::optional<istar::Model>* modelOut = nullptr) {
    auto source = read_file(path);
    if (!source) {
        std::cerr << "error: cannot read '" << path << "'\n";
        return kExitUsage;
    }
    istar::ParseOutcome outcome = istar::parse(*source, path);
    if (!outcome.ok()) {
        opts.print(outcome.diagnostics, path);
        return kExitDiagnostics;
    }
    std::vector<istar::Diagnostic> diags = istar::validate(*outcome.model);
    std::vector<istar::Diagnostic> all = outcome.diagnostics;  // warnings
    all.insert(all.end(), diags.begin(), diags.end());
    istar::sort_diagnostics(all);
    if (!all.empty()) opts.print(all, path);
    bool hasErrors = false;
    for (const istar::Diagnostic& d : all)
        if (d.severity == istar::Severity::Error) hasErrors = true;
    if (hasErrors) return kExitDiagnostics;
    if (modelOut) *modelOut = std::move(*outcome.model);
    return kExitOk;
}

int run_check(const Options& opts) {
    int worst = kExitOk;
    for (const std::string& path : opts.inputs)
        worst = std::max(worst, check_file(opts, path));
    return worst;
}

int run_view(const Options& opts, const std::string& kindName,
             const std::vector<std::string>& openNames) {
    const std::string& path = opts.inputs.front();
    std::optional<istar::Model> model;
    int rc = check_file(opts, path, &model);
    if (rc != kExitOk) return rc;

    istar::ViewKind kind;
    if (kindName == "sr") kind = istar::ViewKind::sr();
    else if (kindName == "sd") kind = istar::ViewKind::sd();
    else if (kindName == "actor") kind = istar::ViewKind::actor_view();
    else if (kindName == "functional") kind = istar::ViewKind::functional();
    else if (kindName == "hybrid") {
        std::set<istar::ActorId> open;
        for (const std::string& name : openNames) {
            std::vector<istar::ActorId> hits;
            for (const istar::Actor& actor : model->actors)
                if (actor.name == name) hits.push_back(actor.id);
            if (hits.empty()) {
                std::cerr << "error: --open names unknown actor \"" << name
                          << "\"\n";
                return kExitUsage;
            }
            if (hits.size() > 1) {
                std::cerr << "error: --open actor name \"" << name
                          << "\" is ambiguous\n";
                return kExitUsage;
            }
            open.insert(hits.front());
        }
        kind = istar::ViewKind::hybrid(std::move(open));
    } else {
        std::cerr << "error: unknown view kind '" << kindName << "'\n";
        return kExitUsage;
    }

    istar::ProjectOutcome outcome = istar::project(*model, kind);
    if (!outcome.ok()) {
        std::cerr << "error: " << outcome.error->message << "\n";
        return kExitDiagnostics;
    }
    return write_output(opts, istar::to_graph_text(*outcome.view))
               ? kExitOk
               : kExitUsage;
}

int run_export(const Options& opts, const std::string& formatName) {
    const std::string& path = opts.inputs.front();
    std::optional<istar::Model> model;
    int rc = check_file(opts, path, &model);
    if (rc != kExitOk) return rc;
    if (formatName == "json")
        return write_output(opts, istar::to_interchange(*model)) ? kExitOk
                                                                 : kExitUsage;
    istar::ProjectOutcome outcome =
        istar::project(*model, istar::ViewKind::sr());
    if (!outcome.ok()) {
        std::cerr << "error: " << outcome.error->message << "\n";
        return kExitDiagnostics;
    }
    return write_output(opts, istar::to_graph_text(*outcome.view))
               ? kExitOk
               : kExitUsage;
}

int run_fmt(const Options& opts, bool write, bool checkOnly) {
    int worst = kExitOk;
    for (const std::string& path : opts.inputs) {
        auto source = read_file(path);
        if (!source) {
            std::cerr << "error: cannot read '" << path << "'\n";
            worst = std::max(worst, kExitUsage);
            continue;
        }
        istar::ParseOutcome outcome = istar::parse(*source, path);
        if (!outcome.ok()) {
            opts.print(outcome.diagnostics, path);
            worst = std::max(worst, kExitDiagnostics);
            continue;
        }
        std::string canonical = istar::format(*outcome.model);
        if (checkOnly) {
            if (canonical != *source) {
                std::cerr << path << ": not canonically formatted\n";
                worst = std::max(worst, kExitDiagnostics);
            }
        } else if (write) {
            std::ofstream out(path, std::ios::binary);
            if (!out) {
                std::cerr << "error: cannot write '" << path << "'\n";
                worst = std::max(worst, kExitUsage);
                continue;
            }
            out << canonical;
        } else {
            std::cout << canonical;
        }
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"iStar 2.0 model toolchain"};
    app.require_subcommand(1);

    Options opts;

    auto add_common = [&](CLI::App* cmd, bool manyInputs) {
        cmd->add_option("inputs", opts.inputs, ".istar input files")
            ->required()
            ->expected(manyInputs ? -1 : 1);
        cmd->add_option("--diagnostics", opts.diagnosticsFormat,
                        "diagnostics format: human or machine")
            ->check(CLI::IsMember({"human", "machine"}));
    };

    CLI::App* check = app.add_subcommand("check", "parse and validate models");
    add_common(check, true);

    std::string viewKind = "sr";
    std::vector<std::string> openNames;
    CLI::App* view = app.add_subcommand("view", "project a model view");
    add_common(view, false);
    view->add_option("--kind", viewKind,
                     "view kind: sr, sd, hybrid, actor or functional")
        ->required()
        ->check(CLI::IsMember({"sr", "sd", "hybrid", "actor", "functional"}));
    view->add_option("--open", openNames,
                     "actor names whose boundaries stay open (hybrid)");
    view->add_option("-o,--output", opts.outputPath, "output file");

    std::string exportFormat = "json";
    CLI::App* exp = app.add_subcommand("export", "emit interchange data");
    add_common(exp, false);
    exp->add_option("--format", exportFormat, "output format: json or dot")
        ->required()
        ->check(CLI::IsMember({"json", "dot"}));
    exp->add_option("-o,--output", opts.outputPath, "output file");

    bool fmtWrite = false, fmtCheck = false;
    CLI::App* fmt = app.add_subcommand("fmt", "canonical formatting");
    add_common(fmt, true);
    fmt->add_flag("--write", fmtWrite, "rewrite files in place");
    fmt->add_flag("--check", fmtCheck, "exit 1 if any input is not canonical");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream sink;
        int code = app.exit(e, sink, sink);
        if (code == 0) {  // --help and friends
            std::cout << sink.str();
            return kExitOk;
        }
        std::cerr << sink.str();
        return kExitUsage;
    }

    if (check->parsed()) return run_check(opts);
    if (view->parsed()) return run_view(opts, viewKind, openNames);
    if (exp->parsed()) return run_export(opts, exportFormat);
    if (fmt->parsed()) return run_fmt(opts, fmtWrite, fmtCheck);
    return kExitUsage;
}
