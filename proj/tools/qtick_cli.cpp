#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "qtick/json_io.hpp"
#include "qtick/render.hpp"
#include "qtick/udl.hpp"

namespace {

using namespace qtick;

constexpr int kExitOk = 0;
constexpr int kExitError = 1; // validation / semantic / numeric failures
constexpr int kExitUsage = 2;

struct UsageFailure {
    std::string message;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

unsigned thread_budget() {
    const char* env = std::getenv("QTICK_THREADS");
    if (!env || !*env) return 1;
    long n = std::strtol(env, nullptr, 10);
    return n > 1 ? static_cast<unsigned>(n) : 1;
}

AxisVector parse_axis(const std::string& text, bool normalize) {
    double xyz[3];
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
        std::size_t next = text.find(',', pos);
        if (i < 2 && next == std::string::npos)
            throw UsageFailure{"axis must be three comma-separated numbers, got '" + text + "'"};
        std::string part = text.substr(pos, next == std::string::npos ? next : next - pos);
        char* end = nullptr;
        xyz[i] = std::strtod(part.c_str(), &end);
        if (part.empty() || end == part.c_str() || *end != '\0')
            throw UsageFailure{"bad axis component '" + part + "'"};
        pos = next == std::string::npos ? text.size() : next + 1;
    }
    return normalize ? AxisVector::normalized(xyz[0], xyz[1], xyz[2])
                     : AxisVector(xyz[0], xyz[1], xyz[2]);
}

const udl::Block& select_block(const udl::UdlDocument& doc, udl::BlockKind kind,
                               const std::string& name) {
    if (!name.empty()) {
        const udl::Block* block = doc.find(kind, name);
        if (!block)
            throw error(std::string("no ") + udl::to_string(kind) + " block named '" + name + "'");
        return *block;
    }
    const udl::Block* block = doc.find(kind);
    if (!block) throw error(std::string("file contains no ") + udl::to_string(kind) + " block");
    return *block;
}

bool is_builtin_figure(const std::string& name) {
    for (const std::string& fig : builtin_figure_names())
        if (fig == name) return true;
    return false;
}

void emit(const json& doc) { std::cout << doc.dump() << "\n"; }

int run(int argc, char** argv) {
    CLI::App app{"quantum automaton toolkit"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("--verbose", verbose, "human-readable summary on stderr");

    // toy ------------------------------------------------------------------
    CLI::App* toy = app.add_subcommand("toy", "self-referential two-level universe");
    toy->require_subcommand(1);

    std::string toy_file, toy_name;
    std::optional<std::uint64_t> toy_seed;
    CLI::App* toy_run_cmd = toy->add_subcommand("run", "sample one history");
    toy_run_cmd->add_option("file", toy_file, "scenario file")->required();
    toy_run_cmd->add_option("--seed", toy_seed, "override the file seed");
    toy_run_cmd->add_option("--name", toy_name, "block name when several are present");

    std::string enum_file, enum_name;
    unsigned enum_depth = 0;
    CLI::App* toy_enum_cmd = toy->add_subcommand("enumerate", "expand the history tree");
    toy_enum_cmd->add_option("file", enum_file, "scenario file")->required();
    toy_enum_cmd->add_option("--depth", enum_depth, "tree depth")->required();
    toy_enum_cmd->add_option("--name", enum_name, "block name when several are present");

    // epr ------------------------------------------------------------------
    CLI::App* epr = app.add_subcommand("epr", "two-tick pair experiments");
    epr->require_subcommand(1);

    std::string epr_file, epr_name;
    std::optional<std::uint64_t> epr_seed;
    bool epr_records = false;
    CLI::App* epr_run_cmd = epr->add_subcommand("run", "sampled runs plus the exact table");
    epr_run_cmd->add_option("file", epr_file, "scenario file")->required();
    epr_run_cmd->add_option("--seed", epr_seed, "override the file seed");
    epr_run_cmd->add_option("--name", epr_name, "block name when several are present");
    epr_run_cmd->add_flag("--records", epr_records, "include per-run records");

    std::string cor_b, cor_c;
    bool cor_norm = false;
    CLI::App* cor_cmd = epr->add_subcommand("correlate", "exact spin correlation");
    cor_cmd->add_option("--b", cor_b, "first axis x,y,z")->required();
    cor_cmd->add_option("--c", cor_c, "second axis x,y,z")->required();
    cor_cmd->add_flag("--normalize", cor_norm, "rescale non-unit axes");

    std::string chsh_b, chsh_b2, chsh_c, chsh_c2;
    bool chsh_norm = false;
    CLI::App* chsh_cmd = epr->add_subcommand("chsh", "CHSH combination of four axes");
    chsh_cmd->add_option("--b", chsh_b, "first axis of observer one")->required();
    chsh_cmd->add_option("--b2", chsh_b2, "second axis of observer one")->required();
    chsh_cmd->add_option("--c", chsh_c, "first axis of observer two")->required();
    chsh_cmd->add_option("--c2", chsh_c2, "second axis of observer two")->required();
    chsh_cmd->add_flag("--normalize", chsh_norm, "rescale non-unit axes");

    // decay ------------------------------------------------------------------
    CLI::App* decay = app.add_subcommand("decay", "transition probability pictures");
    decay->require_subcommand(1);
    std::string decay_file, decay_name;
    CLI::App* decay_check_cmd = decay->add_subcommand("check", "compare the three pictures");
    decay_check_cmd->add_option("file", decay_file, "scenario file")->required();
    decay_check_cmd->add_option("--name", decay_name, "block name when several are present");

    // render / parse ----------------------------------------------------------
    std::string render_target, render_out, render_name;
    CLI::App* render_cmd = app.add_subcommand("render", "emit DOT for a figure or diagram file");
    render_cmd->add_option("target", render_target, "built-in figure name or .udl file")
        ->required();
    render_cmd->add_option("-o,--output", render_out, "write DOT here instead of stdout");
    render_cmd->add_option("--name", render_name, "diagram block name");

    std::string parse_file;
    CLI::App* parse_cmd = app.add_subcommand("parse", "syntax/semantic check only");
    parse_cmd->add_option("file", parse_file, "scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return kExitUsage;
    }

    if (toy_run_cmd->parsed()) {
        udl::UdlDocument doc = udl::parse(slurp(toy_file));
        ToyConfig cfg = udl::toy_config_from(select_block(doc, udl::BlockKind::Toy, toy_name));
        if (toy_seed) cfg.seed = *toy_seed; // flag beats file
        ToyRun result = run_toy(cfg);
        if (verbose)
            std::cerr << "toy run: " << result.ticks.size() << " ticks, final lambda "
                      << result.final_state.lambda_n << "\n";
        emit(toy_run_json(cfg, result));
        return kExitOk;
    }
    if (toy_enum_cmd->parsed()) {
        udl::UdlDocument doc = udl::parse(slurp(enum_file));
        ToyConfig cfg = udl::toy_config_from(select_block(doc, udl::BlockKind::Toy, enum_name));
        HistoryTree tree = enumerate_tree(cfg, enum_depth);
        if (verbose)
            std::cerr << "enumerated " << tree.leaves().size() << " leaves, pruned "
                      << tree.pruned_branches << "\n";
        emit(toy_tree_json(cfg, tree));
        return kExitOk;
    }
    if (epr_run_cmd->parsed()) {
        udl::UdlDocument doc = udl::parse(slurp(epr_file));
        EprConfig cfg = udl::epr_config_from(select_block(doc, udl::BlockKind::Epr, epr_name));
        if (epr_seed) cfg.seed = *epr_seed;
        auto records = run_epr(cfg, thread_budget());
        if (verbose) std::cerr << "epr run: " << records.size() << " runs\n";
        emit(epr_run_json(cfg, records, epr_records));
        return kExitOk;
    }
    if (cor_cmd->parsed()) {
        double e = correlation(parse_axis(cor_b, cor_norm), parse_axis(cor_c, cor_norm));
        emit(json{{"E", e}});
        return kExitOk;
    }
    if (chsh_cmd->parsed()) {
        double s = chsh(parse_axis(chsh_b, chsh_norm), parse_axis(chsh_b2, chsh_norm),
                        parse_axis(chsh_c, chsh_norm), parse_axis(chsh_c2, chsh_norm));
        emit(json{{"S", s}});
        return kExitOk;
    }
    if (decay_check_cmd->parsed()) {
        udl::UdlDocument doc = udl::parse(slurp(decay_file));
        DecayProblem problem =
            udl::decay_problem_from(select_block(doc, udl::BlockKind::Decay, decay_name));
        PictureReport rep = compare_pictures(problem);
        if (verbose) std::cerr << "pictures agree within " << rep.max_delta << "\n";
        emit(decay_report_json(rep));
        return rep.breach ? kExitError : kExitOk;
    }
    if (render_cmd->parsed()) {
        ProcessGraph graph = [&] {
            if (is_builtin_figure(render_target)) return builtin_figure(render_target);
            udl::UdlDocument doc = udl::parse(slurp(render_target));
            return udl::graph_from(select_block(doc, udl::BlockKind::Diagram, render_name));
        }();
        std::string dot = to_dot(graph);
        if (render_out.empty()) {
            std::cout << dot;
        } else {
            std::ofstream out(render_out, std::ios::binary);
            if (!out.good()) throw error("cannot write '" + render_out + "'");
            out << dot;
        }
        return kExitOk;
    }
    if (parse_cmd->parsed()) {
        udl::UdlDocument doc = udl::parse(slurp(parse_file));
        json blocks = json::array();
        for (const udl::Block& b : doc.blocks)
            blocks.push_back(json{{"kind", udl::to_string(b.kind)}, {"name", b.name}});
        emit(json{{"blocks", std::move(blocks)}});
        return kExitOk;
    }

    std::cerr << app.help();
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageFailure& e) {
        std::cerr << "usage error: " << e.message << "\n";
        return kExitUsage;
    } catch (const qtick::udl::parse_error& e) {
        std::cerr << e.what() << "\n";
        return kExitError;
    } catch (const qtick::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitError;
    }
}
