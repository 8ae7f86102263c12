// lh: check, run, diff, fuzz and meter programs in the four cast semantics.
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "lh/driver.hpp"
#include "lh/harness.hpp"
#include "lh/metering.hpp"
#include "lh/print.hpp"
#include "lh/typecheck.hpp"

using namespace lh;

namespace {

const std::map<std::string, Mode> kModeNames{
    {"classic", Mode::Classic}, {"forgetful", Mode::Forgetful}, {"heedful", Mode::Heedful},
    {"eidetic", Mode::Eidetic}, {"C", Mode::Classic},           {"F", Mode::Forgetful},
    {"H", Mode::Heedful},       {"E", Mode::Eidetic},
};

void emit(const RunConfig& cfg, const nlohmann::json& j, const std::string& text) {
    if (cfg.json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text;
}

int cmd_check(const std::string& path, const RunConfig& cfg) {
    SourceFile f;
    try {
        f = load_file(path);
    } catch (const ParseError& e) {
        emit(cfg, {{"command", "check"}, {"error", {{"kind", "parse"}, {"message", e.what()}}}},
             std::string("parse error: ") + e.what() + "\n");
        return kExitTypeError;
    }
    CheckConfig cc;
    cc.eval = make_eval_config(cfg);
    TypeResult t = check_file(f, cc);
    if (!t) {
        emit(cfg, {{"command", "check"}, {"error", {{"kind", "type"}, {"message", t.error->message()}}}},
             "type error: " + t.error->message() + "\n");
        return kExitTypeError;
    }
    emit(cfg, {{"command", "check"}, {"type", print(t.type)}}, print(t.type) + "\n");
    return kExitValue;
}

int cmd_run(const std::string& path, const RunConfig& cfg) {
    RunReport r = run_file(path, cfg);
    emit(cfg, r.json, r.text);
    return r.exit;
}

int cmd_space(const std::string& path, RunConfig cfg, const std::string& series) {
    cfg.space = true;
    RunReport r = run_file(path, cfg);
    if (!r.outcome) {
        emit(cfg, r.json, r.text);
        return r.exit;
    }
    if (!series.empty()) {
        // Rerun for the CSV; evaluation is deterministic.
        SourceFile f = load_file(path);
        MeteredRun run = eval_metered(cfg.mode, f.main, cfg.budget, make_eval_config(cfg));
        std::ofstream out(series);
        if (!out) throw std::runtime_error("cannot write " + series);
        write_series_csv(out, run);
    }
    r.json["command"] = "space";
    const auto& m = r.json["space"]["max"];
    std::string text = describe(*r.outcome) + "\nmax pending=" + m["pending"].dump() + " chain=" + m["chain"].dump() +
                       " max_reflist=" + m["max_reflist"].dump() + " proxy_wrap=" + m["proxy_wrap"].dump() +
                       " live_types=" + m["live_types"].dump() + "\n";
    emit(cfg, r.json, text);
    return r.exit;
}

std::string diff_text(const DiffReport& d) {
    std::string s;
    for (Mode m : kAllModes) s += std::string(mode_name(m)) + ": " + describe(d.outcome(m)) + "\n";
    auto line = [&](const char* name, const VerdictEntry& v) {
        s += std::string(name) + " " + std::string(verdict_name(v.verdict));
        if (!v.reason.empty()) s += " (" + v.reason + ")";
        s += "\n";
    };
    line("forgetful", d.forgetful);
    line("heedful", d.heedful);
    line("eidetic", d.eidetic);
    for (const auto& f : d.findings)
        s += std::string(mode_name(f.mode)) + " step " + std::to_string(f.step) + " " + f.kind + ": " + f.detail +
             "\n";
    return s;
}

int cmd_diff(const std::string& path, const RunConfig& cfg) {
    SourceFile f;
    try {
        f = load_file(path);
    } catch (const ParseError& e) {
        emit(cfg, {{"command", "diff"}, {"error", {{"kind", "parse"}, {"message", e.what()}}}},
             std::string("parse error: ") + e.what() + "\n");
        return kExitTypeError;
    }
    DiffOptions opts;
    opts.budget = cfg.budget;
    opts.eval = make_eval_config(cfg);
    opts.check_traces = cfg.trace;
    if (!cfg.runtime_forms) {
        CheckConfig cc;
        cc.eval = opts.eval;
        TypeResult t = check_file(f, cc);
        if (!t) {
            emit(cfg, {{"command", "diff"}, {"error", {{"kind", "type"}, {"message", t.error->message()}}}},
                 "type error: " + t.error->message() + "\n");
            return kExitTypeError;
        }
    }
    DiffReport d = diff_modes(f.main, opts);
    nlohmann::json j = to_json(d);
    j["command"] = "diff";
    emit(cfg, j, diff_text(d));
    return d.failed() || !d.findings.empty() ? 1 : 0;
}

int cmd_fuzz(const RunConfig& cfg, std::size_t count, const std::string& size, std::uint64_t seed) {
    FuzzOptions o;
    o.count = count;
    o.seed = seed;
    auto dash = size.find('-');
    try {
        o.min_size = std::stoi(size.substr(0, dash));
        o.max_size = dash == std::string::npos ? o.min_size : std::stoi(size.substr(dash + 1));
    } catch (const std::logic_error&) {
        throw CLI::ValidationError("--size", "expected N or MIN-MAX, got '" + size + "'");
    }
    if (o.min_size < 1 || o.max_size < o.min_size)
        throw CLI::ValidationError("--size", "empty size range '" + size + "'");
    o.diff.budget = cfg.budget;
    o.diff.eval = make_eval_config(cfg);
    o.diff.check_traces = cfg.trace;
    FuzzSummary s = run_fuzz(o);
    nlohmann::json j = to_json(s);
    j["command"] = "fuzz";
    j["seed"] = seed;
    std::string text = std::to_string(s.items) + " programs, " + std::to_string(s.failures) + " failed, " +
                       std::to_string(s.stuck) + " stuck, " + std::to_string(s.budget_exceeded) +
                       " over budget, " + std::to_string(s.trace_findings) + " trace findings, " +
                       std::to_string(s.chained) + " with chained casts\n";
    for (const auto& item : s.failing)
        text += "seed " + std::to_string(item.seed) + " size " + std::to_string(item.size) + ": " +
                print(item.program) + "\n" + diff_text(item.report);
    emit(cfg, j, text);
    return s.failing.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Manifest contracts with classic, forgetful, heedful and eidetic casts"};
    app.require_subcommand(1);

    RunConfig cfg;
    cfg.budget = default_budget();
    std::string mode = "eidetic";
    app.add_option("--mode,-m", mode, "classic|forgetful|heedful|eidetic (or C/F/H/E)")
        ->check(CLI::IsMember(kModeNames))
        ->capture_default_str();
    app.add_option("--budget", cfg.budget, "Step budget (default 100000, or LH_BUDGET)")->capture_default_str();
    app.add_flag("--trace", cfg.trace, "Print every reduction with its rule name");
    app.add_flag("--space", cfg.space, "Report space statistics");
    app.add_flag("--json", cfg.json, "Machine-readable output (see docs/schema.json)");
    app.add_option("--choose", cfg.choose, "Heedful choice policy")
        ->check(CLI::IsMember({"lex-min", "lex-max"}))
        ->capture_default_str();
    app.add_option("--oracle", cfg.oracle, "Implication oracle")
        ->check(CLI::IsMember({"alpha-eq", "axioms"}))
        ->capture_default_str();
    app.add_option("--axioms", cfg.axiom_file, "JSON list of [T1, T2] pairs; implies --oracle axioms")
        ->check(CLI::ExistingFile);
    app.add_flag("--runtime-forms", cfg.runtime_forms, "Skip the source-program check");

    std::string path;
    auto* check = app.add_subcommand("check", "Type the program in all four modes");
    check->add_option("file", path)->required()->check(CLI::ExistingFile);
    auto* run = app.add_subcommand("run", "Evaluate the program");
    run->add_option("file", path)->required()->check(CLI::ExistingFile);
    auto* diff = app.add_subcommand("diff", "Evaluate in every mode and compare");
    diff->add_option("file", path)->required()->check(CLI::ExistingFile);

    auto* fuzz = app.add_subcommand("fuzz", "Differential testing on generated programs");
    std::size_t count = 1000;
    std::string size = "5-30";
    std::uint64_t seed = 1;
    fuzz->add_option("--count", count)->capture_default_str();
    fuzz->add_option("--size", size, "N or MIN-MAX")->capture_default_str();
    fuzz->add_option("--seed", seed)->capture_default_str();

    auto* space = app.add_subcommand("space", "Space statistics of a run");
    std::string series;
    space->add_option("file", path)->required()->check(CLI::ExistingFile);
    space->add_option("--series", series, "Write the per-step CSV here");

    // Global options are also accepted after the subcommand.
    for (auto* sub : {check, run, diff, fuzz, space}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    cfg.mode = kModeNames.at(mode);
    if (!cfg.axiom_file.empty()) cfg.oracle = "axioms";

    try {
        if (*check) return cmd_check(path, cfg);
        if (*run) return cmd_run(path, cfg);
        if (*diff) return cmd_diff(path, cfg);
        if (*fuzz) return cmd_fuzz(cfg, count, size, seed);
        if (*space) return cmd_space(path, cfg, series);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ParseError& e) {
        std::cerr << "lh: " << e.what() << "\n";
        return kExitTypeError;
    } catch (const std::exception& e) {
        std::cerr << "lh: " << e.what() << "\n";
        return kExitTypeError;
    }
    return 0;
}
