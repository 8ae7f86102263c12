#include "lh/driver.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lh/harness.hpp"
#include "lh/metering.hpp"
#include "lh/print.hpp"
#include "lh/typecheck.hpp"

namespace lh {

int exit_code(const Outcome& o) {
    switch (o.kind) {
        case Outcome::Kind::Value: return kExitValue;
        case Outcome::Kind::Blamed: return kExitBlame;
        case Outcome::Kind::Stuck: return kExitStuck;
        case Outcome::Kind::BudgetExceeded: return kExitBudget;
        case Outcome::Kind::Fault: return kExitFault;
    }
    return kExitStuck;
}

std::size_t default_budget() {
    if (const char* env = std::getenv("LH_BUDGET")) {
        char* end = nullptr;
        unsigned long long n = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
    }
    return kDefaultBudget;
}

namespace {

std::vector<std::pair<TypePtr, TypePtr>> read_axioms(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read axiom file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("axiom file " + path + ": " + e.what());
    }
    if (!j.is_array()) throw std::runtime_error("axiom file " + path + ": expected a list of pairs");
    std::vector<std::pair<TypePtr, TypePtr>> out;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string())
            throw std::runtime_error("axiom file " + path + ": expected [\"T1\", \"T2\"], got " + pair.dump());
        out.emplace_back(parse_type(pair[0].get<std::string>()), parse_type(pair[1].get<std::string>()));
    }
    return out;
}

RunReport reject(const std::string& kind, const std::string& message) {
    RunReport r;
    r.exit = kExitTypeError;
    r.text = kind + " error: " + message + "\n";
    r.json = {{"command", "run"}, {"error", {{"kind", kind}, {"message", message}}}};
    return r;
}

}  // namespace

EvalConfig make_eval_config(const RunConfig& cfg) {
    EvalConfig ec;
    if (cfg.choose == "lex-max") {
        ec.choose = ChoosePolicy{"lex-max", [](const TypeSet& s) { return s.items().back(); }};
    } else if (cfg.choose != "lex-min") {
        throw std::invalid_argument("unknown choose policy '" + cfg.choose + "'");
    }
    if (cfg.oracle == "axioms") {
        ec.oracle = axiom_oracle(cfg.axiom_file.empty() ? std::vector<std::pair<TypePtr, TypePtr>>{}
                                                        : read_axioms(cfg.axiom_file));
    } else if (cfg.oracle != "alpha-eq") {
        throw std::invalid_argument("unknown oracle '" + cfg.oracle + "'");
    }
    return ec;
}

RunReport run_source(const SourceFile& f, const RunConfig& cfg) {
    EvalConfig ec = make_eval_config(cfg);
    TypePtr type;
    if (!cfg.runtime_forms) {
        CheckConfig cc;
        cc.eval = ec;
        TypeResult t = check_file(f, cc);
        if (!t) return reject("type", t.error->message());
        type = t.type;
    }

    RunReport r;
    std::ostringstream text;
    r.json = {{"command", "run"}, {"mode", mode_name(cfg.mode)}, {"budget", cfg.budget}};
    if (type) r.json["type"] = print(type);

    if (cfg.trace) {
        Trace tr;
        eval(cfg.mode, f.main, cfg.budget, ec, &tr);
        auto steps = nlohmann::json::array();
        for (std::size_t i = 0; i < tr.steps.size(); ++i) {
            const TraceStep& s = tr.steps[i];
            steps.push_back({{"step", i + 1},
                             {"rule", s.rule},
                             {"term", print(s.term)},
                             {"space", to_json(space_stats(*s.term))}});
            text << (i + 1) << "\t" << s.rule << "\t" << print(s.term) << "\n";
        }
        r.json["trace"] = std::move(steps);
    }

    MeteredRun run = eval_metered(cfg.mode, f.main, cfg.budget, ec, cfg.space);
    r.outcome = run.outcome;
    r.exit = exit_code(run.outcome);
    r.json["outcome"] = to_json(run.outcome);
    text << describe(run.outcome) << "\n";

    if (cfg.space) {
        r.json["space"] = {{"initial", to_json(run.initial)}, {"max", to_json(run.max)}, {"series", series_json(run)}};
        const SpaceStats& m = run.max;
        text << "max pending=" << m.pending << " chain=" << m.chain << " max_reflist=" << m.max_reflist
             << " proxy_wrap=" << m.proxy_wrap << " live_types=" << m.live_types << "\n";
        write_series_csv(text, run);
    }
    r.text = text.str();
    return r;
}

RunReport run_file(const std::string& path, const RunConfig& cfg) {
    SourceFile f;
    try {
        f = load_file(path);
    } catch (const ParseError& e) {
        return reject("parse", path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " +
                                   e.message());
    } catch (const std::runtime_error& e) {
        return reject("io", e.what());
    }
    return run_source(f, cfg);
}

}  // namespace lh
