#include "lh/metering.hpp"

#include <algorithm>

namespace lh {

void SpaceStats::absorb(const SpaceStats& o) {
    pending = std::max(pending, o.pending);
    chain = std::max(chain, o.chain);
    max_reflist = std::max(max_reflist, o.max_reflist);
    proxy_wrap = std::max(proxy_wrap, o.proxy_wrap);
    live_types = std::max(live_types, o.live_types);
}

SpaceStats space_stats(const Term& e) {
    const TermInfo& i = e.info;
    return SpaceStats{i.pending, i.chain_max, i.reflist_max, i.wrap_max, i.types ? i.types->size() : 0};
}

std::map<int, std::size_t> live_types_by_height(const Term& e) {
    std::map<int, std::size_t> out;
    for (const auto& t : types_of(e)) ++out[t->height];
    return out;
}

MeteredRun eval_metered(Mode m, const TermPtr& e, std::size_t budget, const EvalConfig& cfg, bool keep_series) {
    MeteredRun run;
    run.initial = space_stats(*e);
    run.max = run.initial;
    run.outcome = eval_observed(m, e, budget, cfg, [&](std::size_t n, const StepOutcome& s) {
        SpaceStats st = space_stats(*s.term);
        run.max.absorb(st);
        if (keep_series) run.series.push_back(MeteredStep{n + 1, s.rule_name(), st});
    });
    return run;
}

void write_series_csv(std::ostream& out, const MeteredRun& run) {
    out << "step,rule,pending,chain,max_reflist,proxy_wrap,live_types\n";
    for (const auto& s : run.series)
        out << s.index << ',' << s.rule << ',' << s.stats.pending << ',' << s.stats.chain << ','
            << s.stats.max_reflist << ',' << s.stats.proxy_wrap << ',' << s.stats.live_types << '\n';
}

nlohmann::json to_json(const SpaceStats& s) {
    return {{"pending", s.pending},
            {"chain", s.chain},
            {"max_reflist", s.max_reflist},
            {"proxy_wrap", s.proxy_wrap},
            {"live_types", s.live_types}};
}

nlohmann::json series_json(const MeteredRun& run) {
    auto arr = nlohmann::json::array();
    for (const auto& s : run.series) {
        arr.push_back({{"step", s.index}, {"rule", s.rule}, {"space", to_json(s.stats)}});
    }
    return arr;
}

}  // namespace lh
