#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lh/semantics.hpp"
#include "lh/syntax.hpp"

namespace lh {

struct SpaceStats {
    std::size_t pending = 0;      // Cast + Check + Stack nodes
    std::size_t chain = 0;        // longest run of directly nested casts
    std::size_t max_reflist = 0;  // longest refinement list anywhere
    std::size_t proxy_wrap = 0;   // most casts stacked directly on a lambda
    std::size_t live_types = 0;   // |types_of(e)|

    bool operator==(const SpaceStats&) const = default;
    // Componentwise maximum.
    void absorb(const SpaceStats& o);
};

// O(1): read off the summary cached on the root node.
SpaceStats space_stats(const Term& e);

// Number of distinct types of each height occurring in e.
std::map<int, std::size_t> live_types_by_height(const Term& e);

struct MeteredStep {
    std::size_t index;  // 1-based step number
    std::string rule;
    SpaceStats stats;   // of the term after this step
};

struct MeteredRun {
    Outcome outcome;
    SpaceStats initial;
    SpaceStats max;  // over the initial term and every step
    std::vector<MeteredStep> series;
};

// eval with per-step accounting; the outcome is exactly eval's. With
// keep_series unset only the maxima are kept.
MeteredRun eval_metered(Mode m, const TermPtr& e, std::size_t budget, const EvalConfig& cfg = {},
                        bool keep_series = true);

// Header `step,rule,pending,chain,max_reflist,proxy_wrap,live_types`.
void write_series_csv(std::ostream& out, const MeteredRun& run);

nlohmann::json to_json(const SpaceStats& s);
nlohmann::json series_json(const MeteredRun& run);

}  // namespace lh
