#pragma once

#include "pdv/engine.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdv {

// Flat, serializable view of an engine run: one entry per witness check.
struct TraceEntry {
    int iter = 0;
    std::string side; // "dual" | "primal"
    std::string candidate;
    std::optional<std::string> counter;
    std::string outcome; // "pass" | "counter"
};

using TraceLog = std::vector<TraceEntry>;

template <LagrangianInstance I>
TraceLog to_trace_log(I const & inst, Verdict<I> const & v, Side start_side) {
    TraceLog log;
    for (auto const & rec : v.trace) {
        TraceEntry dual;
        if (!rec.dual_outcome.empty()) {
            dual.iter = rec.iter;
            dual.side = "dual";
            dual.candidate = rec.beta ? inst.describe_y(*rec.beta) : "";
            if (rec.delta) { dual.counter = inst.describe_x(*rec.delta); }
            dual.outcome = rec.dual_outcome;
        }
        TraceEntry primal;
        if (!rec.primal_outcome.empty()) {
            primal.iter = rec.iter;
            primal.side = "primal";
            primal.candidate = rec.alpha ? inst.describe_x(*rec.alpha) : "";
            if (rec.gamma) { primal.counter = inst.describe_y(*rec.gamma); }
            primal.outcome = rec.primal_outcome;
        }
        if (start_side == Side::Dual) {
            if (!dual.side.empty()) { log.push_back(std::move(dual)); }
            if (!primal.side.empty()) { log.push_back(std::move(primal)); }
        } else {
            if (!primal.side.empty()) { log.push_back(std::move(primal)); }
            if (!dual.side.empty()) { log.push_back(std::move(dual)); }
        }
    }
    return log;
}

} // namespace pdv
