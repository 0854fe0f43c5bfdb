#pragma once

#include <initializer_list>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "odslice/baselines.hpp"
#include "odslice/exec.hpp"
#include "odslice/minilang.hpp"
#include "odslice/report.hpp"
#include "odslice/sda.hpp"
#include "odslice/slicer.hpp"

namespace testing {

inline constexpr std::string_view kP1 =
    "proc main() {\n"
    "  x = 1;\n"
    "  y = 2;\n"
    "  z = x + 3;\n"
    "  print z;\n"
    "}\n";

inline constexpr std::string_view kP2 =
    "proc main() {\n"
    "  input a;\n"
    "  if (a > 0) {\n"
    "    b = 1;\n"
    "  } else {\n"
    "    b = 2;\n"
    "  }\n"
    "  print b;\n"
    "}\n";

inline constexpr std::string_view kP3 =
    "proc inc(v) {\n"
    "  r = v + 1;\n"
    "  return r;\n"
    "}\n"
    "proc main() {\n"
    "  x = 1;\n"
    "  y = call inc(x);\n"
    "  z = call inc(7);\n"
    "  print y;\n"
    "}\n";

inline odslice::NodeId N(const odslice::Program& p, std::string_view label) {
    const auto colon = label.find(':');
    const auto node = p.find_node(label.substr(0, colon), std::stoi(std::string(label.substr(colon + 1))));
    if (!node) throw std::invalid_argument("no node " + std::string(label));
    return *node;
}

inline odslice::NodeSet nodes(const odslice::Program& p, std::initializer_list<std::string_view> ls) {
    odslice::NodeSet s;
    for (auto l : ls) s.insert(N(p, l));
    return s;
}

inline odslice::PairSet pairs(const odslice::Program& p,
                              std::initializer_list<std::pair<std::string_view, std::string_view>> ls) {
    odslice::PairSet s;
    for (auto [w, r] : ls) s.emplace(N(p, w), N(p, r));
    return s;
}

inline odslice::Context ctx(const odslice::Program& p, std::initializer_list<std::string_view> ls) {
    odslice::Context c;
    for (auto l : ls) c.push_back(N(p, l));
    std::sort(c.begin(), c.end());
    return c;
}

inline std::vector<std::string> labels_of(const odslice::Program& p, const odslice::NodeSet& s) {
    return odslice::labels(p, s);
}

/// Brute-force corroboration: filter the complete DU-pair record of a run
/// stopped at `stop` down to the static pairs of interest.
inline std::set<odslice::ContextualizedFrontier> trace_filtered(const odslice::Program& program,
                                                                std::span<const std::int64_t> input,
                                                                const odslice::PairSet& f2c, odslice::Occurrence stop) {
    const auto trace = odslice::record_trace(program, input, stop);
    std::size_t stop_idx = 0;
    for (std::size_t i = 0; i < trace.occurrences.size(); ++i)
        if (trace.occurrences[i].occ == stop) stop_idx = i;
    const auto horizon = trace.occurrences[stop_idx].end;
    std::set<odslice::ContextualizedFrontier> out;
    for (const auto& du : trace.du_pairs) {
        if (du.time > horizon) continue;
        const auto w = trace.occurrences[du.writer].occ.node;
        const auto r = trace.occurrences[du.reader].occ.node;
        if (!f2c.contains({w, r})) continue;
        out.insert({w, trace.context_of(du.writer), r, trace.context_of(du.reader)});
    }
    return out;
}

}  // namespace testing
